"""Polynomials, rational perturbations, root finding, and orbit iteration."""

import math
import random

import pytest

from mcmlike.dynamics import (
    ComplexPoly,
    ConvergedToCycle,
    Escaped,
    PoleHit,
    Undecided,
    as_quotient,
    auto_radius,
    eval_map,
    eval_map_derivative,
    find_roots,
    iterate_orbit,
    pole_locations,
    product_pole_map,
    simple_poles_map,
)

Q = ComplexPoly([1, 0, -3, 2])  # 1 - 3z^2 + 2z^3


def test_poly_trims_trailing_zeros():
    p = ComplexPoly([1, 2, 0, 0])
    assert p.coeffs == (1 + 0j, 2 + 0j)
    assert p.degree == 1
    assert ComplexPoly([0, 0]).coeffs == (0j,)


def test_poly_eval_matches_direct_sum():
    rng = random.Random(11)
    p = ComplexPoly([complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(6)])
    for _ in range(25):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        direct = sum(c * z**k for k, c in enumerate(p.coeffs))
        assert abs(p.eval(z) - direct) <= 1e-12 * (1 + abs(direct))


def test_poly_arithmetic_and_compose():
    a = ComplexPoly([1, 1])
    b = ComplexPoly([-1, 1])
    assert (a * b).coeffs == (-1 + 0j, 0j, 1 + 0j)
    assert (a + b).coeffs == (0j, 2 + 0j)
    assert (a - a).coeffs == (0j,)
    ident = ComplexPoly([0, 1])
    assert Q.compose(ident).coeffs == Q.coeffs
    inner = ComplexPoly([0.3 + 0.2j, 1 - 0.5j])
    z = 0.7 - 0.4j
    assert abs(Q.compose(inner).eval(z) - Q.eval(inner.eval(z))) < 1e-12


def test_from_roots_and_derivative():
    p = ComplexPoly.from_roots([1, -2, 3j], lead=2.0)
    assert p.degree == 3
    for r in (1, -2, 3j):
        assert abs(p.eval(r)) < 1e-12
    dp = p.derivative()
    z = 0.4 + 0.1j
    h = 1e-6
    fd = (p.eval(z + h) - p.eval(z - h)) / (2 * h)
    assert abs(dp.eval(z) - fd) < 1e-6


def test_find_roots_simple():
    targets = [1 + 0j, -2 + 0j, 3j]
    roots = find_roots(ComplexPoly.from_roots(targets))
    assert sorted(m for _, m in roots) == [1, 1, 1]
    for t in targets:
        assert min(abs(r - t) for r, _ in roots) < 1e-10


def test_find_roots_multiplicities():
    p = ComplexPoly.from_roots([1, 1, -2, -2, -2])
    roots = find_roots(p)
    assert [(round(r.real), m) for r, m in roots] == [(-2, 3), (1, 2)]
    assert abs(roots[0][0] + 2) < 1e-6 and abs(roots[1][0] - 1) < 1e-6


def test_find_roots_zero_deflation():
    roots = find_roots(ComplexPoly([0, 0, 0, 0, 0, 1]))
    assert roots == [(0j, 5)]


def test_find_roots_random_property():
    rng = random.Random(23)
    for _ in range(20):
        n = rng.randint(2, 7)
        targets = []
        while len(targets) < n:
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            if all(abs(z - t) > 0.3 for t in targets):
                targets.append(z)
        roots = find_roots(ComplexPoly.from_roots(targets))
        assert sum(m for _, m in roots) == n
        for t in targets:
            assert min(abs(r - t) for r, _ in roots) < 1e-7


def test_simple_poles_eval_and_pole_hit():
    f = simple_poles_map(ComplexPoly([0, 0, 1]), [(1 + 0j, 2, 0.5 + 0j)])
    z = 3 + 1j
    want = z * z + 0.5 / (z - 1) ** 2
    assert abs(eval_map(f, z) - want) < 1e-12
    assert pole_locations(f) == (1 + 0j,)
    with pytest.raises(PoleHit):
        eval_map(f, 1 + 0j)


def test_product_pole_eval():
    f = product_pole_map(ComplexPoly([-1, 0, 1]), 1e-3, [(0j, 2), (-1 + 0j, 1)])
    z = 0.5 + 0.25j
    want = z * z - 1 + 1e-3 / (z**2 * (z + 1))
    assert abs(eval_map(f, z) - want) < 1e-12
    assert pole_locations(f) == (0j, -1 + 0j)


def test_eval_map_derivative_matches_finite_difference():
    rng = random.Random(7)
    maps = [
        Q,
        simple_poles_map(Q, [(0j, 1, 1e-2 + 0j)]),
        product_pole_map(ComplexPoly([-1, 0, 1]), 1e-3 + 0j, [(0j, 2), (-1 + 0j, 1)]),
    ]
    for f in maps:
        for _ in range(10):
            z = complex(rng.uniform(0.3, 1.5), rng.uniform(0.3, 1.5))
            h = 1e-6
            fd = (eval_map(f, z + h) - eval_map(f, z - h)) / (2 * h)
            assert abs(eval_map_derivative(f, z) - fd) <= 1e-5 * (1 + abs(fd))


def test_as_quotient_agrees_with_eval():
    rng = random.Random(13)
    maps = [
        simple_poles_map(Q, [(0j, 1, 1e-2 + 0j), (2 + 0j, 2, -0.3 + 0.1j)]),
        product_pole_map(ComplexPoly([-1, 0, 1]), 1e-3 + 0j, [(0j, 3), (-1 + 0j, 2)]),
    ]
    for f in maps:
        quot = as_quotient(f)
        for _ in range(10):
            z = complex(rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0))
            want = eval_map(f, z)
            got = quot.numerator.eval(z) / quot.denominator.eval(z)
            assert abs(got - want) <= 1e-9 * (1 + abs(want))


def test_auto_radius_is_an_escape_radius():
    maps = [
        ComplexPoly([0, 0, 0, 1]),
        Q,
        simple_poles_map(Q, [(0j, 1, 1e-5 + 0j)]),
        simple_poles_map(ComplexPoly([0, 0, 0, 1]), [(0j, 3, -0.01 + 0j)]),
        product_pole_map(ComplexPoly([-1, 0, 1]), 1e-22 + 0j, [(0j, 7), (-1 + 0j, 5)]),
    ]
    for f in maps:
        radius = auto_radius(f)
        for k in range(64):
            z = radius * 1.000001 * complex(
                math.cos(2 * math.pi * k / 64), math.sin(2 * math.pi * k / 64)
            )
            assert abs(eval_map(f, z)) > abs(z)


def test_iterate_orbit_converges_to_superattracting_fixed_point():
    rec = iterate_orbit(ComplexPoly([0, 0, 0, 1]), 0.5 + 0j)
    assert isinstance(rec.outcome, ConvergedToCycle)
    assert rec.outcome.period == 1
    assert abs(rec.outcome.representative) < 1e-6


def test_iterate_orbit_basilica_two_cycle():
    rec = iterate_orbit(ComplexPoly([-1, 0, 1]), 0.01 + 0j)
    assert isinstance(rec.outcome, ConvergedToCycle)
    assert rec.outcome.period == 2


def test_iterate_orbit_escape_no_poles():
    rec = iterate_orbit(ComplexPoly([0, 0, 0, 1]), 2 + 0j)
    out = rec.outcome
    assert isinstance(out, Escaped)
    assert out.nearest_pole_index is None
    assert out.pole_distance == float("inf")
    assert out.escape_index >= 1


def test_iterate_orbit_starts_outside():
    f = ComplexPoly([0, 0, 1])
    rec = iterate_orbit(f, 100 + 0j)
    assert isinstance(rec.outcome, Escaped)
    assert rec.outcome.escape_index == 0


def test_iterate_orbit_pole_collision_counts_as_escape():
    f = simple_poles_map(ComplexPoly([0, 0, 0, 1]), [(0j, 3, -0.01 + 0j)])
    rec = iterate_orbit(f, 0j)
    out = rec.outcome
    assert isinstance(out, Escaped)
    assert out.escape_index == 1
    assert out.pole_distance == 0.0


def test_iterate_orbit_passage_tracks_closest_pole_approach():
    f = simple_poles_map(ComplexPoly([0, 0, 0, 1]), [(0j, 3, -0.01 + 0j)])
    # A critical point of f: z^6 = -0.01.
    c = (0.01 ** (1.0 / 6.0)) * complex(math.cos(math.pi / 6), math.sin(math.pi / 6))
    rec = iterate_orbit(f, c)
    out = rec.outcome
    assert isinstance(out, Escaped)
    want = min(abs(z) for z in rec.samples[: out.escape_index + 1])
    assert abs(out.pole_distance - want) < 1e-15
    assert abs(abs(out.passage_point) - want) < 1e-15


def test_iterate_orbit_undecided_on_parabolic():
    rec = iterate_orbit(ComplexPoly([0.25, 0, 1]), 0j, max_iter=50)
    assert isinstance(rec.outcome, Undecided)


def test_iterate_orbit_rejects_small_escape_radius():
    with pytest.raises(ValueError):
        iterate_orbit(ComplexPoly([0, 0, 1]), 0.5 + 0j, escape_radius=1.0)
