"""Numerical family verification against expected models."""

import math
import random

from fractions import Fraction

import pytest

from mcmlike.arith import PoleData
from mcmlike.dynamics import ComplexPoly, eval_map_derivative
from mcmlike.model import classify_polynomial, from_abstract
from mcmlike.model_io import load_model
from mcmlike.verify import (
    ConvergesToBoundedCycle,
    EscapesViaTrapDoor,
    InBasinOfInfinityDirectly,
    critical_census,
    free_critical_polynomial,
    map_degree,
    verify_family,
)

from conftest import FIXTURES


def load_family(name):
    mf = load_model(FIXTURES / f"{name}.json")
    model = classify_polynomial(mf.polynomial)
    return mf.build_map(), model, mf.pole_data, mf.verify_params()


def test_verify_q_family():
    f, model, pd, params = load_family("q_family")
    verdict = verify_family(f, model, pd, params)
    assert verdict.passed and verdict.condition_holds
    assert verdict.note == ""
    assert verdict.condition_report.per_cycle[0].product == Fraction(3, 4)
    assert verdict.census.map_degree == 4
    assert verdict.census.nu == 6
    assert len(verdict.census.free_criticals) == 4
    assert verdict.census.infinity_multiplicity == 2
    entries = verdict.orbit_report.entries
    assert all(isinstance(e.classification, EscapesViaTrapDoor) for e in entries)
    assert all(e.classification.passage_distance <= 0.1 for e in entries)
    assert all(e.t_c is not None for e in entries)
    assert not verdict.untouched  # the only cycle is touched


def test_verify_f_family_pole_ball():
    f, model, pd, params = load_family("f_cubic")
    assert params.pole_ball == 0.25
    verdict = verify_family(f, model, pd, params)
    assert verdict.passed
    entries = verdict.orbit_report.entries
    assert len(entries) == 6
    # All six free criticals sit on |z| = |lambda|**(1/6) and pass the pole
    # at distance exactly 2*sqrt(|lambda|).
    for e in entries:
        assert abs(abs(e.point) - 0.01 ** (1.0 / 6.0)) <= 1e-9
        assert isinstance(e.classification, EscapesViaTrapDoor)
        assert abs(e.classification.passage_distance - 0.2) <= 1e-9
    # The same family fails at the tighter default pole ball.
    tight = load_model(FIXTURES / "f_cubic.json").verify_params()
    tight.pole_ball = 0.1
    verdict2 = verify_family(f, model, pd, tight)
    assert not verdict2.critical_orbits_ok
    assert all(
        isinstance(e.classification, InBasinOfInfinityDirectly)
        for e in verdict2.orbit_report.entries
    )
    passages = [e.record.outcome.pole_distance for e in verdict2.orbit_report.entries]
    assert abs(min(passages) - 0.2) <= 1e-9


def test_verify_g_family():
    f, model, pd, params = load_family("g_cubic")
    verdict = verify_family(f, model, pd, params)
    assert verdict.passed and verdict.condition_holds
    assert verdict.census.nu == 10 and verdict.census.map_degree == 6
    entries = verdict.orbit_report.entries
    assert len(entries) == 6
    assert all(isinstance(e.classification, EscapesViaTrapDoor) for e in entries)
    assert max(e.classification.passage_distance for e in entries) <= 0.1


def test_verify_h_family():
    f, model, pd, params = load_family("h_multipole")
    verdict = verify_family(f, model, pd, params)
    assert verdict.passed and verdict.condition_holds
    assert verdict.condition_report.per_cycle[0].product == Fraction(27, 35)
    assert verdict.census.map_degree == 14
    assert verdict.census.nu == 26
    assert len(verdict.census.free_criticals) == 15
    assert verdict.orbit_report.pole_domains == ((1, 0), (1, 1))
    assert all(
        isinstance(e.classification, EscapesViaTrapDoor)
        for e in verdict.orbit_report.entries
    )


def test_verify_r_family_untouched_cycle():
    f, model, pd, params = load_family("r_milnor")
    verdict = verify_family(f, model, pd, params)
    assert verdict.passed and verdict.condition_holds
    entries = verdict.orbit_report.entries
    doors = [e for e in entries if isinstance(e.classification, EscapesViaTrapDoor)]
    bounded = [e for e in entries if isinstance(e.classification, ConvergesToBoundedCycle)]
    assert len(doors) == 5 and len(bounded) == 1
    assert all(e.classification.pole_index == 0 for e in doors)
    assert bounded[0].classification.cycle == 2
    assert len(verdict.untouched) == 1
    chk = verdict.untouched[0]
    assert chk.cycle == 2 and chk.period == 1 and chk.persisted
    assert abs(chk.found - math.sqrt(2) * 1j) <= 1e-6
    assert chk.multiplier < 1e-3


def test_verify_nd2_not_expected_to_pass():
    f, model, pd, params = load_family("nd2_family")
    verdict = verify_family(f, model, pd, params)
    assert verdict.checks_passed
    assert not verdict.condition_holds
    assert verdict.note == "NotExpectedToPass"


def test_verify_requires_concrete_cycles():
    f, _, pd, params = load_family("q_family")
    abstract = from_abstract(3, [(2, (2, 2))])
    with pytest.raises(ValueError):
        verify_family(f, abstract, pd, params)


def test_verify_degree_mismatch_detected():
    f, model, _, params = load_family("q_family")
    wrong_pd = PoleData.from_dict({(1, 0): 2})
    verdict = verify_family(f, model, wrong_pd, params)
    assert not verdict.degree_ok and not verdict.checks_passed
    assert any("degree" in d for d in verdict.details)


def test_map_degree_and_census():
    f, _, _, _ = load_family("q_family")
    assert map_degree(f) == 4
    census = critical_census(f)
    assert census.nu == 2 * census.map_degree - 2
    assert sum(m for _, m in census.pole_criticals) == 0  # simple pole: d - 1 = 0
    poly = ComplexPoly([1, 0, -3, 2])
    assert map_degree(poly) == 3


@pytest.mark.parametrize("name", ["q_family", "f_cubic", "h_multipole"])
def test_free_critical_polynomial_identity(name):
    # N(z) = f'(z) * prod (z - a_k)**(d_k + 1) for both pole layouts.
    f, _, _, _ = load_family(name)
    if hasattr(f.poles, "terms"):
        factors = [(t.location, t.order) for t in f.poles.terms]
    else:
        factors = list(f.poles.factors)
    numer = free_critical_polynomial(f)
    rng = random.Random(99)
    for _ in range(12):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if any(abs(z - a) < 0.3 for a, _ in factors):
            continue
        full = 1 + 0j
        for a, d in factors:
            full *= (z - a) ** (d + 1)
        lhs = numer.eval(z)
        rhs = eval_map_derivative(f, z) * full
        assert abs(lhs - rhs) <= 1e-7 * (1.0 + abs(rhs))
