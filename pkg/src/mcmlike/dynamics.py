"""Core complex dynamics: polynomials, polynomial-plus-pole maps, roots, orbits.

Maps come in two flavours: plain polynomials (ascending coefficient lists)
and rational perturbations P(z) + poles, where the pole part is either a sum
of simple terms lambda_k/(z-a_k)^{d_k} or a single product term
lambda / prod (z-a_k)^{d_k}.  Everything downstream (classification,
verification, rendering) is built on the three primitives in this module:
``find_roots``, ``eval_map`` and ``iterate_orbit``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

EPS = 2.220446049250313e-16

# Relative tolerance for treating an iterate as having landed on a pole.
POLE_COLLISION_RTOL = 1e-13

# Residual acceptance for find_roots, relative to 1 + sum |coeffs|.
ROOT_RESIDUAL_RTOL = 1e-10

# Roots closer than this (scaled by local magnitude) are one cluster.
ROOT_CLUSTER_TOL = 1e-7


class PoleHit(Exception):
    """An evaluation point collided with a pole of the map."""

    def __init__(self, pole_index: int, location: complex, at: complex):
        super().__init__(f"evaluation hit pole {pole_index} at {location}")
        self.pole_index = pole_index
        self.location = location
        self.at = at


class NonConvergence(Exception):
    """The simultaneous root iteration exceeded its cap with bad residuals."""


# ---------------------------------------------------------------------------
# Polynomials


def _trim(coeffs: Sequence[complex]) -> Tuple[complex, ...]:
    cs = [complex(c) for c in coeffs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return tuple(cs) if cs else (0j,)


@dataclass
class ComplexPoly:
    """Polynomial with ascending complex coefficients: coeffs[k] * z**k."""

    coeffs: Tuple[complex, ...]

    def __post_init__(self):
        self.coeffs = _trim(self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1.0) -> "ComplexPoly":
        p = cls((complex(lead),))
        for r in roots:
            p = p * cls((-complex(r), 1.0))
        return p

    def eval(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> "ComplexPoly":
        if self.degree == 0:
            return ComplexPoly((0j,))
        return ComplexPoly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def __add__(self, other: "ComplexPoly") -> "ComplexPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return ComplexPoly(tuple(out))

    def __sub__(self, other: "ComplexPoly") -> "ComplexPoly":
        return self + (other * (-1.0))

    def __mul__(self, other: Union["ComplexPoly", complex, float, int]):
        if isinstance(other, ComplexPoly):
            out = [0j] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a == 0:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return ComplexPoly(tuple(out))
        return ComplexPoly(tuple(complex(other) * c for c in self.coeffs))

    __rmul__ = __mul__

    def compose(self, inner: "ComplexPoly") -> "ComplexPoly":
        """Return self(inner(z)) by Horner in polynomial arithmetic."""
        acc = ComplexPoly((self.coeffs[-1],))
        for c in reversed(self.coeffs[:-1]):
            acc = acc * inner + ComplexPoly((c,))
        return acc


# ---------------------------------------------------------------------------
# Rational perturbations


@dataclass
class PoleTerm:
    location: complex
    order: int
    coefficient: complex


@dataclass
class SimplePoles:
    terms: Tuple[PoleTerm, ...]


@dataclass
class ProductPole:
    coefficient: complex
    factors: Tuple[Tuple[complex, int], ...]  # (location, order)


@dataclass
class RationalMapExpr:
    base: ComplexPoly
    poles: Union[SimplePoles, ProductPole]


MapLike = Union[ComplexPoly, RationalMapExpr]


@dataclass
class PolyQuotient:
    """A numerator/denominator pair over a common denominator."""

    numerator: ComplexPoly
    denominator: ComplexPoly


def simple_poles_map(base: ComplexPoly, terms: Sequence[Tuple[complex, int, complex]]) -> RationalMapExpr:
    return RationalMapExpr(base, SimplePoles(tuple(PoleTerm(complex(a), int(d), complex(lam)) for a, d, lam in terms)))


def product_pole_map(base: ComplexPoly, lam: complex, factors: Sequence[Tuple[complex, int]]) -> RationalMapExpr:
    return RationalMapExpr(base, ProductPole(complex(lam), tuple((complex(a), int(d)) for a, d in factors)))


def pole_locations(f: MapLike) -> Tuple[complex, ...]:
    if isinstance(f, ComplexPoly):
        return ()
    if isinstance(f.poles, SimplePoles):
        return tuple(t.location for t in f.poles.terms)
    return tuple(a for a, _ in f.poles.factors)


def _ipow(z: complex, d: int) -> complex:
    acc = 1 + 0j
    for _ in range(d):
        acc *= z
    return acc


def eval_map(f: MapLike, z: complex) -> complex:
    """Evaluate a map at a point; raises PoleHit on pole collision."""
    if isinstance(f, ComplexPoly):
        return f.eval(z)
    val = f.base.eval(z)
    if isinstance(f.poles, SimplePoles):
        for k, t in enumerate(f.poles.terms):
            w = z - t.location
            if abs(w) <= POLE_COLLISION_RTOL * (1.0 + abs(t.location)):
                raise PoleHit(k, t.location, z)
            val += t.coefficient / _ipow(w, t.order)
        return val
    den = 1 + 0j
    for k, (a, d) in enumerate(f.poles.factors):
        w = z - a
        if abs(w) <= POLE_COLLISION_RTOL * (1.0 + abs(a)):
            raise PoleHit(k, a, z)
        den *= _ipow(w, d)
    return val + f.poles.coefficient / den


def derivative(f: MapLike):
    """Symbolic derivative.

    Polynomials map to polynomials; a simple-pole expression maps to another
    simple-pole expression (orders shifted up by one); a product-pole
    expression is returned as a PolyQuotient over the squared denominator.
    """
    if isinstance(f, ComplexPoly):
        return f.derivative()
    if isinstance(f.poles, SimplePoles):
        terms = tuple(
            PoleTerm(t.location, t.order + 1, -t.order * t.coefficient) for t in f.poles.terms
        )
        return RationalMapExpr(f.base.derivative(), SimplePoles(terms))
    den = ComplexPoly((1.0,))
    for a, d in f.poles.factors:
        den = den * ComplexPoly.from_roots([a] * d)
    num = f.base.derivative() * den * den - f.poles.coefficient * den.derivative()
    return PolyQuotient(num, den * den)


def eval_map_derivative(f: MapLike, z: complex) -> complex:
    """Evaluate f'(z) pointwise without building product polynomials."""
    if isinstance(f, ComplexPoly):
        return f.derivative().eval(z)
    val = f.base.derivative().eval(z)
    if isinstance(f.poles, SimplePoles):
        for k, t in enumerate(f.poles.terms):
            w = z - t.location
            if abs(w) <= POLE_COLLISION_RTOL * (1.0 + abs(t.location)):
                raise PoleHit(k, t.location, z)
            val -= t.order * t.coefficient / _ipow(w, t.order + 1)
        return val
    den = 1 + 0j
    logd = 0j
    for k, (a, d) in enumerate(f.poles.factors):
        w = z - a
        if abs(w) <= POLE_COLLISION_RTOL * (1.0 + abs(a)):
            raise PoleHit(k, a, z)
        den *= _ipow(w, d)
        logd += d / w
    return val - f.poles.coefficient * logd / den


def as_quotient(f: MapLike) -> PolyQuotient:
    """Rewrite a map as numerator/denominator over the common denominator."""
    if isinstance(f, ComplexPoly):
        return PolyQuotient(f, ComplexPoly((1.0,)))
    if isinstance(f.poles, SimplePoles):
        den = ComplexPoly((1.0,))
        for t in f.poles.terms:
            den = den * ComplexPoly.from_roots([t.location] * t.order)
        num = f.base * den
        for k, t in enumerate(f.poles.terms):
            rest = ComplexPoly((t.coefficient,))
            for j, u in enumerate(f.poles.terms):
                if j != k:
                    rest = rest * ComplexPoly.from_roots([u.location] * u.order)
            num = num + rest
        return PolyQuotient(num, den)
    den = ComplexPoly((1.0,))
    for a, d in f.poles.factors:
        den = den * ComplexPoly.from_roots([a] * d)
    return PolyQuotient(f.base * den + ComplexPoly((f.poles.coefficient,)), den)


def auto_radius(f: MapLike) -> float:
    """Escape radius valid for the supported map shapes.

    max(2, 1 + sum |base coefficients| + sum |pole coefficients|), with a
    Cauchy-style term so that non-monic leading coefficients below 1 still
    yield a genuine escape radius.
    """
    if isinstance(f, ComplexPoly):
        base, lam_sum = f, 0.0
    else:
        base = f.base
        if isinstance(f.poles, SimplePoles):
            lam_sum = sum(abs(t.coefficient) for t in f.poles.terms)
        else:
            lam_sum = abs(f.poles.coefficient)
    cs = base.coeffs
    total = sum(abs(c) for c in cs)
    lead = abs(cs[-1])
    cauchy = 1.0 + (1.0 + (total - lead) + lam_sum) / lead if lead > 0 else 2.0
    return max(2.0, 1.0 + total + lam_sum, cauchy)


# ---------------------------------------------------------------------------
# Root finding


def _coeff_scale(coeffs: Sequence[complex], r: float) -> float:
    s, rk = 0.0, 1.0
    for c in coeffs:
        s += abs(c) * rk
        rk *= r
    return s


def _newton_polish(coeffs: Sequence[complex], dcoeffs: Sequence[complex], z: complex, steps: int = 4) -> complex:
    for _ in range(steps):
        val = 0j
        for c in reversed(coeffs):
            val = val * z + c
        dval = 0j
        for c in reversed(dcoeffs):
            dval = dval * z + c
        if dval == 0:
            break
        step = val / dval
        if not (math.isfinite(step.real) and math.isfinite(step.imag)):
            break
        z = z - step
    return z


def _derivative_coeffs(coeffs: Sequence[complex]) -> Tuple[complex, ...]:
    return tuple(k * c for k, c in enumerate(coeffs) if k > 0)


def find_roots(poly: ComplexPoly, max_iter: int = 500, cluster_tol: float = ROOT_CLUSTER_TOL):
    """All roots of a polynomial with multiplicities.

    Aberth-Ehrlich simultaneous iteration from a perturbed initial ring,
    followed by Newton polishing and two clustering passes: a plain
    proximity pass at ``cluster_tol`` and a certified pass that merges the
    floating-point scatter of genuine multiple roots (the scatter of an
    m-fold root scales like eps**(1/m), far beyond any fixed tolerance).
    Merged roots are re-polished on the (m-1)-th derivative, where the
    root is simple again.

    Returns a list of (root, multiplicity) sorted by (re, im); the
    multiplicities always sum to the degree.
    """
    coeffs = list(poly.coeffs)
    n = len(coeffs) - 1
    if n <= 0:
        return []

    # Exact zero roots deflate symbolically (common for derivative polys).
    zero_mult = 0
    while zero_mult < n and coeffs[0] == 0:
        coeffs.pop(0)
        zero_mult += 1
    results = []
    if zero_mult:
        results.append((0j, zero_mult))
    m = len(coeffs) - 1
    if m == 0:
        return results

    if m == 1:
        roots = [-coeffs[0] / coeffs[1]]
    else:
        rng = random.Random(0xA8E27 + m)
        r0 = abs(coeffs[0] / coeffs[-1]) ** (1.0 / m)
        r0 = max(r0, 1e-12)
        roots = []
        for j in range(m):
            theta = 2.0 * math.pi * (j + 0.3 * rng.random()) / m + 0.4337
            rad = r0 * (1.0 + 0.12 * (rng.random() - 0.5))
            roots.append(rad * complex(math.cos(theta), math.sin(theta)))
        dcoeffs = _derivative_coeffs(coeffs)
        for _ in range(max_iter):
            max_step = 0.0
            for k in range(m):
                z = roots[k]
                val = 0j
                for c in reversed(coeffs):
                    val = val * z + c
                if val == 0:
                    continue
                dval = 0j
                for c in reversed(dcoeffs):
                    dval = dval * z + c
                if dval == 0:
                    roots[k] = z + 1e-8 * (1 + abs(z))
                    max_step = 1.0
                    continue
                ratio = val / dval
                acc = 0j
                for j in range(m):
                    if j != k:
                        dz = z - roots[j]
                        if dz == 0:
                            dz = 1e-14 * (1 + abs(z))
                        acc += 1.0 / dz
                denom = 1.0 - ratio * acc
                w = ratio if denom == 0 else ratio / denom
                if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                    w = 0j
                roots[k] = z - w
                max_step = max(max_step, abs(w) / (1.0 + abs(roots[k])))
            if max_step < 1e-14:
                break

    dcoeffs = _derivative_coeffs(coeffs)
    roots = [_newton_polish(coeffs, dcoeffs, z) for z in roots]

    res_tol = ROOT_RESIDUAL_RTOL * (1.0 + sum(abs(c) for c in poly.coeffs))
    worst = 0.0
    for z in roots:
        val = 0j
        for c in reversed(coeffs):
            val = val * z + c
        worst = max(worst, abs(val))
    if worst > res_tol:
        raise NonConvergence(f"root residual {worst:.3e} exceeds {res_tol:.3e}")

    clusters = _cluster_roots(roots, coeffs, cluster_tol)
    results.extend(clusters)
    results.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return results


def _cluster_roots(roots, coeffs, cluster_tol):
    # Pass 1: plain proximity merge.
    clusters = []  # (centroid, multiplicity)
    for z in sorted(roots, key=lambda w: (w.real, w.imag)):
        for i, (c, m) in enumerate(clusters):
            if abs(z - c) <= cluster_tol * (1.0 + abs(c)):
                clusters[i] = ((c * m + z) / (m + 1), m + 1)
                break
        else:
            clusters.append((z, 1))

    # Pass 2: certified multiple-root merge.  A genuine m-fold root can only
    # be located to (noise/|p^(m)/m!|)^(1/m); merge pairs inside that radius.
    n = len(coeffs) - 1
    changed = True
    while changed and len(clusters) > 1:
        changed = False
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                d = abs(clusters[i][0] - clusters[j][0])
                if best is None or d < best[0]:
                    best = (d, i, j)
        d, i, j = best
        (ci, mi), (cj, mj) = clusters[i], clusters[j]
        m = mi + mj
        if m > n:
            break
        c = (ci * mi + cj * mj) / m
        noise = 4.0 * n * EPS * max(_coeff_scale(coeffs, abs(c)), 1e-300)
        dm = list(coeffs)
        for _ in range(m):
            dm = list(_derivative_coeffs(dm))
        am = 0j
        for cc in reversed(dm):
            am = am * c + cc
        am = abs(am) / math.factorial(m)
        if am <= 0:
            rho = float("inf")
        else:
            rho = 8.0 * (noise / am) ** (1.0 / m)
        if d <= rho and rho <= 1e-2 * (1.0 + abs(c)):
            dm1 = list(coeffs)
            for _ in range(m - 1):
                dm1 = list(_derivative_coeffs(dm1))
            c = _newton_polish(dm1, _derivative_coeffs(dm1), c, steps=40)
            new = [cl for k, cl in enumerate(clusters) if k not in (i, j)]
            new.append((c, m))
            clusters = new
            changed = True
    return clusters


# ---------------------------------------------------------------------------
# Orbits


@dataclass
class Escaped:
    """Orbit left the escape radius.

    ``last_bounded`` is the final iterate inside the radius; the
    ``passage_point`` is the pre-escape iterate closest to any pole (the
    operational trap-door passage; later iterates win ties), with
    ``nearest_pole_index``/``pole_distance`` describing that approach.
    Maps without poles report the last bounded iterate and infinite
    distance.
    """

    escape_index: int
    last_bounded: complex
    passage_point: complex
    nearest_pole_index: Optional[int]
    pole_distance: float


@dataclass
class ConvergedToCycle:
    period: int
    representative: complex
    convergence_index: int


@dataclass
class Undecided:
    pass


@dataclass
class OrbitRecord:
    start: complex
    samples: list = field(default_factory=list)
    outcome: object = None


# Cycle revisitation is only checked after this many iterates.
CYCLE_TRANSIENT = 20
# Largest revisitation period scanned for (bounds the O(k * window) cost).
PERIOD_WINDOW = 256


def iterate_orbit(
    f: MapLike,
    z0: complex,
    max_iter: int = 512,
    escape_radius: Optional[float] = None,
    cycle_tol: float = 1e-9,
) -> OrbitRecord:
    """Iterate a map and classify the orbit.

    Outcomes: Escaped (first index beyond the escape radius, trap-door
    passage data), ConvergedToCycle (revisitation within cycle_tol after a
    short transient; smallest period wins), or Undecided at max_iter.
    A PoleHit mid-orbit counts as an escape whose passage point is the
    colliding iterate.
    """
    rauto = auto_radius(f)
    if escape_radius is None:
        escape_radius = rauto
    elif escape_radius < rauto:
        raise ValueError(f"escape_radius {escape_radius} below auto radius {rauto}")

    poles = pole_locations(f)
    rec = OrbitRecord(start=z0, samples=[z0])

    def approach(z):
        if not poles:
            return None, float("inf")
        best_k, best_d = 0, abs(z - poles[0])
        for k in range(1, len(poles)):
            d = abs(z - poles[k])
            if d < best_d:
                best_k, best_d = k, d
        return best_k, best_d

    pk, pd = approach(z0)
    passage, passage_pole, passage_dist = z0, pk, pd

    z = z0
    if abs(z) > escape_radius:
        rec.outcome = Escaped(0, z0, z0, pk, pd)
        return rec

    for k in range(1, max_iter + 1):
        try:
            z_new = eval_map(f, z)
        except PoleHit as hit:
            rec.outcome = Escaped(k, z, z, hit.pole_index, abs(z - hit.location))
            return rec
        if not (math.isfinite(z_new.real) and math.isfinite(z_new.imag)):
            rec.outcome = Escaped(k, z, passage, passage_pole, passage_dist)
            return rec
        rec.samples.append(z_new)
        if abs(z_new) > escape_radius:
            if poles:
                rec.outcome = Escaped(k, z, passage, passage_pole, passage_dist)
            else:
                rec.outcome = Escaped(k, z, z, None, float("inf"))
            return rec
        pk, pd = approach(z_new)
        if poles and pd <= passage_dist:
            passage, passage_pole, passage_dist = z_new, pk, pd
        z = z_new
        if k >= CYCLE_TRANSIENT:
            lo = max(CYCLE_TRANSIENT, k - PERIOD_WINDOW)
            for j in range(k - 1, lo - 1, -1):
                if abs(z - rec.samples[j]) < cycle_tol:
                    rec.outcome = ConvergedToCycle(k - j, rec.samples[j], j)
                    return rec
    rec.outcome = Undecided()
    return rec
