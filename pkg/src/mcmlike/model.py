"""Hyperbolic postcritically finite polynomial models.

``classify_polynomial`` finds the super-attracting cycles of a polynomial by
following its critical orbits, assigns each critical point to a cycle (with
a preperiod), and records the local degrees n_{i,j} of the periodic Fatou
domains.  ``normalize_type`` reduces a polynomial-plus-pole-data pair to a
canonical representative (monic, centered, residual rotations resolved), so
two pairs are affinely equivalent iff their normal forms compare equal.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .arith import PoleData
from .dynamics import (
    ComplexPoly,
    ConvergedToCycle,
    Escaped,
    Undecided,
    auto_radius,
    find_roots,
    iterate_orbit,
)


class NotHpcfp(Exception):
    """A critical orbit neither escaped nor converged to an attracting cycle."""


class MultiplierNotZero(Exception):
    """A detected bounded cycle is attracting but not super-attracting."""


class ModelWarning(UserWarning):
    """Non-fatal model irregularity (e.g. a strictly preperiodic critical)."""


# |multiplier| below this counts as super-attracting.
SUPERATTRACTING_TOL = 1e-6


@dataclass
class CycleSpec:
    """One super-attracting cycle; points are ordered along the orbit."""

    index: int  # 1-based
    period: int
    degrees: Tuple[int, ...]
    points: Optional[Tuple[complex, ...]] = None
    multiplier: float = 0.0


@dataclass
class CriticalAssignment:
    point: complex
    multiplicity: int
    cycle: Optional[int]  # None when the orbit escapes
    phase: Optional[int]
    preperiod: Optional[int]


@dataclass
class HpcfpModel:
    degree: int
    cycles: Tuple[CycleSpec, ...]
    polynomial: Optional[ComplexPoly] = None
    criticals: Tuple[CriticalAssignment, ...] = ()
    notes: Tuple[str, ...] = ()

    @property
    def is_hpcfp(self) -> bool:
        if not self.cycles:
            return False
        return all(c.cycle is not None for c in self.criticals)


def from_abstract(degree: int, cycles: Sequence[Tuple[int, Sequence[int]]]) -> HpcfpModel:
    """Build a model from combinatorial data alone (no polynomial).

    Each cycle is (period, degrees); degrees must be >= 1 with at least one
    >= 2 per cycle, and the total critical count must fit Riemann-Hurwitz.
    """
    if degree < 2:
        raise ValueError("degree must be >= 2")
    specs = []
    used = 0
    for pos, (period, degrees) in enumerate(cycles, start=1):
        degrees = tuple(int(d) for d in degrees)
        if period < 1 or len(degrees) != period:
            raise ValueError(f"cycle {pos}: need exactly {period} degrees")
        if any(d < 1 for d in degrees):
            raise ValueError(f"cycle {pos}: degrees must be >= 1")
        if max(degrees) < 2:
            raise ValueError(f"cycle {pos}: a super-attracting cycle needs some degree >= 2")
        used += sum(d - 1 for d in degrees)
        specs.append(CycleSpec(pos, period, degrees))
    if used > degree - 1:
        raise ValueError(f"cycle degrees need {used} critical points but the polynomial has {degree - 1}")
    return HpcfpModel(degree=degree, cycles=tuple(specs))


def _orbit_points(p: ComplexPoly, z: complex, period: int) -> List[complex]:
    pts = [z]
    for _ in range(period - 1):
        pts.append(p.eval(pts[-1]))
    return pts


def _refine_cycle(p: ComplexPoly, dp: ComplexPoly, z: complex, period: int) -> complex:
    """Newton on P^period(z) - z; well conditioned near super-attracting cycles."""
    for _ in range(60):
        w, deriv = z, 1 + 0j
        for _ in range(period):
            deriv *= dp.eval(w)
            w = p.eval(w)
        denom = deriv - 1.0
        if abs(denom) < 1e-12:
            break
        step = (w - z) / denom
        z = z - step
        if abs(step) <= 1e-13 * (1.0 + abs(z)):
            break
    return z


def _reduce_period(p: ComplexPoly, z: complex, period: int) -> int:
    for q in range(1, period):
        if period % q == 0:
            w = z
            for _ in range(q):
                w = p.eval(w)
            if abs(w - z) <= 1e-8 * (1.0 + abs(z)):
                return q
    return period


def classify_polynomial(
    p: ComplexPoly,
    max_iter: int = 2000,
    tol: float = 1e-9,
    match_tol: float = 1e-6,
) -> HpcfpModel:
    """Classify a polynomial through its critical orbits.

    Every critical point is iterated until it escapes or revisits (within
    ``tol``) a previous iterate; bounded cycles are Newton-refined and must
    be super-attracting.  Degrees n_{i,j} count 1 plus the multiplicities of
    the critical points sitting on the cycle point itself (preperiod 0).

    Raises NotHpcfp when an orbit stays undecided, MultiplierNotZero when a
    bounded cycle is merely attracting.  Critical points that reach a cycle
    only after a positive preperiod trigger a ModelWarning: postcritical
    finiteness is certified numerically, so a landing orbit and a converging
    one cannot be told apart at finite precision.
    """
    n = p.degree
    if n < 2:
        raise ValueError("degree must be >= 2")
    dp = p.derivative()
    crits = find_roots(dp)
    radius = auto_radius(p)

    pool: List[CycleSpec] = []
    pool_points: List[List[complex]] = []
    records = []
    notes: List[str] = []

    for c, mult in crits:
        orbit = iterate_orbit(p, c, max_iter=max_iter, escape_radius=radius, cycle_tol=tol)
        if isinstance(orbit.outcome, Undecided):
            raise NotHpcfp(f"critical orbit from {c} undecided after {max_iter} iterations")
        if isinstance(orbit.outcome, Escaped):
            records.append((c, mult, orbit, None))
            continue
        out: ConvergedToCycle = orbit.outcome
        z = _refine_cycle(p, dp, out.representative, out.period)
        period = _reduce_period(p, z, out.period)
        if period != out.period:
            z = _refine_cycle(p, dp, z, period)
        pts = _orbit_points(p, z, period)
        lam = 1 + 0j
        for x in pts:
            lam *= dp.eval(x)
        if abs(lam) >= SUPERATTRACTING_TOL:
            raise MultiplierNotZero(
                f"cycle through {z} has multiplier modulus {abs(lam):.3e}"
            )
        cid = None
        for k, existing in enumerate(pool_points):
            if len(existing) != period:
                continue
            d0 = min(abs(pts[0] - y) for y in existing)
            if d0 <= 1e-6 * (1.0 + abs(pts[0])):
                cid = k
                break
        if cid is None:
            pool.append(CycleSpec(0, period, (), tuple(pts), abs(lam)))
            pool_points.append(pts)
            cid = len(pool) - 1
        records.append((c, mult, orbit, cid))

    # Assign criticals to phases in raw orbit order first; the canonical
    # rotation below needs the degrees.
    raw = []
    degree_count = [[0] * len(pts) for pts in pool_points]
    for c, mult, orbit, cid in records:
        if cid is None:
            raw.append((c, mult, None, None, None))
            continue
        pts = pool_points[cid]
        period = len(pts)
        pre, phase = None, None
        for k, zk in enumerate(orbit.samples):
            hits = [j for j in range(period) if abs(zk - pts[j]) <= match_tol * (1.0 + abs(pts[j]))]
            if hits:
                pre, phase = k, hits[0]
                break
        if pre is None:
            # Converged without any sample landing on the cycle within
            # match_tol; treat as preperiodic at the convergence index.
            pre = orbit.outcome.convergence_index
            phase = min(range(period), key=lambda j: abs(orbit.samples[-1] - pts[j]))
            notes.append(f"critical {c} converged to cycle without landing inside match_tol")
            warnings.warn(notes[-1], ModelWarning)
        if pre > 0:
            notes.append(f"critical {c} is strictly preperiodic (preperiod {pre})")
            warnings.warn(notes[-1], ModelWarning)
        else:
            degree_count[cid][phase] += mult
        raw.append((c, mult, cid, phase, pre))

    # Canonical labeling: phase 0 is the phase of maximal degree (ties by
    # lexicographically least point); cycles ordered by (period, phase-0
    # point).  This matches the labeling used for pole data throughout.
    rotated = []
    rotations = []
    for spec, pts, counts in zip(pool, pool_points, degree_count):
        per = len(pts)
        r = min(
            range(per),
            key=lambda j: (-(1 + counts[j]), pts[j].real, pts[j].imag),
        )
        rotations.append(r)
        rpts = tuple(pts[(r + j) % per] for j in range(per))
        rdeg = tuple(1 + counts[(r + j) % per] for j in range(per))
        rotated.append((spec.period, rpts, rdeg, spec.multiplier))
    order = sorted(
        range(len(rotated)),
        key=lambda k: (rotated[k][0], rotated[k][1][0].real, rotated[k][1][0].imag),
    )
    remap = {old: new for new, old in enumerate(order)}

    assignments = []
    for c, mult, cid, phase, pre in raw:
        if cid is None:
            assignments.append(CriticalAssignment(c, mult, None, None, None))
            continue
        per = rotated[cid][0]
        assignments.append(
            CriticalAssignment(c, mult, remap[cid] + 1, (phase - rotations[cid]) % per, pre)
        )

    if not pool:
        raise NotHpcfp("every critical orbit escapes; no bounded cycle (N=0)")

    specs = []
    for new, old in enumerate(order, start=1):
        period, pts, degrees, lam = rotated[old]
        specs.append(CycleSpec(new, period, degrees, pts, lam))

    return HpcfpModel(
        degree=n,
        cycles=tuple(specs),
        polynomial=p,
        criticals=tuple(assignments),
        notes=tuple(notes),
    )


def riemann_hurwitz_check(model: HpcfpModel) -> bool:
    """n - 1 must equal the total critical multiplicity inside periodic domains."""
    return model.degree - 1 == sum(
        sum(d - 1 for d in cyc.degrees) for cyc in model.cycles
    )


# ---------------------------------------------------------------------------
# Normal forms


@dataclass(frozen=True)
class NormalizedType:
    """Canonical representative of a polynomial-plus-pole-data type."""

    coeffs: Tuple[complex, ...]
    cycles: Tuple[Tuple[int, Tuple[int, ...]], ...]  # (period, degrees)
    pole_entries: Tuple[Tuple[int, int, int], ...]  # (cycle, phase, d)
    cycle_points: Tuple[Tuple[complex, ...], ...]


def _fuzzy_cmp(u: Sequence[float], v: Sequence[float], tol: float = 1e-9) -> int:
    for x, y in zip(u, v):
        if abs(x - y) <= tol * (1.0 + max(abs(x), abs(y))):
            continue
        return -1 if x < y else 1
    return 0


def _candidate_structure(model: HpcfpModel, a: complex, b: complex, pole_data: Optional[PoleData]):
    txp = []
    for cyc in model.cycles:
        txp.append(tuple((x - b) / a for x in cyc.points))
    rot = []
    for cyc, pts in zip(model.cycles, txp):
        r = min(
            range(len(pts)),
            key=lambda j: (-cyc.degrees[j], pts[j].real, pts[j].imag),
        )
        rot.append(r)
    order = sorted(
        range(len(model.cycles)),
        key=lambda k: (
            model.cycles[k].period,
            txp[k][rot[k]].real,
            txp[k][rot[k]].imag,
        ),
    )
    cycles_out = []
    points_out = []
    for old in order:
        cyc = model.cycles[old]
        r = rot[old]
        degrees = tuple(cyc.degrees[(r + j) % cyc.period] for j in range(cyc.period))
        pts = tuple(txp[old][(r + j) % cyc.period] for j in range(cyc.period))
        cycles_out.append((cyc.period, degrees))
        points_out.append(pts)
    entries_out = []
    if pole_data is not None:
        new_of_old = {old: new for new, old in enumerate(order)}
        for (i, j), d in pole_data.entries:
            old = i - 1
            p = model.cycles[old].period
            entries_out.append((new_of_old[old] + 1, (j - rot[old]) % p, d))
    return tuple(cycles_out), tuple(sorted(entries_out)), tuple(points_out)


def normalize_type(
    p: ComplexPoly,
    pole_data: Optional[PoleData] = None,
    model: Optional[HpcfpModel] = None,
) -> NormalizedType:
    """Canonical form of (polynomial, pole data) under affine conjugacy.

    Conjugates to a monic centered representative; the residual symmetry
    z -> w z with w**(n-1) = 1 is resolved by the lexicographically least
    coefficient vector, with exact combinatorial data (cycle labels and
    transported pole entries) breaking coefficient ties, so symmetric
    polynomials still normalize deterministically.
    """
    if model is None:
        model = classify_polynomial(p)
    if not model.cycles:
        raise NotHpcfp("no bounded super-attracting cycle; nothing to normalize")
    if pole_data is not None:
        pole_data.validate(model)
    n = p.degree
    cn = p.coeffs[-1]
    cn1 = p.coeffs[-2]
    b = -cn1 / (n * cn)
    a0 = (1.0 / cn) ** (1.0 / (n - 1))

    best = None
    for k in range(n - 1):
        a = a0 * cmath.exp(2j * math.pi * k / (n - 1)) if k else a0
        inner = ComplexPoly((b, a))
        comp = p.compose(inner)
        gc = list(comp.coeffs)
        gc[0] = gc[0] - b
        gc = [c / a for c in gc]
        # The construction guarantees monic/centered up to roundoff.
        gc[-1] = 1.0 + 0j
        if n >= 2:
            gc[-2] = 0j
        flat = []
        for c in gc:
            flat.append(c.real)
            flat.append(c.imag)
        cycles_out, entries_out, points_out = _candidate_structure(model, a, b, pole_data)
        cand = (flat, (cycles_out, entries_out), tuple(gc), points_out)
        if best is None:
            best = cand
            continue
        cmp = _fuzzy_cmp(cand[0], best[0])
        if cmp < 0 or (cmp == 0 and cand[1] < best[1]):
            best = cand
    return NormalizedType(
        coeffs=best[2],
        cycles=best[1][0],
        pole_entries=best[1][1],
        cycle_points=best[3],
    )


def types_equal(t1: NormalizedType, t2: NormalizedType, coeff_tol: float = 1e-8) -> bool:
    """Equality of normal forms: coefficients within tolerance, combinatorics exact."""
    if len(t1.coeffs) != len(t2.coeffs):
        return False
    if any(abs(x - y) > coeff_tol for x, y in zip(t1.coeffs, t2.coeffs)):
        return False
    return t1.cycles == t2.cycles and t1.pole_entries == t2.pole_entries
