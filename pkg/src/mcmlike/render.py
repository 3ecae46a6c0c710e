"""Orbit-classification rendering of dynamical planes.

Pixels are classified by vectorized iteration with the same escape and
collision semantics as ``dynamics.iterate_orbit``: Escaped(k) at the first
iterate beyond the escape radius (index 0 for seeds already outside, with
pole collisions surfacing as non-finite iterates), Basin(id, phase) on
capture within capture_tol of a supplied attractor point, Undecided at
max_iter.  Row bands are classified independently, so parallel and serial
runs produce bit-identical grids.

Output formats: binary PPM (P6) with a frozen palette, and a plain text
matrix of class tags (``E<k>``, ``B<id>.<phase>``, ``U``).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .dynamics import (
    ComplexPoly,
    MapLike,
    ProductPole,
    SimplePoles,
    auto_radius,
)

KIND_UNDECIDED = 0
KIND_ESCAPED = 1
KIND_BASIN = 2

# Frozen basin palette; Basin(id, phase) uses entry (2*id + phase) % 8.
PALETTE8 = (
    (200, 60, 40),
    (245, 130, 50),
    (250, 200, 70),
    (90, 170, 90),
    (60, 150, 200),
    (110, 90, 190),
    (190, 90, 160),
    (140, 140, 140),
)


@dataclass
class RenderSpec:
    map: MapLike
    width: int
    height: int
    center: complex = 0j
    half_width: float = 1.5
    max_iter: int = 512
    escape_radius: Optional[float] = None
    attractors: Optional[Sequence[Tuple[Sequence[complex], int]]] = None
    capture_tol: float = 1e-6

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")

    @property
    def pitch(self) -> float:
        return 2.0 * self.half_width / self.width


@dataclass
class ClassGrid:
    width: int
    height: int
    center: complex
    pitch: float
    kind: np.ndarray  # (h, w) uint8
    iters: np.ndarray  # (h, w) int32, escape index where kind == ESCAPED
    basin_id: np.ndarray  # (h, w) int16, -1 elsewhere
    basin_phase: np.ndarray  # (h, w) int16, -1 elsewhere

    def tag(self, ix: int, iy: int) -> str:
        k = self.kind[iy, ix]
        if k == KIND_ESCAPED:
            return f"E{int(self.iters[iy, ix])}"
        if k == KIND_BASIN:
            return f"B{int(self.basin_id[iy, ix])}.{int(self.basin_phase[iy, ix])}"
        return "U"


@dataclass
class RadialProfile:
    angle: float
    radii: np.ndarray
    kind: np.ndarray
    iters: np.ndarray
    alternations: int

    @property
    def samples(self) -> List[Tuple[float, str]]:
        out = []
        for r, k, it in zip(self.radii, self.kind, self.iters):
            if k == KIND_ESCAPED:
                out.append((float(r), f"E{int(it)}"))
            elif k == KIND_BASIN:
                out.append((float(r), "B"))
            else:
                out.append((float(r), "U"))
        return out


def _eval_vec(f: MapLike, z: np.ndarray) -> np.ndarray:
    """Vectorized map evaluation mirroring eval_map's operation order."""
    if isinstance(f, ComplexPoly):
        coeffs = f.coeffs
    else:
        coeffs = f.base.coeffs
    acc = np.full_like(z, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * z + c
    if isinstance(f, ComplexPoly):
        return acc
    if isinstance(f.poles, SimplePoles):
        for t in f.poles.terms:
            w = z - t.location
            pw = np.ones_like(z)
            for _ in range(t.order):
                pw = pw * w
            acc = acc + t.coefficient / pw
        return acc
    den = np.ones_like(z)
    for a, d in f.poles.factors:
        w = z - a
        for _ in range(d):
            den = den * w
    return acc + f.poles.coefficient / den


def _attractor_points(spec: RenderSpec):
    pts = []
    if spec.attractors:
        for aid, (points, period) in enumerate(spec.attractors):
            for ph, p in enumerate(points):
                pts.append((aid, ph, complex(p)))
    return pts


def classify_points(
    f: MapLike,
    pts: np.ndarray,
    max_iter: int,
    escape_radius: Optional[float] = None,
    attractors=None,
    capture_tol: float = 1e-6,
):
    """Classify a flat complex array of seeds; the common vector core."""
    radius = escape_radius if escape_radius is not None else auto_radius(f)
    z = np.array(pts, dtype=np.complex128).ravel().copy()
    npts = z.size
    kind = np.zeros(npts, dtype=np.uint8)
    iters = np.zeros(npts, dtype=np.int32)
    bid = np.full(npts, -1, dtype=np.int16)
    bph = np.full(npts, -1, dtype=np.int16)
    apts = []
    if attractors:
        for aid, (points, _period) in enumerate(attractors):
            for ph, p in enumerate(points):
                apts.append((aid, ph, complex(p)))

    out0 = np.abs(z) > radius
    kind[out0] = KIND_ESCAPED
    active = ~out0
    for aid, ph, p in apts:
        cap = active & (np.abs(z - p) <= capture_tol)
        kind[cap] = KIND_BASIN
        bid[cap] = aid
        bph[cap] = ph
        active &= ~cap

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for k in range(1, max_iter + 1):
            idx = np.nonzero(active)[0]
            if idx.size == 0:
                break
            w = _eval_vec(f, z[idx])
            finite = np.isfinite(w.real) & np.isfinite(w.imag)
            esc = ~finite | (np.abs(np.where(finite, w, 0)) > radius)
            esc_idx = idx[esc]
            kind[esc_idx] = KIND_ESCAPED
            iters[esc_idx] = k
            rem = idx[~esc]
            wr = w[~esc]
            z[rem] = wr
            active[esc_idx] = False
            if apts:
                open_rem = np.ones(rem.size, dtype=bool)
                for aid, ph, p in apts:
                    cap = open_rem & (np.abs(wr - p) <= capture_tol)
                    ci = rem[cap]
                    kind[ci] = KIND_BASIN
                    bid[ci] = aid
                    bph[ci] = ph
                    active[ci] = False
                    open_rem &= ~cap
    return kind, iters, bid, bph


def _thread_count() -> int:
    raw = os.environ.get("MCM_THREADS", "0")
    try:
        t = int(raw)
    except ValueError:
        t = 0
    if t <= 0:
        t = min(4, os.cpu_count() or 1)
    return t


def classify_grid(spec: RenderSpec) -> ClassGrid:
    """Classify every pixel of the window.

    Pixel (ix, iy) samples center + ((ix - w/2) + i*(h/2 - iy)) * pitch, so
    power-of-two resolutions sample nested point sets exactly.  Rows are
    split into bands classified independently (MCM_THREADS, 0 = auto).
    """
    w, h = spec.width, spec.height
    pitch = spec.pitch
    xs = spec.center.real + (np.arange(w) - w / 2) * pitch
    ys = spec.center.imag + (h / 2 - np.arange(h)) * pitch
    kind = np.zeros((h, w), dtype=np.uint8)
    iters = np.zeros((h, w), dtype=np.int32)
    bid = np.full((h, w), -1, dtype=np.int16)
    bph = np.full((h, w), -1, dtype=np.int16)

    def run_band(r0: int, r1: int):
        grid = xs[None, :] + 1j * ys[r0:r1, None]
        return classify_points(
            spec.map,
            grid.ravel(),
            spec.max_iter,
            spec.escape_radius,
            spec.attractors,
            spec.capture_tol,
        )

    nthreads = _thread_count()
    bands = []
    rows_per = max(1, math.ceil(h / max(1, nthreads)))
    r = 0
    while r < h:
        bands.append((r, min(h, r + rows_per)))
        r += rows_per

    if nthreads == 1 or len(bands) == 1:
        results = [run_band(r0, r1) for r0, r1 in bands]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            results = list(pool.map(lambda b: run_band(*b), bands))
    for (r0, r1), (bk, bit, bbi, bbp) in zip(bands, results):
        rows = r1 - r0
        kind[r0:r1] = bk.reshape(rows, w)
        iters[r0:r1] = bit.reshape(rows, w)
        bid[r0:r1] = bbi.reshape(rows, w)
        bph[r0:r1] = bbp.reshape(rows, w)
    return ClassGrid(
        width=w,
        height=h,
        center=spec.center,
        pitch=pitch,
        kind=kind,
        iters=iters,
        basin_id=bid,
        basin_phase=bph,
    )


def radial_profile(
    spec: RenderSpec, angle: float, r_min: float, r_max: float, samples: int
) -> RadialProfile:
    """Classify a geometric grid of radii along one ray from the center."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if not (0 < r_min < r_max):
        raise ValueError("need 0 < r_min < r_max")
    t = np.arange(samples) / (samples - 1)
    radii = r_min * (r_max / r_min) ** t
    pts = spec.center + radii * np.exp(1j * angle)
    kind, iters, _, _ = classify_points(
        spec.map, pts, spec.max_iter, spec.escape_radius, spec.attractors, spec.capture_tol
    )
    esc = kind == KIND_ESCAPED
    alternations = int(np.count_nonzero(esc[1:] != esc[:-1]))
    return RadialProfile(
        angle=angle, radii=radii, kind=kind, iters=iters, alternations=alternations
    )


def rotational_symmetry_score(grid: ClassGrid, m: int) -> float:
    """Fraction of pixels matching their rotated-by-2*pi/m partner.

    A match is Escaped on both sides with escape indices within 1, or
    non-escaped on both sides.  Partners falling outside the grid are
    excluded.  The grid must be centered at 0.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    h, w = grid.kind.shape
    pitch = grid.pitch
    ix = np.arange(w) - w / 2
    iy = h / 2 - np.arange(h)
    x = ix[None, :] * pitch
    y = iy[:, None] * pitch
    c, s = math.cos(2 * math.pi / m), math.sin(2 * math.pi / m)
    xr = c * x - s * y
    yr = s * x + c * y
    jx = np.rint(xr / pitch + w / 2).astype(np.int64)
    jy = np.rint(h / 2 - yr / pitch).astype(np.int64)
    valid = (jx >= 0) & (jx < w) & (jy >= 0) & (jy < h)
    src_esc = grid.kind == KIND_ESCAPED
    jxc = np.clip(jx, 0, w - 1)
    jyc = np.clip(jy, 0, h - 1)
    dst_esc = src_esc[jyc, jxc]
    dst_iters = grid.iters[jyc, jxc]
    match = (src_esc == dst_esc) & (
        ~src_esc | (np.abs(grid.iters - dst_iters) <= 1)
    )
    nvalid = int(valid.sum())
    if nvalid == 0:
        return 0.0
    return float(np.count_nonzero(match & valid)) / nvalid


def grid_to_rgb(grid: ClassGrid) -> np.ndarray:
    """(h, w, 3) uint8 image per the frozen palette."""
    h, w = grid.kind.shape
    rgb = np.zeros((h, w, 3), dtype=np.uint8)
    esc = grid.kind == KIND_ESCAPED
    val = (255 - np.minimum(8 * grid.iters.astype(np.int64), 255)).astype(np.uint8)
    rgb[esc, 0] = val[esc]
    rgb[esc, 1] = val[esc]
    rgb[esc, 2] = 255
    bas = grid.kind == KIND_BASIN
    if bas.any():
        pal = np.array(PALETTE8, dtype=np.uint8)
        idx = (2 * grid.basin_id.astype(np.int64) + grid.basin_phase.astype(np.int64)) % 8
        rgb[bas] = pal[idx[bas]]
    return rgb


def write_ppm(grid: ClassGrid, path: str) -> None:
    """Binary PPM (P6), byte-exact for a given grid."""
    header = f"P6\n{grid.width} {grid.height}\n255\n".encode("ascii")
    rgb = grid_to_rgb(grid)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(rgb.tobytes())
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def grid_to_text(grid: ClassGrid) -> str:
    """Plain text export: one row per line, comma-separated class tags."""
    lines = []
    for iy in range(grid.height):
        lines.append(",".join(grid.tag(ix, iy) for ix in range(grid.width)))
    return "\n".join(lines) + "\n"
