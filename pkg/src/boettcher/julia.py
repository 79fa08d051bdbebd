"""Regions of convergence and their boundaries.

Escape-time rasters, backward-iteration sampling of Julia sets, preimage
trees of attracting basins, periodic-point density along model boundaries,
the everywhere-chaotic probe, and the classical example maps (monomials,
Chebyshev-like polynomials, z^2 + c, and the square-lattice elliptic
doubling map).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import impl
from .cycles import REPELLING, periodic_points
from .errors import DepthCapExceeded, EmptyCloud, NoRepellingFixedPoint
from .funceq import green_values
from .maps import MapLike, Polynomial, RationalMap, as_rational, escape_radius

BASIN_BRANCH_CAP = 1 << 18
HAUSDORFF_CAP = 20000

CONNECTED_CANDIDATE = "connected candidate"
DUST_CANDIDATE = "dust candidate"

# sphere partition used by coverage probes: 40 equal-height latitude bands
# (equal area by Archimedes) x 50 azimuth sectors = 2000 equal-area cells
COVER_BANDS = 40
COVER_SECTORS = 50


def resolve_threads(threads=None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("BOETTCHER_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Viewport:
    center: complex
    half_width: float
    half_height: float
    pixels_x: int
    pixels_y: int

    def __post_init__(self):
        if self.half_width <= 0 or self.half_height <= 0:
            raise ValueError("viewport half-extents must be positive")
        if self.pixels_x < 1 or self.pixels_y < 1:
            raise ValueError("pixel counts must be >= 1")

    def pixel_axes(self) -> tuple[np.ndarray, np.ndarray]:
        """Pixel-center coordinates; row 0 is the top of the image."""
        jx = np.arange(self.pixels_x)
        iy = np.arange(self.pixels_y)
        xs = self.center.real + self.half_width * ((2.0 * jx + 1.0) / self.pixels_x - 1.0)
        ys = self.center.imag + self.half_height * (1.0 - (2.0 * iy + 1.0) / self.pixels_y)
        return xs, ys


@dataclass(frozen=True)
class EscapeGrid:
    viewport: Viewport
    max_iter: int
    data: np.ndarray  # (pixels_y, pixels_x) int32; max_iter + 1 = bounded


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # complex128
    source_tag: str
    rng_seed: int

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class PeriodDensity:
    period: int
    count: int
    max_distance: float
    max_gap: float


@dataclass(frozen=True)
class DensityReport:
    max_period: int
    model: str
    rows: tuple[PeriodDensity, ...]


@dataclass(frozen=True)
class ChaoticReport:
    no_nonrepelling: bool
    cover_fraction: float
    max_period: int
    n_samples: int
    cover_threshold: float = 0.99

    @property
    def chaotic_candidate(self) -> bool:
        return self.no_nonrepelling and self.cover_fraction > self.cover_threshold


def monomial(m: int) -> Polynomial:
    if m < 2:
        raise ValueError("monomial degree must be >= 2")
    return Polynomial([0] * m + [1])


def chebyshev_like(d: int) -> Polynomial:
    """Degree-d polynomial with f(w + 1/w) = w^d + 1/w^d, acting on [-2, 2].

    Built by the recurrence f_{k+1} = z f_k - f_{k-1} with f_0 = 2, f_1 = z.
    """
    if d < 2:
        raise ValueError("degree must be >= 2")
    z = Polynomial((0, 1))
    prev = Polynomial((2,))
    cur = z
    for _ in range(d - 1):
        prev, cur = cur, z * cur - prev
    return cur


def quadratic(c: complex) -> Polynomial:
    return Polynomial((complex(c), 0, 1))


def lattes_example() -> RationalMap:
    """Doubling map of the square-lattice elliptic function:
    f(z) = (z^2+1)^2 / (4z(z^2-1)).  Its Julia set is the whole sphere."""
    num = Polynomial((1, 0, 2, 0, 1))
    den = Polynomial((0, -4, 0, 4))
    return RationalMap(num, den, tag="lattes")


def escape_time_grid(p: Polynomial, viewport: Viewport, max_iter: int,
                     threads=None) -> EscapeGrid:
    """Escape counts at pixel centers; deterministic for any thread count."""
    if p.degree < 2:
        raise ValueError("escape grid needs degree >= 2")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    r = escape_radius(p)
    xs, ys = viewport.pixel_axes()
    out = np.empty((viewport.pixels_y, viewport.pixels_x), dtype=np.int32)
    coeffs = p.as_array()
    cre, cim = coeffs.real.copy(), coeffs.imag.copy()
    n_threads = resolve_threads(threads)
    rows = viewport.pixels_y
    if n_threads <= 1 or rows < 2 * n_threads:
        impl.escape_grid(cre, cim, xs, ys, r * r, int(max_iter), out, 0, rows)
    else:
        block = (rows + n_threads - 1) // n_threads
        spans = [(b, min(b + block, rows)) for b in range(0, rows, block)]
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            futures = [pool.submit(impl.escape_grid, cre, cim, xs, ys,
                                   r * r, int(max_iter), out, lo, hi)
                       for lo, hi in spans]
            for fut in futures:
                fut.result()
    return EscapeGrid(viewport, int(max_iter), out)


def _repelling_fixed_point(f: RationalMap) -> complex:
    reps = [c.points[0] for c in periodic_points(f, 1)
            if c.classification == REPELLING]
    if not reps:
        raise NoRepellingFixedPoint("map has no finite repelling fixed point")
    return min(reps, key=lambda z: (z.real, z.imag))


def default_walkers(n_samples: int) -> int:
    """Independent walker count: one per 512 samples, capped at 256."""
    return max(1, min(256, n_samples // 512))


def inverse_iteration(f: MapLike, n_samples: int, burn_in: int = 64,
                      rng_seed: int = 1, n_walkers=None) -> PointCloud:
    """Julia-set sampling by backward iteration from a repelling fixed point.

    Runs `n_walkers` independent walks in lockstep (seeded per walker from
    `rng_seed`) and concatenates their samples in walker order, so the cloud
    is bit-reproducible for fixed (map, seed, parameters).
    """
    f = as_rational(f)
    if f.degree < 2:
        raise ValueError("inverse iteration needs degree >= 2")
    if f.num.degree <= f.den.degree:
        raise ValueError("inverse iteration needs deg num > deg den")
    if f.degree > 64:
        raise ValueError("walk kernels support map degree <= 64")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    start = _repelling_fixed_point(f)
    lead = f.num.leading
    num = (1.0 / lead) * f.num
    den = (1.0 / lead) * f.den
    nre = num.as_array().real.copy()
    nim = num.as_array().imag.copy()
    dre = den.as_array().real.copy()
    dim = den.as_array().imag.copy()
    w = default_walkers(n_samples) if n_walkers is None else max(1, int(n_walkers))
    per = -(-n_samples // w)  # ceil
    out_re, out_im = impl.preimage_walk(nre, nim, dre, dim,
                                        start.real, start.imag,
                                        int(w), int(per), int(burn_in),
                                        int(rng_seed), 1e-13, 48)
    pts = (out_re + 1j * out_im)[:n_samples]
    return PointCloud(pts, f"inverse-iteration:{f.tag}", int(rng_seed))


def basin_level_sizes(degree: int, depth: int, circle_samples: int) -> list[int]:
    return [circle_samples * degree ** k for k in range(1, depth + 1)]


def basin_backward(p: Polynomial, attractor: complex, depth: int,
                   radius: float = 0.1, circle_samples: int = 64) -> PointCloud:
    """Full preimage tree of a small circle around an attracting fixed point.

    The cloud holds levels 1..depth contiguously (level k has
    circle_samples * degree^k points, children grouped under their parent),
    so callers can slice layers via basin_level_sizes.
    """
    d = p.degree
    if d < 2:
        raise ValueError("basin tree needs degree >= 2")
    if d > 64:
        raise ValueError("walk kernels support map degree <= 64")
    alpha = complex(attractor)
    if abs(p(alpha) - alpha) > 1e-9 * (1.0 + abs(alpha)):
        raise ValueError(f"{attractor} is not a fixed point")
    if abs(p.derivative()(alpha)) >= 1.0 - 1e-10:
        raise ValueError("fixed point is not attracting")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if d ** depth > BASIN_BRANCH_CAP:
        raise DepthCapExceeded(f"{d}^{depth} branches exceed cap {BASIN_BRANCH_CAP}")
    lead = p.leading
    mono = (1.0 / lead) * p
    cre = mono.as_array().real.copy()
    cim = mono.as_array().imag.copy()
    ang = 2.0 * np.pi * np.arange(circle_samples) / circle_samples
    level = alpha + radius * (np.cos(ang) + 1j * np.sin(ang))
    levels = []
    for _ in range(depth):
        targets = level / lead  # roots of p(w) = t  <=>  mono(w) = t / lead
        rre, rim = impl.batch_preimage(cre, cim,
                                       targets.real.copy(), targets.imag.copy(),
                                       1e-13, 256)
        level = (rre + 1j * rim).reshape(-1)
        levels.append(level)
    pts = np.concatenate(levels)
    return PointCloud(pts, f"basin:{p}", 0)


def _monomial_order(p: Polynomial):
    c = p.coeffs
    if p.degree >= 2 and c[-1] == 1 and all(v == 0 for v in c[:-1]):
        return p.degree
    return None


def _is_chebyshev_like(p: Polynomial) -> bool:
    if p.degree < 2:
        return False
    ref = chebyshev_like(p.degree).coeffs
    return len(ref) == len(p.coeffs) and all(
        abs(a - b) <= 1e-12 * (1.0 + abs(b)) for a, b in zip(p.coeffs, ref))


def _segment_distance(z: complex) -> float:
    if abs(z.real) <= 2.0:
        return abs(z.imag)
    return abs(z - complex(math.copysign(2.0, z.real), 0.0))


def periodic_density_report(p: Polynomial, max_period: int) -> DensityReport:
    """How densely repelling periodic points fill the model boundary.

    Supported models: monomials (unit circle) and chebyshev_like (segment
    [-2, 2]).  For each period n the row holds the count of exact-period-n
    repelling points, while distance and gap statistics run over every
    repelling point whose period divides n (the fixed points of p^n).
    Circle gaps wrap around; segment gaps include the ends of [0, pi] in
    the angular parametrization z = 2 cos(theta).
    """
    mono_order = _monomial_order(p)
    if mono_order is not None:
        model = "circle"
    elif _is_chebyshev_like(p):
        model = "segment"
    else:
        raise ValueError("density model known only for monomial/chebyshev maps")
    by_period = {q: periodic_points(p, q) for q in range(1, max_period + 1)}
    rows = []
    for n in range(1, max_period + 1):
        exact_rep = [pt for cyc in by_period[n] for pt in cyc.points
                     if cyc.classification == REPELLING]
        union = [pt for q in range(1, n + 1) if n % q == 0
                 for cyc in by_period[q] for pt in cyc.points
                 if cyc.classification == REPELLING]
        if model == "circle":
            dists = [abs(abs(z) - 1.0) for z in union]
            angles = sorted(math.atan2(z.imag, z.real) % (2.0 * math.pi)
                            for z in union)
            if len(angles) > 1:
                gaps = [b - a for a, b in zip(angles, angles[1:])]
                gaps.append(angles[0] + 2.0 * math.pi - angles[-1])
                max_gap = max(gaps)
            else:
                max_gap = 2.0 * math.pi
        else:
            dists = [_segment_distance(z) for z in union]
            thetas = sorted(math.acos(min(1.0, max(-1.0, z.real / 2.0)))
                            for z in union)
            pts = [0.0] + thetas + [math.pi] if thetas else [0.0, math.pi]
            max_gap = max(b - a for a, b in zip(pts, pts[1:]))
        rows.append(PeriodDensity(n, len(exact_rep),
                                  max(dists) if dists else math.inf, max_gap))
    return DensityReport(max_period, model, tuple(rows))


def sphere_cell_indices(points: np.ndarray, bands: int = COVER_BANDS,
                        sectors: int = COVER_SECTORS) -> np.ndarray:
    """Equal-area cell index of each finite point under stereographic lift."""
    pts = np.asarray(points, dtype=np.complex128)
    m2 = pts.real ** 2 + pts.imag ** 2
    zc = (m2 - 1.0) / (m2 + 1.0)
    band = np.clip(((zc + 1.0) / 2.0 * bands).astype(np.int64), 0, bands - 1)
    phi = np.arctan2(pts.imag, pts.real)
    sector = np.clip(((phi + np.pi) / (2.0 * np.pi) * sectors).astype(np.int64),
                     0, sectors - 1)
    return band * sectors + sector


def sphere_cover_fraction(points: np.ndarray, bands: int = COVER_BANDS,
                          sectors: int = COVER_SECTORS) -> float:
    cells = sphere_cell_indices(points, bands, sectors)
    return len(np.unique(cells)) / float(bands * sectors)


def chaotic_probe(f: MapLike, max_period: int = 4, n_samples: int = 1000000,
                  cover_threshold: float = 0.99, rng_seed: int = 1) -> ChaoticReport:
    """Two-part test for everywhere-chaotic behavior.

    (a) no non-repelling cycle up to max_period among the finite cycles;
    (b) backward-iteration samples hit more than `cover_threshold` of the
        2000 equal-area sphere cells.
    """
    f = as_rational(f)
    no_nonrep = True
    for period in range(1, max_period + 1):
        for cyc in periodic_points(f, period):
            if cyc.classification != REPELLING:
                no_nonrep = False
    cloud = inverse_iteration(f, n_samples, rng_seed=rng_seed)
    frac = sphere_cover_fraction(cloud.points)
    return ChaoticReport(no_nonrep, frac, max_period, n_samples, cover_threshold)


def connectivity_probe(c: complex, max_iter: int = 512) -> str:
    """Bounded critical orbit -> connected candidate; escape -> dust candidate."""
    p = quadratic(c)
    r = escape_radius(p)
    z = 0j
    for _ in range(max_iter):
        if abs(z) > r:
            return DUST_CANDIDATE
        z = z * z + c
    return CONNECTED_CANDIDATE if abs(z) <= r else DUST_CANDIDATE


def _cloud_points(cloud) -> np.ndarray:
    if isinstance(cloud, PointCloud):
        return cloud.points
    return np.asarray(cloud, dtype=np.complex128)


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two finite clouds (brute force)."""
    pa = _cloud_points(a)
    pb = _cloud_points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptyCloud("hausdorff distance needs non-empty clouds")
    if len(pa) > HAUSDORFF_CAP or len(pb) > HAUSDORFF_CAP:
        raise ValueError(f"cloud sizes capped at {HAUSDORFF_CAP}")

    def directed(u: np.ndarray, v: np.ndarray) -> float:
        worst = 0.0
        block = max(1, (1 << 22) // max(1, len(v)))
        for lo in range(0, len(u), block):
            chunk = u[lo:lo + block]
            d2 = (chunk.real[:, None] - v.real[None, :]) ** 2 \
                + (chunk.imag[:, None] - v.imag[None, :]) ** 2
            worst = max(worst, float(d2.min(axis=1).max()))
        return math.sqrt(worst)

    return max(directed(pa, pb), directed(pb, pa))


def julia_membership_green(p: Polynomial, points: np.ndarray,
                           max_iter: int = 256) -> np.ndarray:
    """Escape rate of each point: near zero on and inside the Julia set."""
    return green_values(p, points, max_iter)
