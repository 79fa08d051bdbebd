"""Periodic points, multiplier classification, and the root engine behind them.

The root finder is a hybrid: exact deflation of zero roots, closed forms for
degree <= 2 and for binomials c0 + z^d (which covers every z^m periodic-point
equation), and the balanced companion-matrix eigenvalue method for the rest,
followed by Newton polishing and a backward-error audit in a rescaled
coordinate.  Simultaneous-iteration correctors (Weierstrass/Aberth) were
measured to deadlock on iterated-quadratic fixed-point polynomials at degree
256, which is this library's core workload; the eigenvalue route is the
dependable one at these degrees.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegreeCapExceeded, NonConvergence
from .maps import (COMPOSE_DEGREE_CAP, MapLike, Polynomial, RationalMap,
                   as_rational, compose_rational, eval_sphere,
                   iterate_polynomial)
from .sphere import is_infinity

SUPERATTRACTING = "superattracting"
ATTRACTING = "attracting"
REPELLING = "repelling"
RATIONALLY_NEUTRAL = "rationally neutral"
IRRATIONALLY_NEUTRAL = "irrationally neutral"

_EPS = np.finfo(float).eps

# Points of one exact cycle must stay this far apart; root clusters tighter
# than this are treated as one (multiple) root.
CLUSTER_TOL = 1e-6


@dataclass(frozen=True)
class Cycle:
    """A periodic orbit: its points, exact period, multiplier, and class."""

    points: tuple[complex, ...]
    period: int
    multiplier: complex
    classification: str

    def __post_init__(self):
        if len(self.points) != self.period:
            raise ValueError("cycle length differs from period")


@dataclass(frozen=True)
class PreperiodicRecord:
    start: complex
    preperiod: int
    period: int


@dataclass(frozen=True)
class NonRepellingReport:
    count: int
    bound: int
    cycles: tuple[Cycle, ...]


def _coeff_array(p) -> np.ndarray:
    if isinstance(p, Polynomial):
        return p.as_array()
    return np.asarray([complex(c) for c in p], dtype=np.complex128)


def _quadratic_roots(c0: complex, c1: complex, c2: complex) -> list[complex]:
    # stable formula; c0 != 0 is guaranteed by zero-root deflation
    c0, c1, c2 = complex(c0), complex(c1), complex(c2)
    sq = cmath.sqrt(c1 * c1 - 4.0 * c2 * c0)
    s = c1 + sq if abs(c1 + sq) >= abs(c1 - sq) else c1 - sq
    x1 = -s / (2.0 * c2)
    x2 = (c0 / c2) / x1
    return [x1, x2]


def _binomial_roots(c0: complex, d: int) -> list[complex]:
    # z^d = -c0: magnitudes and equally spaced arguments, exact
    a = -c0
    r = abs(a) ** (1.0 / d)
    theta = cmath.phase(a)
    return [r * complex(math.cos((theta + 2.0 * math.pi * k) / d),
                        math.sin((theta + 2.0 * math.pi * k) / d))
            for k in range(d)]


def _fujiwara_bound(c: np.ndarray) -> float:
    # monic coefficients, constant term first
    d = len(c) - 1
    mags = np.abs(c[:-1])
    ks = d - np.arange(d)
    with np.errstate(divide="ignore"):
        vals = mags ** (1.0 / ks)
    return 2.0 * max(float(vals.max()), 1e-30)


def _scaled_eval(sc: np.ndarray, y: np.ndarray):
    """Value, derivative, and |coeff|-majorant of the rescaled polynomial."""
    d = len(sc) - 1
    p = np.full(y.shape, sc[d])
    dp = np.zeros(y.shape, dtype=np.complex128)
    maj = np.full(y.shape, abs(sc[d]))
    ay = np.abs(y)
    for k in range(d - 1, -1, -1):
        dp = dp * y + p
        p = p * y + sc[k]
        maj = maj * ay + abs(sc[k])
    return p, dp, maj


def poly_roots(p, tol: float = 1e-12, max_iter: int = 1000,
               audit: bool = True) -> list[complex]:
    """All roots of p, with multiplicity clusters, as a plain list.

    Raises NonConvergence when the coefficients are not representable or the
    backward-error audit rejects the computed roots (ill-conditioned input).
    """
    c = _coeff_array(p)
    if len(c) < 2:
        raise ValueError("poly_roots needs degree >= 1")
    if not np.isfinite(c.view(np.float64)).all():
        raise NonConvergence("polynomial coefficients overflow double precision")
    c = c / c[-1]
    n_zero = 0
    while n_zero < len(c) - 1 and c[n_zero] == 0:
        n_zero += 1
    zeros = [0j] * n_zero
    c = c[n_zero:]
    d = len(c) - 1
    if d == 0:
        return zeros
    if d == 1:
        return zeros + [complex(-c[0])]
    if d == 2:
        return zeros + _quadratic_roots(c[0], c[1], c[2])
    support = np.nonzero(c)[0]
    if len(support) == 2:
        return zeros + _binomial_roots(complex(c[0]), d)

    roots = np.roots(c[::-1])

    # polish + audit in the rescaled coordinate y = x/s with lifted
    # coefficients, so degree-512 Chebyshev iterates do not overflow
    s = _fujiwara_bound(c)
    sc = c * (s ** (np.arange(d + 1) - float(d)))
    m = float(np.abs(sc).max())
    headroom = max(0.0, 1020.0 - d * math.log2(1.5) - 30.0)
    shift = math.floor(headroom - math.log2(m))
    sc = sc * (2.0 ** shift)
    y = roots / s
    for _ in range(12):
        pv, dv, _ = _scaled_eval(sc, y)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            step = np.where(dv != 0, pv / np.where(dv == 0, 1, dv), 0)
        # huge steps mean a multiple root; keep the eigenvalue estimate there
        lim = 1e-2 * (1.0 + np.abs(y))
        step = np.where(np.abs(step) > lim, 0, step)
        y = y - step
        if (np.abs(step) <= 1e-14 * (1.0 + np.abs(y))).all():
            break
    if audit:
        pv, _, maj = _scaled_eval(sc, y)
        # loose safety net: catches grossly wrong roots, tolerates cluster noise
        bad = np.abs(pv) > max(tol, 1e6 * d * _EPS) * np.maximum(maj, 1e-300)
        if bad.any():
            raise NonConvergence(
                f"{int(bad.sum())} of {d} roots failed the residual audit")
    return zeros + [complex(v) for v in y * s]


def multiplier(f: MapLike, points: Sequence[complex]) -> complex:
    """Product of f' along a verified cycle."""
    f = as_rational(f)
    lam = 1.0 + 0j
    for z in points:
        lam *= f.derivative_value(complex(z))
    return lam


def classify(lam: complex) -> str:
    """Multiplier dictionary: modulus against 1, neutral split by roots of unity."""
    m = abs(lam)
    if m < 1e-10:
        return SUPERATTRACTING
    if m < 1.0 - 1e-8:
        return ATTRACTING
    if m > 1.0 + 1e-8:
        return REPELLING
    for q in range(1, 65):
        if abs(lam ** q - 1.0) < 1e-6:
            return RATIONALLY_NEUTRAL
    return IRRATIONALLY_NEUTRAL


def _proper_divisors(n: int) -> list[int]:
    return [q for q in range(1, n) if n % q == 0]


def _iterate_finite(f: RationalMap, z: complex, n: int):
    w = z
    for _ in range(n):
        w = eval_sphere(f, w)
        if is_infinity(w):
            return None
    return w


def _cluster_means(points: list[complex], tol: float) -> list[complex]:
    used = [False] * len(points)
    out = []
    order = sorted(range(len(points)), key=lambda i: (points[i].real, points[i].imag))
    for i in order:
        if used[i]:
            continue
        members = [points[i]]
        used[i] = True
        for j in order:
            if not used[j] and abs(points[j] - points[i]) < tol:
                members.append(points[j])
                used[j] = True
        out.append(sum(members) / len(members))
    return out


def periodic_equation(f: MapLike, period: int) -> Polynomial:
    """The polynomial whose finite roots are the period-`period` points.

    f^p(z) - z for polynomials; num(f^p) - z*den(f^p) for rational maps.
    """
    f = as_rational(f)
    d = f.degree
    if d < 2:
        raise ValueError("periodic points need degree >= 2")
    if d ** period > COMPOSE_DEGREE_CAP:
        raise DegreeCapExceeded(
            f"degree {d}^{period} exceeds cap {COMPOSE_DEGREE_CAP}")
    if f.is_polynomial:
        g = iterate_polynomial(f.poly(), period)
        return g - Polynomial((0, 1))
    it = f
    for _ in range(period - 1):
        it = compose_rational(f, it)
    return it.num - Polynomial((0, 1)) * it.den


def _eval_vec(poly: Polynomial, w: np.ndarray) -> np.ndarray:
    acc = np.zeros(w.shape, dtype=np.complex128)
    for c in reversed(poly.coeffs if poly.coeffs else (0j,)):
        acc = acc * w + c
    return acc


def _refine_periodic_batch(f: RationalMap, seeds: np.ndarray, period: int,
                           max_newton: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Newton-refine period-p candidates on the dynamically evaluated iterate.

    The expanded coefficients of f^p - z lose all precision at moderate radii
    (catastrophic cancellation), so the eigenvalue roots are only seeds here:
    g(z) = f^p(z) - z and g'(z) = prod f'(f^k(z)) - 1 are re-evaluated along
    the orbit, which is well-conditioned wherever orbits stay bounded.
    Returns (points, converged_mask); non-converged seeds must be dropped.
    """
    num, den = f.num, f.den
    dnum = num.derivative()
    dden = den.derivative()
    z = seeds.astype(np.complex128).copy()
    active = np.ones(len(z), dtype=bool)
    converged = np.zeros(len(z), dtype=bool)
    for _ in range(max_newton):
        if not active.any():
            break
        w = z.copy()
        der = np.ones(len(z), dtype=np.complex128)
        alive = active.copy()
        for _ in range(period):
            dv = _eval_vec(den, w)
            nv = _eval_vec(num, w)
            bad = np.abs(dv) < 1e-280
            alive &= ~bad
            dv = np.where(bad, 1.0, dv)
            der = der * (_eval_vec(dnum, w) * dv - nv * _eval_vec(dden, w)) / (dv * dv)
            w = np.where(alive, nv / dv, w)
            far = np.abs(w) > 1e8
            alive &= ~far
        gval = w - z
        gder = der - 1.0
        # multiple roots (parabolic points) have gder ~ 0 with gval ~ 0:
        # already as converged as double precision allows
        exact_hit = alive & (np.abs(gval) <= 1e-10 * (1.0 + np.abs(z)))
        converged |= active & exact_hit
        active = active & ~exact_hit
        ok = alive & (np.abs(gder) > 1e-14)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(ok, gval / np.where(ok, gder, 1.0), 0.0)
        big = np.abs(step) > 0.5 * (1.0 + np.abs(z))
        step = np.where(big, 0.0, step)
        znew = np.where(active & ok, z - step, z)
        # converged = tiny step AND genuinely small orbit residual (a tiny
        # Newton step alone can mask a far point with a huge derivative)
        done = (active & ok
                & (np.abs(step) <= 1e-12 * (1.0 + np.abs(znew)))
                & (np.abs(gval) <= 1e-8 * (1.0 + np.abs(z))))
        converged |= done
        dropped = active & ~ok
        active = active & ~done & ~dropped & ~big
        z = znew
    return z, converged


def periodic_points(f: MapLike, period: int) -> list[Cycle]:
    """All cycles of exact period `period`, sorted by their minimal point.

    Solves f^p(z) = z (eigenvalue roots of the expanded form as seeds,
    dynamical Newton refinement on the orbit evaluation), drops points whose
    exact period properly divides p, groups the rest into cycles by forward
    iteration, and attaches the multiplier and its classification.
    """
    f = as_rational(f)
    g = periodic_equation(f, period)
    roots = poly_roots(g, tol=1e-12, audit=False)
    refined, conv = _refine_periodic_batch(f, np.asarray(roots), period)
    reps = _cluster_means([complex(r) for r in refined[conv]], CLUSTER_TOL)

    exact = []
    for z in reps:
        is_lower = False
        for q in _proper_divisors(period):
            w = _iterate_finite(f, z, q)
            if w is not None and abs(w - z) < 1e-8:
                is_lower = True
                break
        if not is_lower:
            exact.append(z)

    # Group by following the forward orbit itself.  One accurate member
    # generates its whole cycle by iteration; other candidates that match an
    # iterate are consumed so no cycle is collected twice, and the closure
    # test at the end rejects non-periodic leftovers.
    remaining = sorted(exact, key=lambda z: (z.real, z.imag))
    cycles = []
    while remaining:
        start = remaining.pop(0)
        pts = [start]
        cur = start
        ok = True
        for _ in range(period - 1):
            nxt = eval_sphere(f, cur)
            if is_infinity(nxt):
                ok = False
                break
            if remaining:
                dists = [abs(r - nxt) for r in remaining]
                k = dists.index(min(dists))
                if dists[k] <= 1e-6 * (1.0 + abs(nxt)):
                    nxt = remaining.pop(k)
            pts.append(nxt)
            cur = nxt
        if ok:
            back = eval_sphere(f, pts[-1])
            ok = (not is_infinity(back)
                  and abs(back - start) <= 1e-6 * (1.0 + abs(start)))
        if not ok:
            continue
        lam = multiplier(f, pts)
        cycles.append(Cycle(tuple(pts), period, lam, classify(lam)))
    if exact and not cycles:
        raise NonConvergence(
            f"no period-{period} cycle could be resolved from {len(exact)} candidates")
    cycles.sort(key=lambda c: (min((p.real, p.imag) for p in c.points)))
    return cycles


def count_nonrepelling_cycles(f: MapLike, max_period: int) -> NonRepellingReport:
    """Count non-repelling cycles up to max_period, with the critical bound.

    The bound is d-1 for a polynomial (its finite critical points) and
    2d-2 for a general rational map.
    """
    f = as_rational(f)
    d = f.degree
    if d ** max_period > COMPOSE_DEGREE_CAP:
        raise DegreeCapExceeded(
            f"degree {d}^{max_period} exceeds cap {COMPOSE_DEGREE_CAP}")
    found = []
    for p in range(1, max_period + 1):
        for cyc in periodic_points(f, p):
            if cyc.classification != REPELLING:
                found.append(cyc)
    bound = d - 1 if f.is_polynomial else 2 * d - 2
    return NonRepellingReport(len(found), bound, tuple(found))


def is_preperiodic(f: MapLike, z0: complex, max_pre: int, max_period: int,
                   tol: float = 1e-9) -> Optional[PreperiodicRecord]:
    """First recurrence of the orbit: minimal preperiod, then minimal period.

    Purely numerical: a recurrence is |f^(a+p)(z0) - f^a(z0)| < tol.  Escaping
    orbits (|z| > 1e8 or reaching infinity) report no recurrence.
    """
    if max_pre < 0 or max_period < 1:
        raise ValueError("need max_pre >= 0 and max_period >= 1")
    f = as_rational(f)
    orbit = [complex(z0)]
    for _ in range(max_pre + max_period):
        w = eval_sphere(f, orbit[-1])
        if is_infinity(w) or abs(w) > 1e8:
            break
        orbit.append(w)
    n = len(orbit) - 1
    for a in range(0, max_pre + 1):
        for p in range(1, max_period + 1):
            if a + p <= n and abs(orbit[a + p] - orbit[a]) < tol:
                return PreperiodicRecord(complex(z0), a, p)
    return None


def misiurewicz_check(c: complex, max_pre: int = 64, max_period: int = 64,
                      tol: float = 1e-9) -> Optional[PreperiodicRecord]:
    """Preperiodicity of the critical orbit of z^2 + c (strict preperiod >= 1)."""
    quad = Polynomial((c, 0, 1))
    rec = is_preperiodic(quad, 0j, max_pre, max_period, tol)
    if rec is None or rec.preperiod == 0:
        return None
    return rec
