"""Functional-equation solvers around fixed points.

Covers the conjugacy F(f(z)) = F(z)^m at a superattracting fixed point
(series and iterative-limit constructions, plus the chart at infinity and
the escape-rate function), Koenigs linearization at an attracting fixed
point, the telescoping solution of psi(f(z)) - psi(z) = g(z), and the
infinite-product solution of first-order linear systems
U(z) = A(z) U(F(z)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import impl
from .errors import (BranchAmbiguity, DivergedOrbit, NonSummable,
                     NoConvergence, NotInBasin)
from .maps import MapLike, Polynomial, RationalMap, as_rational, escape_radius, eval_sphere
from .sphere import all_roots, principal_root, is_infinity


@dataclass(frozen=True)
class PowerSeries:
    """Truncated power series; coeffs[k] is the coefficient of z^k."""

    coeffs: tuple[complex, ...]

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative_at(self, z: complex) -> complex:
        acc = 0j
        for k in range(len(self.coeffs) - 1, 0, -1):
            acc = acc * z + k * self.coeffs[k]
        return acc


@dataclass(frozen=True)
class SuperattractingGerm:
    """Polynomial germ a_m z^m + ... with a0 = a1 = 0, m >= 2, a_m != 0."""

    poly: Polynomial

    def __post_init__(self):
        c = self.poly.coeffs
        if len(c) < 3 or c[0] != 0 or c[1] != 0:
            raise ValueError("germ needs a0 = a1 = 0 and degree >= 2")
        if all(v == 0 for v in c[2:]):
            raise ValueError("germ is identically zero")

    @property
    def order(self) -> int:
        """Lowest nonzero degree m (the local power at the fixed point)."""
        for k, v in enumerate(self.poly.coeffs):
            if v != 0:
                return k
        raise AssertionError

    @property
    def leading_at_order(self) -> complex:
        return self.poly.coeffs[self.order]

    def __call__(self, z: complex) -> complex:
        return self.poly(z)


@dataclass(frozen=True)
class BoettcherChart:
    """Conjugacy data at a superattracting fixed point.

    `series` solves F(g(w)) = F(w)^m for the normalized germ g = c f(z/c);
    `scale` is that conjugating factor c, and `residual` the maximal defect
    of the functional equation on the validation circle.
    """

    series: PowerSeries
    scale: complex
    residual: float
    order: int
    r_test: float

    @property
    def is_valid(self) -> bool:
        return self.residual < 1e-6

    def evaluate_normalized(self, w: complex) -> complex:
        return self.series(w)

    def evaluate(self, z: complex) -> complex:
        """Chart of the original germ: F_g(c z) / c."""
        return self.series(self.scale * z) / self.scale


def normalize_superattracting(germ: SuperattractingGerm) -> tuple[SuperattractingGerm, complex]:
    """Conjugate by z -> cz with c^(m-1) = a_m so the germ becomes monic at order m."""
    m = germ.order
    a_m = germ.leading_at_order
    c = principal_root(a_m, m - 1)
    coeffs = list(germ.poly.scaled_conjugate(c).coeffs)
    coeffs[m] = 1.0 + 0j  # exact by construction; clear rounding residue
    return SuperattractingGerm(Polynomial(coeffs)), c


def _mul_trunc(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return np.convolve(a, b)[:n + 1]


def boettcher_series(germ: SuperattractingGerm, order: int = 16) -> PowerSeries:
    """Coefficients of F(z) = z + b2 z^2 + ... solving F(f(z)) = F(z)^m.

    Requires the germ normalized (a_m = 1).  Each b_(j+1) is forced by
    matching the coefficient of z^(m+j): it enters the power side linearly
    with factor m and does not yet enter the composition side.
    """
    m = germ.order
    if abs(germ.leading_at_order - 1.0) > 1e-12:
        raise ValueError("series solver needs a_m = 1; normalize first")
    if order < 1:
        raise ValueError("order must be >= 1")
    n_work = m * (order + 1)  # compositions never need degrees beyond this
    f = np.zeros(n_work + 1, dtype=np.complex128)
    fc = germ.poly.as_array()
    f[:len(fc)] = fc[:n_work + 1]
    b = np.zeros(order + 1, dtype=np.complex128)
    b[1] = 1.0

    def compose_with_f(upto: int) -> np.ndarray:
        # sum_k b_k f(z)^k truncated at degree `upto`, by Horner in f
        acc = np.array([b[order]], dtype=np.complex128)
        for k in range(order - 1, 0, -1):
            acc = _mul_trunc(acc, f[:upto + 1], upto)
            acc[0] += b[k]
        return _mul_trunc(acc, f[:upto + 1], upto)

    def power_of_series(upto: int) -> np.ndarray:
        base = np.zeros(upto + 1, dtype=np.complex128)
        take = min(order, upto)
        base[:take + 1] = b[:take + 1]
        acc = np.ones(1, dtype=np.complex128)
        for _ in range(m):
            acc = _mul_trunc(acc, base, upto)
        return acc

    for j in range(1, order):
        target = m + j
        lhs = compose_with_f(target)
        rhs = power_of_series(target)
        lv = lhs[target] if len(lhs) > target else 0j
        rv = rhs[target] if len(rhs) > target else 0j
        b[j + 1] = (lv - rv) / m
    return PowerSeries(tuple(complex(v) for v in b))


def boettcher_chart(germ: SuperattractingGerm, order: int = 16,
                    r_test: float = 0.05, n_test: int = 256) -> BoettcherChart:
    """Normalize, solve the series, and measure the equation defect on |w| = r_test."""
    g, scale = normalize_superattracting(germ)
    series = boettcher_series(g, order)
    m = g.order
    ang = 2.0 * np.pi * np.arange(n_test) / n_test
    w = r_test * np.exp(1j * ang)
    fw = np.array([g.poly(complex(v)) for v in w])
    lhs = np.array([series(complex(v)) for v in fw])
    rhs = np.array([series(complex(v)) for v in w]) ** m
    residual = float(np.abs(lhs - rhs).max())
    return BoettcherChart(series, scale, residual, m, r_test)


def _tracked_root_strict(z: complex, n: int, reference: complex) -> complex:
    """tracked_root plus an ambiguity check against near-equidistant branches."""
    roots = all_roots(z, n)
    dists = sorted((abs(r - reference), k) for k, r in enumerate(roots))
    best, second = dists[0], dists[1] if len(dists) > 1 else (math.inf, -1)
    if n > 1 and roots[0] != 0:
        spacing = 2.0 * math.sin(math.pi / n) * abs(roots[0])
        if (second[0] - best[0]) < 1e-9 * spacing:
            raise BranchAmbiguity(
                f"two {n}-th-root branches equidistant from reference {reference}")
    return roots[best[1]]


def _tower_limit(orbit: list[complex], m: int, tol: float) -> complex:
    """lim (orbit[n])^(1/m^n) with branches tracked backwards along the orbit."""
    prev = orbit[0]
    for n in range(1, len(orbit)):
        y = orbit[n]
        for k in range(n - 1, -1, -1):
            y = _tracked_root_strict(y, m, orbit[k])
        if abs(y - prev) < tol:
            return y
        prev = y
    return prev


def boettcher_limit(germ: SuperattractingGerm, z: complex, n_max: int = 64) -> complex:
    """F(z) as the limit of m^n-th roots of f^n(z), branch-tracked.

    Raises DivergedOrbit when the orbit leaves the unit disk.
    """
    m = germ.order
    if abs(germ.leading_at_order - 1.0) > 1e-12:
        raise ValueError("limit construction needs a_m = 1; normalize first")
    z = complex(z)
    orbit = [z]
    for _ in range(n_max):
        nxt = germ.poly(orbit[-1])
        if abs(nxt) >= 1.0:
            raise DivergedOrbit(f"orbit left the unit disk at |z| = {abs(nxt):.3g}")
        orbit.append(nxt)
    return _tower_limit(orbit, m, 1e-12)


def boettcher_at_infinity(p: Polynomial, z: complex, n_max: int = 64) -> complex:
    """Chart at the superattracting point at infinity: lim (p^n(z))^(1/d^n).

    p must be monic of degree >= 2 and z outside its escape radius.
    """
    d = p.degree
    if d < 2:
        raise ValueError("need degree >= 2")
    if abs(p.leading - 1.0) > 1e-12:
        raise ValueError("chart at infinity needs a monic polynomial")
    z = complex(z)
    if abs(z) < escape_radius(p):
        raise ValueError("point must lie beyond the escape radius")
    orbit = [z]
    for _ in range(n_max):
        if abs(orbit[-1]) > 1e100:
            break
        orbit.append(p(orbit[-1]))
    return _tower_limit(orbit, d, 1e-12)


def green_values(p: Polynomial, zs, max_iter: int = 256) -> np.ndarray:
    """Escape rates lim log|p^n(z)|/d^n for an array of points (0 if bounded)."""
    d = p.degree
    if d < 2:
        raise ValueError("need degree >= 2")
    if abs(p.leading - 1.0) > 1e-12:
        raise ValueError("escape rate implemented for monic polynomials")
    zs = np.asarray(zs, dtype=np.complex128)
    coeffs = p.as_array()
    return impl.green_batch(coeffs.real.copy(), coeffs.imag.copy(),
                            zs.real.copy(), zs.imag.copy(),
                            1e12, int(max_iter), d)


def green_function(p: Polynomial, z: complex, max_iter: int = 256) -> float:
    return float(green_values(p, [complex(z)], max_iter)[0])


def _check_fixed_point(f: RationalMap, alpha: complex) -> complex:
    img = eval_sphere(f, alpha)
    if is_infinity(img) or abs(img - alpha) > 1e-9 * (1.0 + abs(alpha)):
        raise ValueError(f"{alpha} is not a fixed point of the map")
    return f.derivative_value(alpha)


def koenigs_with_count(f: MapLike, alpha: complex, z: complex,
                       n_max: int = 512) -> tuple[complex, int]:
    """Linearizer value together with the number of orbit steps used."""
    f = as_rational(f)
    alpha = complex(alpha)
    lam = _check_fixed_point(f, alpha)
    if abs(lam) <= 1e-10:
        raise ValueError("fixed point is superattracting; use the conjugacy chart")
    if abs(lam) >= 1.0 - 1e-8:
        raise ValueError("fixed point is not attracting")
    w = complex(z)
    lam_pow = 1.0 + 0j
    prev = None
    for k in range(n_max):
        est = (w - alpha) / lam_pow
        if prev is not None and abs(est - prev) <= 1e-10 * (1.0 + abs(est)):
            return est, k
        prev = est
        nxt = eval_sphere(f, w)
        if is_infinity(nxt) or abs(nxt - alpha) > 1e8:
            raise NotInBasin(f"orbit of {z} escapes the basin of {alpha}")
        w = nxt
        lam_pow *= lam
    raise NotInBasin(f"orbit of {z} did not stabilize in {n_max} steps")


def koenigs_linearizer(f: MapLike, alpha: complex, z: complex,
                       n_max: int = 512) -> complex:
    """Linearizing coordinate sigma with sigma(f(z)) = lambda sigma(z), sigma'(alpha) = 1.

    Computed as lim (f^n(z) - alpha)/lambda^n; raises NotInBasin when the
    orbit fails to stabilize within n_max steps.
    """
    return koenigs_with_count(f, alpha, z, n_max)[0]


def abel_with_count(f: MapLike, g: Polynomial, alpha: complex, z: complex,
                    n_max: int = 100000) -> tuple[complex, int]:
    """Telescoping solution together with the number of terms summed."""
    f = as_rational(f)
    alpha = complex(alpha)
    lam = _check_fixed_point(f, alpha)
    if abs(lam) >= 1.0 - 1e-8:
        raise ValueError("fixed point is not attracting")
    if abs(g(alpha)) > 1e-12:
        raise NonSummable(f"|g(alpha)| = {abs(g(alpha)):.3g} != 0")
    w = complex(z)
    acc = 0j
    tail_factor = 1.0 - abs(lam)
    for k in range(n_max):
        val = g(w)
        acc -= val
        if abs(val) / tail_factor < 1e-10:
            return acc, k + 1
        nxt = eval_sphere(f, w)
        if is_infinity(nxt) or abs(nxt - alpha) > 1e8:
            raise NotInBasin(f"orbit of {z} escapes the basin of {alpha}")
        w = nxt
    raise NotInBasin(f"series did not meet its tail bound in {n_max} terms")


def abel_solve(f: MapLike, g: Polynomial, alpha: complex, z: complex,
               n_max: int = 100000) -> complex:
    """Solution psi(z) = -sum g(f^k(z)) of psi(f(z)) - psi(z) = g(z).

    Requires an attracting fixed point alpha with g(alpha) = 0 (otherwise
    the series cannot converge: NonSummable), and z in the basin.
    """
    return abel_with_count(f, g, alpha, z, n_max)[0]


@dataclass(frozen=True)
class LinearSystemSolution:
    values: tuple[complex, ...]
    residual: float
    iterations: int


def _matrix_at(a_polys: Sequence[Sequence[Polynomial]], z: complex) -> np.ndarray:
    n = len(a_polys)
    out = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        if len(a_polys[i]) != n:
            raise ValueError("coefficient matrix must be square")
        for j in range(n):
            out[i, j] = a_polys[i][j](z)
    return out


def _find_attractor(f: RationalMap, z: complex, n_max: int) -> complex:
    w = complex(z)
    for _ in range(n_max):
        nxt = eval_sphere(f, w)
        if is_infinity(nxt) or abs(nxt) > 1e8:
            raise NotInBasin(f"orbit of {z} does not approach a finite fixed point")
        if abs(nxt - w) <= 1e-13 * (1.0 + abs(w)):
            return nxt
        w = nxt
    raise NotInBasin(f"orbit of {z} did not settle in {n_max} steps")


def _product_vector(a_polys, f: RationalMap, z: complex, seed: np.ndarray,
                    n_max: int) -> tuple[np.ndarray, int]:
    w = complex(z)
    u_prev = seed.copy()
    prod = np.eye(len(seed), dtype=np.complex128)
    for k in range(1, n_max + 1):
        prod = prod @ _matrix_at(a_polys, w)
        u = prod @ seed
        if not np.isfinite(u.view(np.float64)).all() or np.abs(u).max() > 1e12:
            raise NoConvergence("matrix product diverges along the orbit")
        if np.abs(u - u_prev).max() < 1e-10:
            return u, k
        u_prev = u
        nxt = eval_sphere(f, w)
        if is_infinity(nxt):
            raise NotInBasin("orbit reached infinity")
        w = nxt
    raise NoConvergence(f"product did not settle in {n_max} factors")


def linear_system_solve(a_polys: Sequence[Sequence[Polynomial]], f: MapLike,
                        z: complex, seed: Sequence[complex],
                        n_max: int = 100000) -> LinearSystemSolution:
    """Infinite-product solution of U_i(z) = sum_j A_ij(z) U_j(F(z)).

    Only the attracting-basin regime is implemented: the orbit of z must
    settle at a fixed point alpha with spectral radius of A(alpha) below 1,
    or A(alpha) must have an eigenvalue 1 (the constant-solution case);
    anything else raises NoConvergence.
    """
    f = as_rational(f)
    z = complex(z)
    v = np.asarray([complex(s) for s in seed], dtype=np.complex128)
    if len(a_polys) != len(v):
        raise ValueError("seed length must match the system size")
    alpha = _find_attractor(f, z, n_max)
    eigs = np.linalg.eigvals(_matrix_at(a_polys, alpha))
    rho = float(np.abs(eigs).max())
    has_unit = bool((np.abs(eigs - 1.0) < 1e-8).any())
    if rho >= 1.0 + 1e-8 and not has_unit:
        raise NoConvergence(
            f"spectral radius {rho:.6g} of A(alpha) admits no convergent product")
    u, iters = _product_vector(a_polys, f, z, v, n_max)
    fz = eval_sphere(f, z)
    if is_infinity(fz):
        raise NotInBasin("f(z) is the point at infinity")
    u_next, _ = _product_vector(a_polys, f, complex(fz), v, n_max)
    residual = float(np.abs(u - _matrix_at(a_polys, z) @ u_next).max())
    return LinearSystemSolution(tuple(complex(x) for x in u), residual, iters)
