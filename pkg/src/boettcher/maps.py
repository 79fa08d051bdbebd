"""Polynomials and rational maps: evaluation, derivatives, orbits, critical points.

Polynomials are stored dense (coefficient of z^k at index k); the degrees in
this library stay small enough (<= 4096 after composition) that dense storage
wins on simplicity and numerical transparency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import DegreeCapExceeded
from .sphere import INFINITY, SpherePoint, is_infinity, validate_finite

COMPOSE_DEGREE_CAP = 4096

# Pole test threshold, scale-aware so large |z| does not fake a pole.
_POLE_EPS = 1e-14


def _trim(coeffs: Iterable[complex]) -> tuple[complex, ...]:
    out = [complex(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial with complex coefficients, constant term first."""

    coeffs: tuple[complex, ...]

    def __init__(self, coeffs: Iterable[complex]):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> complex:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __call__(self, z: complex) -> complex:
        """Horner-scheme evaluation."""
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """Coefficients of self(inner(z)); guarded by the degree cap."""
        if not self.is_zero and self.degree >= 1 and not inner.is_zero and inner.degree >= 1:
            if self.degree * inner.degree > COMPOSE_DEGREE_CAP:
                raise DegreeCapExceeded(
                    f"composition degree {self.degree * inner.degree} exceeds cap {COMPOSE_DEGREE_CAP}"
                )
        acc = Polynomial(())
        for c in reversed(self.coeffs):
            acc = acc * inner + Polynomial((c,))
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-1) * other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if self.is_zero or other.is_zero:
                return Polynomial(())
            prod = np.convolve(
                np.asarray(self.coeffs, dtype=np.complex128),
                np.asarray(other.coeffs, dtype=np.complex128),
            )
            return Polynomial(prod.tolist())
        return Polynomial(complex(other) * c for c in self.coeffs)

    __rmul__ = __mul__

    def scaled_conjugate(self, c: complex) -> "Polynomial":
        """Coefficients of c * self(z / c)."""
        c = complex(c)
        return Polynomial(a * c ** (1 - k) for k, a in enumerate(self.coeffs))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs if self.coeffs else (0j,), dtype=np.complex128)

    def __str__(self):
        if self.is_zero:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(f"({c})")
            elif k == 1:
                terms.append(f"({c})*z")
            else:
                terms.append(f"({c})*z^{k}")
        return " + ".join(terms)


X = Polynomial((0, 1))


def poly_eval(p: Polynomial, z: complex) -> complex:
    return p(z)


@dataclass(frozen=True)
class RationalMap:
    """Quotient num/den of polynomials without common roots.

    Common roots are rejected numerically at construction (tolerance 1e-10)
    instead of being cancelled by a polynomial GCD; compositions built
    internally skip the check via validate=False.
    """

    num: Polynomial
    den: Polynomial
    tag: str = field(default="", compare=False)

    def __init__(self, num: Polynomial, den: Polynomial | None = None,
                 tag: str = "", validate: bool = True):
        if den is None:
            den = Polynomial((1,))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "tag", tag or f"({num})/({den})")
        if den.is_zero:
            raise ValueError("denominator is the zero polynomial")
        if self.degree < 1:
            raise ValueError("rational map must have degree >= 1")
        if validate and den.degree >= 1:
            self._check_no_common_roots()

    def _check_no_common_roots(self):
        from .cycles import poly_roots  # deferred: cycles imports maps

        scale = max(abs(c) for c in self.num.coeffs)
        for r in poly_roots(self.den, tol=1e-12):
            if abs(self.num(r)) <= 1e-10 * scale:
                raise ValueError(f"num and den share a root near {r}")

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def poly(self) -> Polynomial:
        if not self.is_polynomial:
            raise ValueError("map is not a polynomial")
        return (1.0 / self.den.coeffs[0]) * self.num

    def __call__(self, p: SpherePoint) -> SpherePoint:
        return eval_sphere(self, p)

    def derivative_value(self, z: complex) -> complex:
        """f'(z) at a finite non-pole point via the Wronskian quotient."""
        w = self.num.derivative() * self.den - self.num * self.den.derivative()
        return w(z) / self.den(z) ** 2

    def wronskian(self) -> Polynomial:
        return self.num.derivative() * self.den - self.num * self.den.derivative()


MapLike = Union[Polynomial, RationalMap]


def as_rational(f: MapLike, tag: str = "") -> RationalMap:
    if isinstance(f, RationalMap):
        return f
    return RationalMap(f, Polynomial((1,)), tag=tag or f"poly:{f}", validate=False)


def eval_sphere(f: MapLike, p: SpherePoint) -> SpherePoint:
    """Evaluate on the sphere: poles map to infinity, infinity by degree rule."""
    f = as_rational(f)
    num, den = f.num, f.den
    if is_infinity(p):
        dn, dd = num.degree, den.degree
        if dn > dd:
            return INFINITY
        if dn < dd:
            return 0j
        return validate_finite(num.leading / den.leading)
    z = complex(p)
    dv = den(z)
    if abs(dv) < _POLE_EPS * max(1.0, abs(z)) ** max(den.degree, 0):
        return INFINITY
    w = num(z) / dv
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        return INFINITY  # value beyond double range lives in the infinity chart
    return w


@dataclass(frozen=True)
class Orbit:
    """Forward orbit (z0, f(z0), f^2(z0), ...) with the map it came from."""

    points: tuple[SpherePoint, ...]
    map_tag: str

    def __len__(self):
        return len(self.points)

    def __getitem__(self, k):
        return self.points[k]


def iterate(f: MapLike, z0: SpherePoint, n: int) -> Orbit:
    """Orbit of length n+1 produced by repeated sphere evaluation."""
    if n < 0:
        raise ValueError("iteration count must be >= 0")
    f = as_rational(f)
    pts = [z0 if is_infinity(z0) else validate_finite(z0)]
    for _ in range(n):
        pts.append(eval_sphere(f, pts[-1]))
    return Orbit(tuple(pts), f.tag)


def compose_rational(outer: RationalMap, inner: RationalMap) -> RationalMap:
    """outer(inner) as a rational map, without the common-root check.

    Written over the common denominator den_inner^(deg outer); used to build
    iterates f^n, whose degree d^n is guarded by the composition cap.
    """
    d = max(outer.num.degree, outer.den.degree)
    if inner.degree * d > COMPOSE_DEGREE_CAP:
        raise DegreeCapExceeded(
            f"composed degree {inner.degree * d} exceeds cap {COMPOSE_DEGREE_CAP}"
        )
    p, q = inner.num, inner.den

    def clear(poly: Polynomial) -> Polynomial:
        # sum_k c_k * p^k * q^(d-k)
        acc = Polynomial(())
        pk = Polynomial((1,))
        powers = [Polynomial((1,))]
        for _ in range(d):
            pk = pk * p
            powers.append(pk)
        qk = Polynomial((1,))
        qpowers = [Polynomial((1,))]
        for _ in range(d):
            qk = qk * q
            qpowers.append(qk)
        for k, c in enumerate(poly.coeffs):
            if c != 0:
                acc = acc + c * (powers[k] * qpowers[d - k])
        return acc

    return RationalMap(clear(outer.num), clear(outer.den),
                       tag=f"{outer.tag}∘{inner.tag}", validate=False)


def iterate_map(f: MapLike, n: int) -> RationalMap:
    """The n-th iterate f^n as a rational map (n >= 1)."""
    if n < 1:
        raise ValueError("iterate order must be >= 1")
    f = as_rational(f)
    acc = f
    for _ in range(n - 1):
        acc = compose_rational(f, acc)
    return acc


def iterate_polynomial(p: Polynomial, n: int) -> Polynomial:
    """The n-th iterate of a polynomial (n >= 1), degree-capped."""
    if n < 1:
        raise ValueError("iterate order must be >= 1")
    acc = p
    for _ in range(n - 1):
        acc = p.compose(acc)
    return acc


def critical_points(f: MapLike) -> list[SpherePoint]:
    """Critical points with multiplicity; always 2*deg - 2 entries.

    Finite ones are the roots of the Wronskian num'*den - num*den'; the point
    at infinity fills in the remaining multiplicity (d-1 of them for a
    polynomial of degree d).
    """
    from .cycles import poly_roots  # deferred: cycles imports maps

    f = as_rational(f)
    d = f.degree
    if d < 2:
        raise ValueError("critical points need degree >= 2")
    w = f.wronskian()
    # Trim numerically-zero leading coefficients so deg(W) counts correctly.
    coeffs = list(w.coeffs)
    scale = max(abs(c) for c in coeffs) if coeffs else 0.0
    while coeffs and abs(coeffs[-1]) <= 1e-12 * scale:
        coeffs.pop()
    w = Polynomial(coeffs)
    finite: list[SpherePoint] = []
    if w.degree >= 1:
        finite = list(poly_roots(w, tol=1e-12))
    inf_mult = (2 * d - 2) - len(finite)
    return finite + [INFINITY] * inf_mult


def escape_radius(p: Polynomial) -> float:
    """Radius beyond which |p(z)| > |z| strictly, certifying escape.

    R = max(1, (1 + sum of lower coefficient magnitudes)/|lead|) + 1.
    """
    if p.degree < 2:
        raise ValueError("escape radius needs degree >= 2")
    lower = sum(abs(c) for c in p.coeffs[:-1])
    return max(1.0, (1.0 + lower) / abs(p.leading)) + 1.0
