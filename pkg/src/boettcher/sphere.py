"""Riemann-sphere points, the chordal metric, and branch-controlled roots.

Finite points are plain Python complex numbers with finite components; the
point at infinity is the module singleton ``INFINITY``.  Floating-point
infinities never appear inside a finite value.
"""

from __future__ import annotations

import cmath
import math
from typing import Union


class _Infinity:
    """Singleton for the point at infinity on the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __eq__(self, other):
        return isinstance(other, _Infinity)

    def __hash__(self):
        return hash("sphere-infinity")


INFINITY = _Infinity()

SpherePoint = Union[complex, _Infinity]


def is_infinity(p: SpherePoint) -> bool:
    return isinstance(p, _Infinity)


def as_finite(p: SpherePoint) -> complex:
    """Return `p` as a complex number, raising on the point at infinity."""
    if is_infinity(p):
        raise ValueError("point at infinity has no finite coordinate")
    return complex(p)


def validate_finite(z: complex) -> complex:
    """Reject NaN/inf components; the sphere encodes infinity separately."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite complex value {z!r}")
    return z


def chordal_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Chordal metric on the sphere: 2|p-q| / sqrt((1+|p|^2)(1+|q|^2)).

    Symmetric, bounded by 2 (attained by antipodal pairs), and equal to
    2/sqrt(1+|p|^2) when q is the point at infinity.
    """
    p_inf, q_inf = is_infinity(p), is_infinity(q)
    if p_inf and q_inf:
        return 0.0
    if p_inf or q_inf:
        finite = q if p_inf else p
        m2 = abs(finite) ** 2
        return 2.0 / math.sqrt(1.0 + m2)
    d = abs(p - q)
    return 2.0 * d / math.sqrt((1.0 + abs(p) ** 2) * (1.0 + abs(q) ** 2))


def principal_root(z: complex, n: int) -> complex:
    """n-th root with argument in (-pi/n, pi/n]; the root of 0 is 0."""
    if n < 1:
        raise ValueError("root order must be >= 1")
    z = complex(z)
    if z == 0:
        return 0j
    if n == 1:
        return z
    # cmath.log uses arguments in (-pi, pi], which maps onto (-pi/n, pi/n].
    return cmath.exp(cmath.log(z) / n)


def all_roots(z: complex, n: int) -> list[complex]:
    """All n-th roots of z, starting from the principal one."""
    base = principal_root(z, n)
    if base == 0:
        return [0j] * n
    rot = cmath.exp(2j * cmath.pi / n)
    out = [base]
    for _ in range(n - 1):
        out.append(out[-1] * rot)
    return out


def tracked_root(z: complex, n: int, reference: complex) -> complex:
    """n-th root of z nearest to `reference`.

    Ties (within 1e-12 relative) are broken by the smallest argument in
    [0, 2pi), so tracked_root(-1, 2, 1) is +i rather than -i.
    """
    roots = all_roots(z, n)
    dists = [abs(r - reference) for r in roots]
    best = min(dists)
    tol = 1e-12 * (best + abs(reference) + 1e-300)
    candidates = [r for r, d in zip(roots, dists) if d <= best + tol]
    if len(candidates) == 1:
        return candidates[0]
    return min(candidates, key=lambda r: cmath.phase(r) % (2.0 * math.pi))
