import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boettcher.sphere import (INFINITY, all_roots, chordal_distance,
                              is_infinity, principal_root, tracked_root,
                              validate_finite)

from conftest import random_complex

finite_complex = st.builds(
    complex,
    st.floats(-100, 100, allow_nan=False),
    st.floats(-100, 100, allow_nan=False),
)


def test_chordal_zero_to_infinity():
    assert chordal_distance(0j, INFINITY) == 2.0


def test_chordal_identity():
    assert chordal_distance(0.3 + 0.4j, 0.3 + 0.4j) == 0.0
    assert chordal_distance(INFINITY, INFINITY) == 0.0


def test_chordal_antipodal_pair():
    # direct formula: 2*|1-(-1)| / sqrt((1+1)(1+1)) = 4/2 = 2
    assert chordal_distance(1 + 0j, -1 + 0j) == pytest.approx(2.0, abs=1e-15)


def test_chordal_symmetric_and_bounded(rng):
    pts = list(random_complex(rng, 40, 5.0)) + [INFINITY]
    for p in pts:
        for q in pts:
            d = chordal_distance(p, q)
            assert 0.0 <= d <= 2.0 + 1e-15
            assert d == pytest.approx(chordal_distance(q, p), abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(finite_complex, finite_complex, finite_complex)
def test_chordal_triangle_inequality(a, b, c):
    assert chordal_distance(a, c) <= (
        chordal_distance(a, b) + chordal_distance(b, c) + 1e-12)


def test_chordal_triangle_inequality_with_infinity(rng):
    pts = list(random_complex(rng, 30, 3.0))
    for a in pts[:10]:
        for b in pts[10:20]:
            assert chordal_distance(a, INFINITY) <= (
                chordal_distance(a, b) + chordal_distance(b, INFINITY) + 1e-12)


def test_chordal_inversion_isometry(rng):
    # reflection through the unit circle z -> 1/conj(z) is a sphere isometry
    ps = random_complex(rng, 50, 4.0) + 0.05
    qs = random_complex(rng, 50, 4.0) + 0.1j
    for p, q in zip(ps, qs):
        p, q = complex(p), complex(q)
        lhs = chordal_distance(p, q)
        rhs = chordal_distance(1 / p.conjugate(), 1 / q.conjugate())
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_principal_root_examples():
    assert principal_root(1 + 0j, 4) == pytest.approx(1.0, abs=1e-15)
    assert principal_root(-1 + 0j, 2) == pytest.approx(1j, abs=1e-15)
    assert principal_root(16 + 0j, 4) == pytest.approx(2.0, abs=1e-14)
    assert principal_root(0j, 7) == 0


def test_principal_root_argument_range(rng):
    for z in random_complex(rng, 100, 10.0):
        for n in (2, 3, 5):
            r = principal_root(complex(z), n)
            assert -math.pi / n < cmath.phase(r) <= math.pi / n + 1e-15
            assert r ** n == pytest.approx(z, rel=1e-12)


def test_tracked_root_examples():
    assert tracked_root(-1 + 0j, 2, 1j) == pytest.approx(1j, abs=1e-15)
    assert tracked_root(-1 + 0j, 2, -1j) == pytest.approx(-1j, abs=1e-15)
    w = cmath.exp(2j * cmath.pi / 3)
    assert tracked_root(1 + 0j, 3, w) == pytest.approx(w, abs=1e-14)


def test_tracked_root_tie_break():
    # both square roots of -1 are equidistant from 1; the tie goes to the
    # candidate with the smaller argument in [0, 2*pi), which is +i
    assert tracked_root(-1 + 0j, 2, 1 + 0j) == pytest.approx(1j, abs=1e-15)


@settings(max_examples=150, deadline=None)
@given(finite_complex, finite_complex, st.integers(1, 6))
def test_tracked_root_is_a_root(z, ref, n):
    if z == 0:
        return
    r = tracked_root(z, n, ref)
    assert r ** n == pytest.approx(z, rel=1e-12)


def test_all_roots_count_and_values(rng):
    for z in random_complex(rng, 20, 3.0):
        roots = all_roots(complex(z), 5)
        assert len(roots) == 5
        for r in roots:
            assert r ** 5 == pytest.approx(z, rel=1e-11)


def test_validate_finite_rejects_nan_inf():
    with pytest.raises(ValueError):
        validate_finite(complex(float("nan"), 0))
    with pytest.raises(ValueError):
        validate_finite(complex(0, float("inf")))
    assert validate_finite(1 + 2j) == 1 + 2j


def test_infinity_singleton():
    assert is_infinity(INFINITY)
    assert not is_infinity(0j)
    assert repr(INFINITY) == "inf"
