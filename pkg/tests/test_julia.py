import math

import numpy as np
import pytest

from boettcher.errors import (DepthCapExceeded, EmptyCloud,
                              NoRepellingFixedPoint)
from boettcher.funceq import green_values
from boettcher.julia import (CONNECTED_CANDIDATE, DUST_CANDIDATE,
                             Viewport, basin_backward,
                             basin_level_sizes, chaotic_probe, chebyshev_like,
                             connectivity_probe, escape_time_grid,
                             hausdorff_distance, inverse_iteration,
                             lattes_example, monomial, periodic_density_report,
                             quadratic, sphere_cover_fraction)
from boettcher.maps import Polynomial
from boettcher.sphere import INFINITY, is_infinity

Z2 = monomial(2)


def test_chebyshev_construction():
    assert chebyshev_like(2).coeffs == (-2 + 0j, 0j, 1 + 0j)
    assert chebyshev_like(3).coeffs == (0j, -3 + 0j, 0j, 1 + 0j)
    # semantic oracle: f_d(w + 1/w) = w^d + w^-d
    for d in (2, 3, 4, 5):
        f = chebyshev_like(d)
        for w in (1.3 + 0.4j, 0.8 - 0.1j, 2.0 + 0j):
            lhs = f(w + 1 / w)
            rhs = w ** d + w ** (-d)
            assert lhs == pytest.approx(rhs, rel=1e-12)


def test_lattes_values():
    f = lattes_example()
    assert f(1j) == pytest.approx(0.0, abs=1e-15)  # (i^2+1)^2 = 0
    assert is_infinity(f(0j))       # pole at 0
    assert is_infinity(f(1 + 0j))   # pole at 1
    assert is_infinity(f(INFINITY))  # deg num > deg den


def _single_pixel_grid(p, z, max_iter=50):
    vp = Viewport(z, 1e-9, 1e-9, 1, 1)
    return escape_time_grid(p, vp, max_iter).data[0, 0]


def test_escape_grid_examples():
    assert _single_pixel_grid(Z2, 2 + 0j) == 1   # |2| = R fails, |4| > 2 at n=1
    assert _single_pixel_grid(Z2, 0.5 + 0j) == 51
    # real orbit of z^2-2 from 0.5 stays inside [-2, 2]: direct iteration oracle
    z = 0.5
    for _ in range(100):
        z = z * z - 2
        assert abs(z) <= 2.0 + 1e-12
    assert _single_pixel_grid(chebyshev_like(2), 0.5 + 0j, 64) == 65


def test_escape_grid_forward_invariance():
    p = Polynomial((-1, 0, 1))
    vp = Viewport(0j, 2.0, 2.0, 160, 160)
    grid = escape_time_grid(p, vp, 128)
    xs, ys = vp.pixel_axes()
    bounded = grid.data > 128
    hits = 0
    total = 0
    for i in range(0, 160, 3):
        for j in range(0, 160, 3):
            if not bounded[i, j]:
                continue
            w = p(complex(xs[j], ys[i]))
            jj = int(round((w.real - xs[0]) / (xs[1] - xs[0])))
            ii = int(round((w.imag - ys[0]) / (ys[1] - ys[0])))
            if 0 <= ii < 160 and 0 <= jj < 160:
                total += 1
                hits += bool(bounded[ii, jj])
    assert total > 100
    assert hits / total > 0.95


def test_escape_grid_deterministic_across_threads():
    p = quadratic(-0.75 + 0.1j)
    vp = Viewport(0j, 1.8, 1.8, 120, 90)
    a = escape_time_grid(p, vp, 100, threads=1)
    b = escape_time_grid(p, vp, 100, threads=4)
    c = escape_time_grid(p, vp, 100, threads=3)
    assert np.array_equal(a.data, b.data)
    assert np.array_equal(a.data, c.data)


def test_inverse_iteration_unit_circle():
    cloud = inverse_iteration(Z2, 4000, rng_seed=3)
    assert len(cloud) == 4000
    assert np.abs(np.abs(cloud.points) - 1.0).max() < 1e-9


def test_inverse_iteration_cubic_circle():
    cloud = inverse_iteration(monomial(3), 4000, rng_seed=5)
    assert np.abs(np.abs(cloud.points) - 1.0).max() < 1e-9


def test_inverse_iteration_chebyshev_segment():
    cloud = inverse_iteration(chebyshev_like(2), 4000, rng_seed=1)
    pts = cloud.points
    assert np.abs(pts.imag).max() < 1e-7
    assert pts.real.min() > -2 - 1e-7
    assert pts.real.max() < 2 + 1e-7


def test_inverse_iteration_julia_membership_by_green():
    c = -0.1 + 0.1j
    cloud = inverse_iteration(quadratic(c), 3000, rng_seed=9)
    g = green_values(quadratic(c), cloud.points)
    assert np.abs(g).max() < 1e-5


def test_inverse_iteration_reproducible():
    a = inverse_iteration(quadratic(-1), 2000, rng_seed=42)
    b = inverse_iteration(quadratic(-1), 2000, rng_seed=42)
    c = inverse_iteration(quadratic(-1), 2000, rng_seed=43)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    assert a.rng_seed == 42


def test_inverse_iteration_requires_repelling_fixed_point():
    with pytest.raises(NoRepellingFixedPoint):
        inverse_iteration(quadratic(0.25), 100)


def test_basin_backward_exact_radii():
    cloud = basin_backward(Z2, 0j, 3, radius=0.1, circle_samples=32)
    sizes = basin_level_sizes(2, 3, 32)
    assert [32 * 2, 32 * 4, 32 * 8] == sizes
    assert len(cloud.points) == sum(sizes)
    start = 0
    for k, size in enumerate(sizes, start=1):
        layer = cloud.points[start:start + size]
        start += size
        expected = 0.1 ** (1.0 / 2 ** k)
        assert np.abs(np.abs(layer) - expected).max() < 1e-12


def test_basin_backward_outer_layer_approaches_circle():
    cloud = basin_backward(Z2, 0j, 12, radius=0.1, circle_samples=8)
    sizes = basin_level_sizes(2, 12, 8)
    outer = cloud.points[-sizes[-1]:]
    assert np.abs(np.abs(outer) - 1.0).max() < 1e-3


def test_basin_backward_stays_in_basin():
    p = Polynomial((-0.5, 0, 1))
    alpha = min(np.roots([1, -1, -0.5]), key=abs)  # fixed point near -0.366
    cloud = basin_backward(p, complex(alpha), 8, circle_samples=16)
    g = green_values(p, cloud.points)
    assert np.abs(g).max() < 1e-3


def test_basin_backward_validation():
    with pytest.raises(ValueError):
        basin_backward(Z2, 1 + 0j, 3)  # repelling fixed point
    with pytest.raises(ValueError):
        basin_backward(Z2, 0.5 + 0j, 3)  # not fixed
    with pytest.raises(DepthCapExceeded):
        basin_backward(Z2, 0j, 19)


def test_density_report_z2_period3():
    rep = periodic_density_report(Z2, 3)
    row = rep.rows[2]
    assert row.period == 3 and row.count == 6
    assert row.max_distance < 1e-9
    assert row.max_gap == pytest.approx(2 * math.pi / 7, abs=1e-9)


def test_density_report_z2_period1():
    rep = periodic_density_report(Z2, 1)
    row = rep.rows[0]
    # the superattracting origin is not repelling, so only z = 1 remains
    assert row.count == 1
    assert row.max_distance < 1e-12
    assert row.max_gap == pytest.approx(2 * math.pi)


def test_density_report_chebyshev_period2():
    rep = periodic_density_report(chebyshev_like(2), 2)
    row = rep.rows[1]
    # quartic oracle: f^2(z) = z factors as (z^2-z-2)(z^2+z-1);
    # the 2-cycle is the golden pair (-1 +- sqrt(5))/2
    s5 = math.sqrt(5)
    assert row.count == 2
    assert row.max_distance < 1e-8
    rep_pts = [(-1 + s5) / 2, (-1 - s5) / 2, 2.0, -1.0]
    union_thetas = sorted(math.acos(x / 2) for x in rep_pts)
    pts = [0.0] + union_thetas + [math.pi]
    expected_gap = max(b - a for a, b in zip(pts, pts[1:]))
    assert row.max_gap == pytest.approx(expected_gap, abs=1e-9)


def test_density_report_rejects_other_maps():
    with pytest.raises(ValueError):
        periodic_density_report(quadratic(-1), 2)


def test_sphere_cover_circle_is_sparse():
    ang = np.exp(2j * np.pi * np.linspace(0, 1, 20000))
    frac = sphere_cover_fraction(ang)
    assert frac < 0.1


def test_chaotic_probe_z2_fails_on_cycles():
    rep = chaotic_probe(Z2, max_period=2, n_samples=4000)
    assert not rep.no_nonrepelling
    assert not rep.chaotic_candidate


def test_chaotic_probe_chebyshev_fails_on_coverage():
    rep = chaotic_probe(chebyshev_like(2), max_period=3, n_samples=20000)
    assert rep.no_nonrepelling
    assert rep.cover_fraction < 0.2
    assert not rep.chaotic_candidate


def test_chaotic_probe_lattes_small_sample():
    rep = chaotic_probe(lattes_example(), max_period=2, n_samples=50000)
    assert rep.no_nonrepelling
    assert rep.cover_fraction > 0.95


def test_connectivity_examples():
    assert connectivity_probe(0j) == CONNECTED_CANDIDATE
    assert connectivity_probe(1 + 0j) == DUST_CANDIDATE
    assert connectivity_probe(-2 + 0j) == CONNECTED_CANDIDATE
    assert connectivity_probe(0.26 + 0j) == DUST_CANDIDATE


def test_hausdorff_examples():
    x = np.array([0.1 + 0.2j, 1 - 1j, 3 + 0j])
    assert hausdorff_distance(x, x) == 0.0
    assert hausdorff_distance(np.array([0j]), np.array([1 + 0j])) == 1.0


def test_hausdorff_rotated_circle_bound():
    n = 1000
    base = np.exp(2j * np.pi * np.arange(n) / n)
    rotated = base * np.exp(1j * np.pi / n)
    d = hausdorff_distance(base, rotated)
    assert d <= 2 * np.pi / n + 1e-9


def test_hausdorff_errors():
    with pytest.raises(EmptyCloud):
        hausdorff_distance(np.array([], dtype=complex), np.array([1 + 0j]))
    with pytest.raises(ValueError):
        hausdorff_distance(np.zeros(30000, dtype=complex), np.array([1 + 0j]))


def test_escape_vs_inverse_iteration_cross_validation():
    # boundary pixels of the escape grid and the backward-iteration cloud
    # describe the same Julia set: Hausdorff distance ~ pixel size
    c = -1 + 0j
    p = quadratic(c)
    vp = Viewport(0j, 2.0, 2.0, 300, 300)
    grid = escape_time_grid(p, vp, 200)
    xs, ys = vp.pixel_axes()
    bounded = grid.data > 200
    boundary = []
    for i in range(1, 299):
        for j in range(1, 299):
            if bounded[i, j] and not (bounded[i - 1, j] and bounded[i + 1, j]
                                      and bounded[i, j - 1] and bounded[i, j + 1]):
                boundary.append(complex(xs[j], ys[i]))
    boundary = np.array(boundary)
    cloud = inverse_iteration(p, 15000, rng_seed=11)
    d = hausdorff_distance(boundary, cloud.points)
    pixel = 2 * vp.half_width / vp.pixels_x
    assert d < 6 * pixel
