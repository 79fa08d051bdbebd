"""Acceptance suite: one test per criterion, at the stated tolerance and
runtime budget.  Run with `pytest tests/test_acceptance.py -s` to see one
pass line per criterion."""

import cmath
import json
import math
import subprocess
import sys
import time

import numpy as np

from boettcher.cycles import (REPELLING, count_nonrepelling_cycles,
                              misiurewicz_check, periodic_points)
from boettcher.funceq import (SuperattractingGerm, abel_solve,
                              boettcher_limit, boettcher_series,
                              koenigs_linearizer, linear_system_solve)
from boettcher.julia import (basin_backward, basin_level_sizes, chaotic_probe,
                             chebyshev_like, inverse_iteration,
                             lattes_example, monomial,
                             periodic_density_report, quadratic)
from boettcher.maps import Polynomial
from boettcher.rng import splitmix64, uniform01, xorshift64

GERMS = {
    "z^2+z^3": SuperattractingGerm(Polynomial((0, 0, 1, 1))),
    "z^2+0.1z^4": SuperattractingGerm(Polynomial((0, 0, 1, 0, 0.1))),
    "z^3+z^5": SuperattractingGerm(Polynomial((0, 0, 0, 1, 0, 1))),
}


# Runtime budgets are pinned for the shipped configuration (compiled core).
# The pure-python fallback is functionally identical but slower; it gets a
# documented 10x allowance so the suite still bounds its runtime.
from boettcher import backend_name

_BUDGET_FACTOR = 1.0 if backend_name() == "cython" else 10.0


class Budget:
    def __init__(self, number, name, seconds):
        self.number = number
        self.name = name
        self.seconds = seconds * _BUDGET_FACTOR

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        status = "PASS" if exc_type is None else "FAIL"
        print(f"[acceptance] {self.number:02d} {self.name}: {status} "
              f"({elapsed:.2f} s, budget {self.seconds} s)")
        if exc_type is None:
            assert elapsed < self.seconds, (
                f"criterion {self.number} exceeded its {self.seconds}s budget "
                f"({elapsed:.2f}s)")
        return False


def circle_points(radius, n):
    return radius * np.exp(2j * np.pi * np.arange(n) / n)


def test_criterion_01_boettcher_equation_residual():
    with Budget(1, "conjugacy equation residual", 1.0):
        for name, germ in GERMS.items():
            series = boettcher_series(germ, order=16)
            m = germ.order
            worst = 0.0
            for z in circle_points(0.05, 360):
                z = complex(z)
                defect = abs(series(germ(z)) - series(z) ** m)
                worst = max(worst, defect)
            assert worst < 1e-8, (name, worst)


def test_criterion_02_series_limit_agreement():
    with Budget(2, "series vs iterative limit", 1.0):
        for name, germ in GERMS.items():
            series = boettcher_series(germ, order=16)
            for z in circle_points(0.05, 100):
                z = complex(z)
                assert abs(series(z) - boettcher_limit(germ, z)) < 1e-6, name


def test_criterion_03_pure_square_identity_chart():
    with Budget(3, "z^2 chart is the identity", 0.1):
        series = boettcher_series(SuperattractingGerm(Polynomial((0, 0, 1))), 16)
        assert max(abs(c) for c in series.coeffs[2:]) < 1e-12


def test_criterion_04_hand_derived_coefficients():
    with Budget(4, "derived b2, b3 for z^2+z^3", 1.0):
        # coefficient-matching oracle, done by hand before trusting the solver:
        #   [z^3] F(f) = 1, [z^3] F^2 = 2 b2        => b2 = 1/2
        #   [z^4] F(f) = b2, [z^4] F^2 = b2^2 + 2 b3 => b3 = (1/2 - 1/4)/2 = 1/8
        series = boettcher_series(GERMS["z^2+z^3"], order=16)
        assert abs(series.coeffs[2] - 0.5) < 1e-12
        assert abs(series.coeffs[3] - 0.125) < 1e-12


def test_criterion_05_monomial_julia_on_unit_circle():
    with Budget(5, "inverse iteration on monomials", 2.0):
        for m in (2, 3):
            cloud = inverse_iteration(monomial(m), 100000, rng_seed=1)
            assert len(cloud) == 100000
            assert np.abs(np.abs(cloud.points) - 1.0).max() < 1e-9


def test_criterion_06_chebyshev_julia_on_segment():
    with Budget(6, "inverse iteration on the segment", 2.0):
        cloud = inverse_iteration(chebyshev_like(2), 100000, rng_seed=1)
        pts = cloud.points
        assert np.abs(pts.imag).max() < 1e-7
        assert pts.real.min() > -2 - 1e-7
        assert pts.real.max() < 2 + 1e-7


def test_criterion_07_periodic_point_density():
    with Budget(7, "density of periodic points for z^2", 5.0):
        z2 = monomial(2)
        report = periodic_density_report(z2, 10)
        cycles_by_period = {q: periodic_points(z2, q) for q in range(1, 11)}
        for n in range(1, 11):
            order = 2 ** n - 1
            union = [p for q in range(1, n + 1) if n % q == 0
                     for cyc in cycles_by_period[q] for p in cyc.points
                     if cyc.classification == REPELLING]
            assert len(union) == order
            for p in union:
                k = round(cmath.phase(p) * order / (2 * math.pi))
                assert abs(p - cmath.exp(2j * math.pi * k / order)) < 1e-9
            row = report.rows[n - 1]
            assert abs(row.max_gap - 2 * math.pi / order) < 1e-9
            assert row.max_distance < 1e-9


def test_criterion_08_critical_point_bound():
    with Budget(8, "non-repelling cycles vs critical bound", 60.0):
        state = splitmix64(2026)
        for _ in range(100):
            state = xorshift64(state)
            u1 = uniform01(state)
            state = xorshift64(state)
            u2 = uniform01(state)
            c = 2.0 * math.sqrt(u1) * cmath.exp(2j * math.pi * u2)
            report = count_nonrepelling_cycles(quadratic(c), 8)
            assert report.count <= 1, (c, report.count)
            assert report.bound == 1


def test_criterion_09_everywhere_chaotic_probe():
    with Budget(9, "everywhere-chaotic probe", 30.0):
        lat = chaotic_probe(lattes_example(), max_period=4, n_samples=1000000,
                            rng_seed=1)
        assert lat.no_nonrepelling
        assert lat.cover_fraction > 0.99
        assert lat.chaotic_candidate
        sq = chaotic_probe(monomial(2), max_period=4, n_samples=100000)
        assert not sq.chaotic_candidate  # superattracting fixed point
        cheb = chaotic_probe(chebyshev_like(2), max_period=4, n_samples=100000)
        assert cheb.no_nonrepelling and cheb.cover_fraction < 0.99
        assert not cheb.chaotic_candidate


def test_criterion_10_abel_equation():
    with Budget(10, "additive conjugacy", 1.0):
        f = Polynomial((0, 0.5))
        g = Polynomial((0, 1))
        for z in circle_points(0.7, 100):
            z = complex(z)
            assert abs(abel_solve(f, g, 0j, z) - (-2 * z)) < 1e-10
        g2 = Polynomial((0, 0, 1))
        for z in circle_points(0.5, 20):
            z = complex(z)
            psi_z = abel_solve(f, g2, 0j, z)
            psi_fz = abel_solve(f, g2, 0j, 0.5 * z)
            assert abs(psi_fz - psi_z - g2(z)) < 1e-8


def test_criterion_11_koenigs_residual():
    with Budget(11, "linearizer residual", 1.0):
        f = Polynomial((0, 0.5, 1))
        for z in circle_points(0.08, 100):
            z = complex(z)
            sigma_z = koenigs_linearizer(f, 0j, z)
            sigma_fz = koenigs_linearizer(f, 0j, f(z))
            assert abs(sigma_fz - 0.5 * sigma_z) < 1e-7


def test_criterion_12_linear_functional_system():
    with Budget(12, "first-order linear system", 1.0):
        a = [[Polynomial((0.5,)), Polynomial((0, 1))],
             [Polynomial(()), Polynomial((1.0 / 3.0,))]]
        f = Polynomial((0, 0.5))
        sol = linear_system_solve(a, f, 0.4 + 0j, [1 + 0j, 1 + 0j])
        assert sol.residual < 1e-7
        const = linear_system_solve([[Polynomial((1,))]], f, 0.4 + 0j, [3 - 2j])
        assert const.values[0] == 3 - 2j


def test_criterion_13_misiurewicz_detection():
    with Budget(13, "strictly preperiodic critical orbits", 0.1):
        rec = misiurewicz_check(-2 + 0j)
        assert (rec.preperiod, rec.period) == (2, 1)
        rec = misiurewicz_check(1j)
        assert (rec.preperiod, rec.period) == (2, 2)
        assert misiurewicz_check(0j) is None


def test_criterion_14_basin_by_backward_iteration():
    with Budget(14, "attracting basin preimage tree", 2.0):
        cloud = basin_backward(monomial(2), 0j, 12, radius=0.1,
                               circle_samples=64)
        sizes = basin_level_sizes(2, 12, 64)
        start = 0
        for k, size in enumerate(sizes, start=1):
            layer = cloud.points[start:start + size]
            start += size
            expected = 0.1 ** (1.0 / 2 ** k)
            assert np.abs(np.abs(layer) - expected).max() < 1e-9
        outer = cloud.points[-sizes[-1]:]
        assert np.abs(np.abs(outer) - 1.0).max() < 1e-3


def test_criterion_15_cli_determinism(tmp_path):
    with Budget(15, "end-to-end determinism", 10.0):
        def run(args):
            proc = subprocess.run([sys.executable, "-m", "boettcher", *args],
                                  capture_output=True, text=True, cwd=tmp_path)
            assert proc.returncode == 0, proc.stderr
            return proc

        render = ["render", "--quadratic-c", "-0.75,0.1", "--center", "0,0",
                  "--half", "1.6", "--px", "400", "--py", "300",
                  "--max-iter", "128", "--out", "det.ppm"]
        run(render + ["--threads", "1"])
        img1 = (tmp_path / "det.ppm").read_bytes()
        run(render + ["--threads", "4"])
        img2 = (tmp_path / "det.ppm").read_bytes()
        run(render + ["--threads", "2"])
        img3 = (tmp_path / "det.ppm").read_bytes()
        assert img1 == img2 == img3

        sample = ["julia-sample", "--quadratic-c", "-1,0", "--n", "20000",
                  "--seed", "5", "--out", "det.csv"]
        run(sample)
        csv1 = (tmp_path / "det.csv").read_bytes()
        run(sample)
        csv2 = (tmp_path / "det.csv").read_bytes()
        assert csv1 == csv2

        cyc = ["cycles", "--quadratic-c", "-1,0", "--max-period", "3",
               "--out", "det.json"]
        run(cyc)
        j1 = (tmp_path / "det.json").read_bytes()
        run(cyc)
        j2 = (tmp_path / "det.json").read_bytes()
        assert j1 == j2
        json.loads(j1.decode())
