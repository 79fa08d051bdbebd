"""Benchmark the compiled kernel core against the pure-numpy fallback.

Usage:  python benchmarks/bench_kernels.py [--repeat N]

Covers the three hot paths (escape grid, inverse-iteration walk, preimage
batch) plus the escape-rate kernel, and verifies on the fly that both
backends return identical results (bit-identical except for the log-based
escape rate).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from boettcher._kernels import available_backends, get_impl


def timeit(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_escape_grid(impl):
    coeffs = np.array([-0.75 + 0.1j, 0j, 1 + 0j])
    xs = np.linspace(-1.8, 1.8, 600)
    ys = np.linspace(1.35, -1.35, 450)
    out = np.empty((len(ys), len(xs)), dtype=np.int32)

    def run():
        impl.escape_grid(coeffs.real.copy(), coeffs.imag.copy(), xs, ys,
                         16.0, 256, out, 0, len(ys))
        return out.copy()
    return run


def bench_walk(impl):
    num = np.array([0.25, 0, 0.5, 0, 0.25], dtype=complex)   # lattes / 4
    den = np.array([0, -1, 0, 1], dtype=complex)
    start = complex(-1.4678899272340985, 0.0)

    def run():
        return impl.preimage_walk(num.real.copy(), num.imag.copy(),
                                  den.real.copy(), den.imag.copy(),
                                  start.real, start.imag,
                                  256, 400, 64, 1, 1e-13, 48)
    return run


def bench_batch(impl):
    coeffs = np.array([-1, 0, 1], dtype=complex)
    t = 1.5 * np.exp(2j * np.pi * np.arange(20000) / 20000.0)

    def run():
        return impl.batch_preimage(coeffs.real.copy(), coeffs.imag.copy(),
                                   t.real.copy(), t.imag.copy(), 1e-13, 256)
    return run


def bench_green(impl):
    coeffs = np.array([-2, 0, 1], dtype=complex)
    zs = np.linspace(-3, 3, 100000) + 0.5j

    def run():
        return impl.green_batch(coeffs.real.copy(), coeffs.imag.copy(),
                                zs.real.copy(), zs.imag.copy(), 1e12, 256, 2)
    return run


BENCHES = [
    ("escape_grid 600x450x256", bench_escape_grid, "exact"),
    ("walk 256x400 quartic", bench_walk, "exact"),
    ("batch_preimage 20k quadr", bench_batch, "exact"),
    ("green_batch 100k", bench_green, "close"),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    print(f"backends available: {backends}")
    if "cython" not in backends:
        print("compiled core missing; timing the fallback only")
    header = f"{'kernel':28s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}{'  match'}"
    print(header)
    print("-" * len(header))
    for name, factory, match_kind in BENCHES:
        times = {}
        results = {}
        for b in backends:
            t, r = timeit(factory(get_impl(b)), args.repeat)
            times[b] = t
            results[b] = r
        row = f"{name:28s}" + "".join(f"{times[b]*1e3:10.1f}ms" for b in backends)
        if len(backends) == 2:
            speed = times["python"] / times["cython"]
            ra, rb = results["python"], results["cython"]
            if isinstance(ra, tuple):
                same = all(np.array_equal(x, y) if match_kind == "exact"
                           else np.allclose(x, y, rtol=1e-13, atol=1e-13)
                           for x, y in zip(ra, rb))
            else:
                same = (np.array_equal(ra, rb) if match_kind == "exact"
                        else np.allclose(ra, rb, rtol=1e-13, atol=1e-13))
            row += f"{speed:9.1f}x  {'ok' if same else 'MISMATCH'}"
        print(row)


if __name__ == "__main__":
    main()
