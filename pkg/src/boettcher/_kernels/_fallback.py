"""Pure-numpy implementations of the hot kernels.

These mirror the compiled kernels in ``_core.pyx`` operation for operation:
identical arithmetic expressions, identical evaluation order, identical
branching, no fused multiply-adds, and complex arithmetic spelled out on
separate real/imaginary float64 arrays (numpy's complex division would
differ in rounding).  Escape grids, inverse-iteration walks, and preimage
batches are therefore bit-identical across the two backends; only the
Green's-function kernel (which takes logs) may differ in the last ulp.

The walk kernels advance many independent walkers in lockstep, which is
what makes this backend usable without compilation.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _xorshift64(state):
    state = state ^ (state << np.uint64(13))
    state = state ^ (state >> np.uint64(7))
    state = state ^ (state << np.uint64(17))
    return state


def _splitmix64(x):
    z = x + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def walker_seeds(seed: int, n: int) -> np.ndarray:
    """Per-walker xorshift states; never zero."""
    with np.errstate(over="ignore"):
        base = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + np.arange(1, n + 1, dtype=np.uint64) * _GOLDEN
        s = _splitmix64(base)
    s[s == np.uint64(0)] = _GOLDEN
    return s


def escape_grid(cre, cim, xs, ys, r2, max_iter, out, row0, row1):
    """Fill escape counts for rows [row0, row1) of the pixel grid.

    out[i, j] = smallest n >= 0 with |p^n(x_j + i*y_i)| > sqrt(r2), else
    max_iter + 1.  Pure +,-,* arithmetic: bit-identical to the compiled core.
    """
    n_coef = cre.shape[0]
    xs = np.asarray(xs)
    for row in range(row0, row1):
        zr = xs.copy()
        zi = np.full(xs.shape[0], ys[row])
        counts = np.full(xs.shape[0], max_iter + 1, dtype=np.int32)
        alive = np.ones(xs.shape[0], dtype=bool)
        for n in range(max_iter + 1):
            m2 = zr * zr + zi * zi
            esc = alive & (m2 > r2)
            counts[esc] = n
            alive &= ~esc
            if n == max_iter or not alive.any():
                break
            pr = np.full(xs.shape[0], cre[n_coef - 1])
            pi = np.full(xs.shape[0], cim[n_coef - 1])
            for k in range(n_coef - 2, -1, -1):
                tr = pr * zr - pi * zi + cre[k]
                pi = pr * zi + pi * zr + cim[k]
                pr = tr
            zr = np.where(alive, pr, zr)
            zi = np.where(alive, pi, zi)
        out[row, :] = counts


def _aberth_sweeps(cr, ci, xr, xi, tol, max_sweeps):
    """Shared Aberth-Ehrlich refinement for (M, d) root sets.

    cr/ci: per-system coefficients (M, deg+1), monic-normalized by caller.
    xr/xi: initial points (M, d), updated in place semantics (returned).
    Freezes each system once its max update drops under tol*(1+max|x|).
    """
    m, d = xr.shape
    tol2 = tol * tol
    active = np.ones(m, dtype=bool)
    for _ in range(max_sweeps):
        pr = np.broadcast_to(cr[:, d:d + 1], xr.shape).copy()
        pi = np.broadcast_to(ci[:, d:d + 1], xi.shape).copy()
        qr = np.zeros_like(xr)
        qi = np.zeros_like(xi)
        for k in range(d - 1, -1, -1):
            t1 = qr * xr - qi * xi + pr
            qi = qr * xi + qi * xr + pi
            qr = t1
            t2 = pr * xr - pi * xi + cr[:, k:k + 1]
            pi = pr * xi + pi * xr + ci[:, k:k + 1]
            pr = t2
        mod2x = xr * xr + xi * xi
        modx = np.sqrt(mod2x)
        coll = 1e-12 * (1.0 + modx)
        coll2 = coll * coll
        sr = np.zeros_like(xr)
        si = np.zeros_like(xi)
        for j in range(d):
            fr = xr - xr[:, j:j + 1]
            fi = xi - xi[:, j:j + 1]
            f2 = fr * fr + fi * fi
            bad = f2 < coll2
            fr = np.where(bad, coll, fr)
            fi = np.where(bad, 0.0, fi)
            f2 = np.where(bad, coll * coll, f2)
            f2[:, j] = 1.0
            rr = fr / f2
            ri = -fi / f2
            rr[:, j] = 0.0
            ri[:, j] = 0.0
            sr += rr
            si += ri
        p2 = pr * pr + pi * pi
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            tr = np.where(p2 > 0, (qr * pr + qi * pi) / np.where(p2 > 0, p2, 1.0), 0.0)
            ti_ = np.where(p2 > 0, (qi * pr - qr * pi) / np.where(p2 > 0, p2, 1.0), 0.0)
            er = tr - sr
            ei = ti_ - si
            e2 = er * er + ei * ei
            wr = np.where(e2 > 0, er / np.where(e2 > 0, e2, 1.0), 0.0)
            wi = np.where(e2 > 0, -ei / np.where(e2 > 0, e2, 1.0), 0.0)
        w2 = wr * wr + wi * wi
        cap = 0.5 * (1.0 + modx)
        cap2 = cap * cap
        big = w2 > cap2
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(big, cap / np.sqrt(np.where(w2 > 0, w2, 1.0)), 1.0)
        wr = wr * scale
        wi = wi * scale
        wr = np.where(p2 == 0, 0.0, wr)
        wi = np.where(p2 == 0, 0.0, wi)
        nxr = xr - wr
        nxi = xi - wi
        w2 = wr * wr + wi * wi
        m2 = nxr * nxr + nxi * nxi
        done = w2.max(axis=1) <= tol2 * (1.0 + m2.max(axis=1))
        sel = active[:, None]
        xr = np.where(sel, nxr, xr)
        xi = np.where(sel, nxi, xi)
        active = active & ~done
        if not active.any():
            break
    return xr, xi


def _lexsort_rows(xr, xi):
    idx = np.lexsort(np.stack([xi, xr]), axis=-1)
    return np.take_along_axis(xr, idx, 1), np.take_along_axis(xi, idx, 1)


def _spiral(d):
    """Cold-start points (0.4+0.9i)^k, built by explicit multiplication so
    the compiled core reproduces them bit-for-bit."""
    re = np.empty(d)
    im = np.empty(d)
    wr, wi = 1.0, 0.0
    for k in range(d):
        re[k] = wr
        im[k] = wi
        wr, wi = wr * 0.4 - wi * 0.9, wr * 0.9 + wi * 0.4
    return re, im


def _jitter(d):
    """Warm-start jitter 1e-3*(0.6+0.8i)^(k+1); breaks conjugate symmetry."""
    re = np.empty(d)
    im = np.empty(d)
    wr, wi = 1.0, 0.0
    for k in range(d):
        wr, wi = wr * 0.6 - wi * 0.8, wr * 0.8 + wi * 0.6
        re[k] = 1e-3 * wr
        im[k] = 1e-3 * wi
    return re, im


def preimage_walk(num_re, num_im, den_re, den_im, start_re, start_im,
                  n_walkers, per_walker, burn_in, seed, tol, max_sweeps):
    """Backward-iteration random walk; returns samples walker-major.

    num must be monic with deg num > deg den (the caller normalizes).  Each
    step solves num(w) - t*den(w) = 0 for every walker by Aberth-Ehrlich
    iteration warm-started from the previous (sorted, slightly jittered)
    root set, then picks one root per walker with the in-repo xorshift64.
    """
    num_re = np.asarray(num_re)
    num_im = np.asarray(num_im)
    den_re = np.asarray(den_re)
    den_im = np.asarray(den_im)
    d = num_re.shape[0] - 1
    db = den_re.shape[0] - 1
    w_ = int(n_walkers)
    seeds = walker_seeds(seed, w_)
    sp_re, sp_im = _spiral(d)
    xr = np.tile(sp_re, (w_, 1))
    xi = np.tile(sp_im, (w_, 1))
    jit_re, jit_im = _jitter(d)
    tr = np.full(w_, start_re)
    ti = np.full(w_, start_im)
    out_re = np.empty((w_, per_walker))
    out_im = np.empty((w_, per_walker))
    state = seeds
    for step in range(burn_in + per_walker):
        cr = np.tile(num_re, (w_, 1))
        ci = np.tile(num_im, (w_, 1))
        cr[:, :db + 1] -= tr[:, None] * den_re[None, :] - ti[:, None] * den_im[None, :]
        ci[:, :db + 1] -= tr[:, None] * den_im[None, :] + ti[:, None] * den_re[None, :]
        if step > 0:
            scale = 1.0 + np.sqrt((xr * xr + xi * xi).max(axis=1))
            xr = xr + scale[:, None] * jit_re[None, :]
            xi = xi + scale[:, None] * jit_im[None, :]
        xr, xi = _aberth_sweeps(cr, ci, xr, xi, tol, max_sweeps)
        xr, xi = _lexsort_rows(xr, xi)
        state = _xorshift64(state)
        pick = (state % np.uint64(d)).astype(np.int64)
        tr = np.take_along_axis(xr, pick[:, None], 1)[:, 0]
        ti = np.take_along_axis(xi, pick[:, None], 1)[:, 0]
        if step >= burn_in:
            out_re[:, step - burn_in] = tr
            out_im[:, step - burn_in] = ti
    return out_re.reshape(-1), out_im.reshape(-1)


def batch_preimage(cre, cim, t_re, t_im, tol, max_sweeps):
    """Roots of p(w) = t_k for each target t_k; result (M, d), row-sorted.

    p is monic with coefficients cre/cim (constant term first).  Every
    target is solved from the cold spiral start; rows are sorted
    lexicographically by (re, im).
    """
    cre = np.asarray(cre)
    cim = np.asarray(cim)
    t_re = np.asarray(t_re)
    t_im = np.asarray(t_im)
    d = cre.shape[0] - 1
    m = t_re.shape[0]
    cr = np.tile(cre, (m, 1))
    ci = np.tile(cim, (m, 1))
    cr[:, 0] -= t_re
    ci[:, 0] -= t_im
    sp_re, sp_im = _spiral(d)
    xr = np.tile(sp_re, (m, 1))
    xi = np.tile(sp_im, (m, 1))
    xr, xi = _aberth_sweeps(cr, ci, xr, xi, tol, max_sweeps)
    xr, xi = _lexsort_rows(xr, xi)
    return xr, xi


def green_batch(cre, cim, z_re, z_im, big, max_iter, degree):
    """Escape-rate values lim log|p^n(z)| / deg^n (0 for bounded orbits).

    Iterates until |z| exceeds `big` (default 1e12 at the call site), then
    one log closes the limit; points never escaping within max_iter get 0.
    """
    cre = np.asarray(cre)
    cim = np.asarray(cim)
    zr = np.asarray(z_re, dtype=np.float64).copy()
    zi = np.asarray(z_im, dtype=np.float64).copy()
    m = zr.shape[0]
    n_coef = cre.shape[0]
    out = np.zeros(m)
    alive = np.ones(m, dtype=bool)
    big2 = big * big
    scale = 1.0
    for n in range(max_iter + 1):
        m2 = zr * zr + zi * zi
        done = alive & (m2 > big2)
        if done.any():
            out[done] = 0.5 * np.log(m2[done]) * scale
        alive &= ~done
        if n == max_iter or not alive.any():
            break
        pr = np.full(m, cre[n_coef - 1])
        pi = np.full(m, cim[n_coef - 1])
        for k in range(n_coef - 2, -1, -1):
            tr = pr * zr - pi * zi + cre[k]
            pi = pr * zi + pi * zr + cim[k]
            pr = tr
        zr = np.where(alive, pr, zr)
        zi = np.where(alive, pi, zi)
        scale /= degree
    return out
