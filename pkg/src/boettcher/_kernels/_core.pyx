# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: escape grids, inverse-iteration walks, preimage
batches, escape-rate evaluation.

Every loop mirrors the numpy fallback (_fallback.py) operation for
operation so that both backends produce bit-identical escape grids, walk
samples, and preimage batches.  Keep the two files in sync; the parity
tests in tests/test_kernels.py enforce it.  Compiled with -ffp-contract=off
so no fused multiply-adds sneak in.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log, sqrt

cnp.import_array()

BACKEND = "cython"

DEF MAXD = 64  # walk/batch kernels support map degree <= MAXD

ctypedef unsigned long long u64


cdef inline u64 _xorshift64(u64 s) nogil:
    s ^= s << 13
    s ^= s >> 7
    s ^= s << 17
    return s


cdef inline u64 _splitmix64(u64 x) nogil:
    cdef u64 z = x + 0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def walker_seeds(seed, n):
    """Per-walker xorshift states; never zero.  Matches the fallback."""
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(int(n), dtype=np.uint64)
    cdef u64 base = <u64> (int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef u64 s
    cdef Py_ssize_t i
    for i in range(<Py_ssize_t> n):
        s = _splitmix64(base + (<u64> (i + 1)) * 0x9E3779B97F4A7C15ULL)
        if s == 0:
            s = 0x9E3779B97F4A7C15ULL
        out[i] = s
    return out


def escape_grid(double[::1] cre, double[::1] cim, double[::1] xs, double[::1] ys,
                double r2, int max_iter, int[:, ::1] out, Py_ssize_t row0, Py_ssize_t row1):
    """Fill rows [row0, row1) of the escape-count grid."""
    cdef Py_ssize_t nc = cre.shape[0]
    cdef Py_ssize_t nx = xs.shape[0]
    cdef Py_ssize_t row, col, k
    cdef int n
    cdef double zr, zi, m2, pr, pi, tr, y
    with nogil:
        for row in range(row0, row1):
            y = ys[row]
            for col in range(nx):
                zr = xs[col]
                zi = y
                out[row, col] = max_iter + 1
                for n in range(max_iter + 1):
                    m2 = zr * zr + zi * zi
                    if m2 > r2:
                        out[row, col] = n
                        break
                    if n == max_iter:
                        break
                    pr = cre[nc - 1]
                    pi = cim[nc - 1]
                    for k in range(nc - 2, -1, -1):
                        tr = pr * zr - pi * zi + cre[k]
                        pi = pr * zi + pi * zr + cim[k]
                        pr = tr
                    zr = pr
                    zi = pi
    return None


cdef void _spiral(double* re, double* im, Py_ssize_t d) nogil:
    cdef double wr = 1.0, wi = 0.0, t
    cdef Py_ssize_t k
    for k in range(d):
        re[k] = wr
        im[k] = wi
        t = wr * 0.4 - wi * 0.9
        wi = wr * 0.9 + wi * 0.4
        wr = t


cdef void _jitter(double* re, double* im, Py_ssize_t d) nogil:
    cdef double wr = 1.0, wi = 0.0, t
    cdef Py_ssize_t k
    for k in range(d):
        t = wr * 0.6 - wi * 0.8
        wi = wr * 0.8 + wi * 0.6
        wr = t
        re[k] = 1e-3 * wr
        im[k] = 1e-3 * wi


cdef bint _aberth_system(double* cr, double* ci, double* xr, double* xi,
                         Py_ssize_t d, double tol2, int max_sweeps) nogil:
    """Refine one root set in place; returns True once converged.

    Jacobi-style sweeps of the Ehrlich-Aberth update, with the same
    collision guard, step cap, and stopping rule as the fallback.
    """
    cdef double pr[MAXD]
    cdef double pi_[MAXD]
    cdef double qr[MAXD]
    cdef double qi[MAXD]
    cdef double sr[MAXD]
    cdef double si[MAXD]
    cdef double wr_[MAXD]
    cdef double wi_[MAXD]
    cdef Py_ssize_t i, j, k
    cdef int sweep
    cdef double t1, t2, m2x, modx, coll, coll2, fr, fi, f2, rr, ri
    cdef double p2, tr_, ti_, er, ei, e2, w2, cap, cap2, scale
    cdef double maxw2, maxm2, nr, ni
    for sweep in range(max_sweeps):
        for i in range(d):
            # p and p' by simultaneous Horner
            pr[i] = cr[d]
            pi_[i] = ci[d]
            qr[i] = 0.0
            qi[i] = 0.0
            for k in range(d - 1, -1, -1):
                t1 = qr[i] * xr[i] - qi[i] * xi[i] + pr[i]
                qi[i] = qr[i] * xi[i] + qi[i] * xr[i] + pi_[i]
                qr[i] = t1
                t2 = pr[i] * xr[i] - pi_[i] * xi[i] + cr[k]
                pi_[i] = pr[i] * xi[i] + pi_[i] * xr[i] + ci[k]
                pr[i] = t2
        for i in range(d):
            m2x = xr[i] * xr[i] + xi[i] * xi[i]
            modx = sqrt(m2x)
            coll = 1e-12 * (1.0 + modx)
            coll2 = coll * coll
            sr[i] = 0.0
            si[i] = 0.0
            for j in range(d):
                fr = xr[i] - xr[j]
                fi = xi[i] - xi[j]
                f2 = fr * fr + fi * fi
                if f2 < coll2:
                    fr = coll
                    fi = 0.0
                    f2 = coll * coll
                if j == i:
                    # mirror the fallback's masked column: contributes +0.0
                    sr[i] = sr[i] + 0.0
                    si[i] = si[i] + 0.0
                else:
                    rr = fr / f2
                    ri = -fi / f2
                    sr[i] = sr[i] + rr
                    si[i] = si[i] + ri
            p2 = pr[i] * pr[i] + pi_[i] * pi_[i]
            if p2 > 0:
                tr_ = (qr[i] * pr[i] + qi[i] * pi_[i]) / p2
                ti_ = (qi[i] * pr[i] - qr[i] * pi_[i]) / p2
            else:
                tr_ = 0.0
                ti_ = 0.0
            er = tr_ - sr[i]
            ei = ti_ - si[i]
            e2 = er * er + ei * ei
            if e2 > 0:
                wr_[i] = er / e2
                wi_[i] = -ei / e2
            else:
                wr_[i] = 0.0
                wi_[i] = 0.0
            w2 = wr_[i] * wr_[i] + wi_[i] * wi_[i]
            cap = 0.5 * (1.0 + modx)
            cap2 = cap * cap
            if w2 > cap2:
                scale = cap / sqrt(w2)
                wr_[i] = wr_[i] * scale
                wi_[i] = wi_[i] * scale
            if p2 == 0:
                wr_[i] = 0.0
                wi_[i] = 0.0
        maxw2 = 0.0
        maxm2 = 0.0
        for i in range(d):
            nr = xr[i] - wr_[i]
            ni = xi[i] - wi_[i]
            w2 = wr_[i] * wr_[i] + wi_[i] * wi_[i]
            m2x = nr * nr + ni * ni
            if w2 > maxw2:
                maxw2 = w2
            if m2x > maxm2:
                maxm2 = m2x
            xr[i] = nr
            xi[i] = ni
        if maxw2 <= tol2 * (1.0 + maxm2):
            return True
    return False


cdef void _sort_roots(double* xr, double* xi, Py_ssize_t d) nogil:
    """Stable insertion sort by (re, im); matches np.lexsort ordering."""
    cdef Py_ssize_t i, j
    cdef double vr, vi
    for i in range(1, d):
        vr = xr[i]
        vi = xi[i]
        j = i - 1
        while j >= 0 and (xr[j] > vr or (xr[j] == vr and xi[j] > vi)):
            xr[j + 1] = xr[j]
            xi[j + 1] = xi[j]
            j -= 1
        xr[j + 1] = vr
        xi[j + 1] = vi


def preimage_walk(double[::1] num_re, double[::1] num_im,
                  double[::1] den_re, double[::1] den_im,
                  double start_re, double start_im,
                  int n_walkers, int per_walker, int burn_in,
                  seed, double tol, int max_sweeps):
    """Backward-iteration random walk; returns samples walker-major."""
    cdef Py_ssize_t d = num_re.shape[0] - 1
    cdef Py_ssize_t db = den_re.shape[0] - 1
    if d > MAXD or d < 1:
        raise ValueError(f"walk kernel supports degree 1..{MAXD}")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_re = np.empty(n_walkers * per_walker)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_im = np.empty(n_walkers * per_walker)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] seeds = walker_seeds(seed, n_walkers)
    cdef double[::1] o_re = out_re
    cdef double[::1] o_im = out_im
    cdef cnp.uint64_t[::1] sd = seeds
    cdef double tol2 = tol * tol
    cdef double sp_re[MAXD]
    cdef double sp_im[MAXD]
    cdef double jt_re[MAXD]
    cdef double jt_im[MAXD]
    cdef double xr[MAXD]
    cdef double xi[MAXD]
    cdef double cr[MAXD + 1]
    cdef double ci[MAXD + 1]
    cdef Py_ssize_t w, k, step, total
    cdef u64 state
    cdef double t_r, t_i, m2, maxm2, scale
    cdef Py_ssize_t pick
    total = burn_in + per_walker
    with nogil:
        _spiral(sp_re, sp_im, d)
        _jitter(jt_re, jt_im, d)
        for w in range(n_walkers):
            state = sd[w]
            t_r = start_re
            t_i = start_im
            for k in range(d):
                xr[k] = sp_re[k]
                xi[k] = sp_im[k]
            for step in range(total):
                for k in range(d + 1):
                    cr[k] = num_re[k]
                    ci[k] = num_im[k]
                for k in range(db + 1):
                    cr[k] = num_re[k] - (t_r * den_re[k] - t_i * den_im[k])
                    ci[k] = num_im[k] - (t_r * den_im[k] + t_i * den_re[k])
                if step > 0:
                    maxm2 = 0.0
                    for k in range(d):
                        m2 = xr[k] * xr[k] + xi[k] * xi[k]
                        if m2 > maxm2:
                            maxm2 = m2
                    scale = 1.0 + sqrt(maxm2)
                    for k in range(d):
                        xr[k] = xr[k] + scale * jt_re[k]
                        xi[k] = xi[k] + scale * jt_im[k]
                _aberth_system(cr, ci, xr, xi, d, tol2, max_sweeps)
                _sort_roots(xr, xi, d)
                state = _xorshift64(state)
                pick = <Py_ssize_t> (state % (<u64> d))
                t_r = xr[pick]
                t_i = xi[pick]
                if step >= burn_in:
                    o_re[w * per_walker + (step - burn_in)] = t_r
                    o_im[w * per_walker + (step - burn_in)] = t_i
    return out_re, out_im


def batch_preimage(double[::1] cre, double[::1] cim,
                   double[::1] t_re, double[::1] t_im,
                   double tol, int max_sweeps):
    """Roots of p(w) = t_k for each target; (M, d) arrays, rows sorted."""
    cdef Py_ssize_t d = cre.shape[0] - 1
    cdef Py_ssize_t m = t_re.shape[0]
    if d > MAXD or d < 1:
        raise ValueError(f"batch kernel supports degree 1..{MAXD}")
    cdef cnp.ndarray[cnp.float64_t, ndim=2] R_re = np.empty((m, d))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] R_im = np.empty((m, d))
    cdef double[:, ::1] o_re = R_re
    cdef double[:, ::1] o_im = R_im
    cdef double tol2 = tol * tol
    cdef double sp_re[MAXD]
    cdef double sp_im[MAXD]
    cdef double xr[MAXD]
    cdef double xi[MAXD]
    cdef double cr[MAXD + 1]
    cdef double ci[MAXD + 1]
    cdef Py_ssize_t i, k
    with nogil:
        _spiral(sp_re, sp_im, d)
        for i in range(m):
            for k in range(d + 1):
                cr[k] = cre[k]
                ci[k] = cim[k]
            cr[0] = cre[0] - t_re[i]
            ci[0] = cim[0] - t_im[i]
            for k in range(d):
                xr[k] = sp_re[k]
                xi[k] = sp_im[k]
            _aberth_system(cr, ci, xr, xi, d, tol2, max_sweeps)
            _sort_roots(xr, xi, d)
            for k in range(d):
                o_re[i, k] = xr[k]
                o_im[i, k] = xi[k]
    return R_re, R_im


def green_batch(double[::1] cre, double[::1] cim,
                double[::1] z_re, double[::1] z_im,
                double big, int max_iter, int degree):
    """Escape-rate values lim log|p^n(z)| / deg^n; 0 for bounded orbits."""
    cdef Py_ssize_t nc = cre.shape[0]
    cdef Py_ssize_t m = z_re.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(m)
    cdef double[::1] o = out
    cdef double big2 = big * big
    cdef Py_ssize_t i, k
    cdef int n
    cdef double zr, zi, m2, pr, pi, tr, scale
    with nogil:
        for i in range(m):
            zr = z_re[i]
            zi = z_im[i]
            scale = 1.0
            o[i] = 0.0
            for n in range(max_iter + 1):
                m2 = zr * zr + zi * zi
                if m2 > big2:
                    o[i] = 0.5 * log(m2) * scale
                    break
                if n == max_iter:
                    break
                pr = cre[nc - 1]
                pi = cim[nc - 1]
                for k in range(nc - 2, -1, -1):
                    tr = pr * zr - pi * zi + cre[k]
                    pi = pr * zi + pi * zr + cim[k]
                    pr = tr
                zr = pr
                zi = pi
                scale /= degree
    return out
