# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: mass-propagation DP and cyclic Jacobi sweeps.

Semantics match expwalk.kernels exactly; that module selects this
extension at import when it is available.
"""

from libc.math cimport fabs, sqrt
from libc.string cimport memcpy, memset

import numpy as np


def dp_advance(double[:, ::1] mass, double[:, ::1] scratch,
               const double[:, ::1] transition, const long[::1] shifts,
               Py_ssize_t lo, Py_ssize_t hi, Py_ssize_t steps):
    cdef Py_ssize_t m = transition.shape[0]
    cdef Py_ssize_t rows = mass.shape[0]
    cdef Py_ssize_t step, r, v, w, nlo, nhi, e
    cdef long smin = shifts[0]
    cdef long smax = shifts[0]
    cdef double a
    for v in range(m):
        if shifts[v] < smin:
            smin = shifts[v]
        if shifts[v] > smax:
            smax = shifts[v]

    # Pack the nonzero transition entries once; graph walks are d-sparse.
    nz_idx_arr = np.zeros((m, m), dtype=np.int64)
    nz_p_arr = np.zeros((m, m), dtype=np.float64)
    nz_cnt_arr = np.zeros(m, dtype=np.int64)
    cdef long[:, ::1] nz_idx = nz_idx_arr
    cdef double[:, ::1] nz_p = nz_p_arr
    cdef long[::1] nz_cnt = nz_cnt_arr
    for v in range(m):
        e = 0
        for w in range(m):
            if transition[v, w] != 0.0:
                nz_idx[v, e] = w
                nz_p[v, e] = transition[v, w]
                e += 1
        nz_cnt[v] = e

    cdef double[:, ::1] src = mass
    cdef double[:, ::1] dst = scratch
    cdef double[:, ::1] tmp
    for step in range(steps):
        nlo = lo + smin
        nhi = hi + smax
        memset(&dst[nlo, 0], 0, (nhi - nlo + 1) * m * sizeof(double))
        for r in range(lo, hi + 1):
            for v in range(m):
                a = src[r, v]
                if a != 0.0:
                    for e in range(nz_cnt[v]):
                        w = nz_idx[v, e]
                        dst[r + shifts[w], w] += a * nz_p[v, e]
        lo = nlo
        hi = nhi
        tmp = src
        src = dst
        dst = tmp
    if steps % 2 == 1:
        # result lives in the scratch buffer; copy it back into mass
        memcpy(&mass[lo, 0], &src[lo, 0], (hi - lo + 1) * m * sizeof(double))
        memset(&scratch[lo, 0], 0, (hi - lo + 1) * m * sizeof(double))
    return lo, hi


def jacobi_sweeps(double[:, ::1] a, double[:, ::1] v,
                  double tol, Py_ssize_t max_sweeps):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t sweep, p, q, k
    cdef double off, apq, tau, t, c, s, xp, xq, skip
    skip = tol * 1e-2
    for sweep in range(1, max_sweeps + 1):
        off = _max_offdiag(a, n)
        if off <= tol:
            return sweep - 1, off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if fabs(apq) <= skip:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = c * xp - s * xq
                    a[q, k] = s * xp + c * xq
                for k in range(n):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = c * xp - s * xq
                    a[k, q] = s * xp + c * xq
                for k in range(n):
                    xp = v[k, p]
                    xq = v[k, q]
                    v[k, p] = c * xp - s * xq
                    v[k, q] = s * xp + c * xq
        for p in range(n):
            for q in range(p + 1, n):
                apq = 0.5 * (a[p, q] + a[q, p])
                a[p, q] = apq
                a[q, p] = apq
    return max_sweeps, _max_offdiag(a, n)


cdef double _max_offdiag(double[:, ::1] a, Py_ssize_t n):
    cdef Py_ssize_t p, q
    cdef double best = 0.0
    for p in range(n):
        for q in range(n):
            if p != q and fabs(a[p, q]) > best:
                best = fabs(a[p, q])
    return best
