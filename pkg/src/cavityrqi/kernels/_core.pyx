# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_fallback`` for semantics)."""

import numpy as np
from libc.math cimport sin, cos, sqrt, fabs, M_PI


cdef inline double _g(double x, double M) nogil:
    return x * cos(x) + M * sin(x)


def dirac_roots(branches, double M, double rtol=1e-12, int max_iter=200):
    cdef long[:] b = np.ascontiguousarray(branches, dtype=np.int64)
    cdef Py_ssize_t n = b.shape[0]
    out = np.empty(n)
    cdef double[:] res = out
    cdef Py_ssize_t i
    cdef int it
    cdef double lo, hi, mid, flo, fmid
    for i in range(n):
        lo = (b[i] + 0.5) * M_PI
        hi = (b[i] + 1.0) * M_PI
        flo = _g(lo, M)
        it = 0
        while hi - lo > rtol * lo:
            mid = 0.5 * (lo + hi)
            fmid = _g(mid, M)
            if (fmid > 0) == (flo > 0):
                lo = mid
                flo = fmid
            else:
                hi = mid
            it += 1
            if it > max_iter:
                raise RuntimeError("Dirac root bisection did not converge")
        res[i] = 0.5 * (lo + hi)
    return out


def scalar_beta_antidiagonals(double M, Py_ssize_t s_max):
    out = np.zeros(s_max + 1)
    cdef double[:] res = out
    cdef Py_ssize_t s, m
    cdef double wm, wn, beta, acc, M2 = M * M, pi2 = M_PI * M_PI
    for s in range(3, s_max + 1, 2):
        acc = 0.0
        for m in range(1, s):
            wm = sqrt(M2 + pi2 * m * m)
            wn = sqrt(M2 + pi2 * (s - m) * (s - m))
            beta = 2.0 * pi2 * m * (s - m) / (sqrt(wm * wn) * (wm + wn) * (wm + wn) * (wm + wn))
            acc += beta * beta
        res[s] = acc
    return out


def dirac_beta_antidiagonals(double M, x_in):
    cdef double[:] x = np.ascontiguousarray(x_in, dtype=float)
    cdef Py_ssize_t s_max = x.shape[0]
    out = np.zeros(s_max + 1)
    cdef double[:] res = out
    cdef Py_ssize_t s, p, j
    cdef double kp, kq, wp, wq, cp, cq, num, den, a, acc, d1, d2, M2 = M * M
    for s in range(1, s_max + 1, 2):
        acc = 0.0
        for p in range(0, s):
            j = s - 1 - p
            kp = x[p]
            kq = -x[j]
            wp = sqrt(M2 + kp * kp)
            wq = -sqrt(M2 + kq * kq)
            cp = kp + wp
            cq = kq + wq
            num = 4.0 * fabs(kp * kq) * cp * cp * cq * cq * (cp + cq) * (cp * cq + M2)
            d1 = cp - cq
            d2 = cp * cq - M2
            den = sqrt(wp * wp + M) * sqrt(wq * wq + M) * d1 * d1 * d1 * d2 * d2 * d2
            a = num / den
            acc += a * a
        res[s] = acc
    return out
