# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled product kernels.

All routines evaluate sums of ``mult_k * log(1 - x * inv_k)`` by running
products with periodic exponent rescaling, which is both faster and more
accurate than summing logarithms term by term.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport frexp, ldexp, log, fabs, atan2, hypot

cnp.import_array()

cdef double LN2 = 0.6931471805599453


cdef inline void _renorm(double *pr, long *expo):
    cdef int e
    pr[0] = frexp(pr[0], &e)
    expo[0] += e


def prod_log_real(const double[::1] x, const double[::1] inv, const long[::1] mult, const long[::1] skip):
    """Return ``(logabs, sign)`` of ``prod_k (1 - x_j inv_k)^mult_k`` for every point.

    ``skip[j]`` is an index of ``inv`` left out of the product for point ``j``
    (``-1`` keeps every factor).
    """
    cdef Py_ssize_t n = x.shape[0], K = inv.shape[0]
    cdef Py_ssize_t j, k, r
    cdef double prod, t, xj, sgn
    cdef long expo
    cdef int cnt
    out_log = np.empty(n, dtype=np.float64)
    out_sign = np.empty(n, dtype=np.float64)
    cdef double[::1] lg = out_log
    cdef double[::1] sg = out_sign
    for j in range(n):
        xj = x[j]
        prod = 1.0
        expo = 0
        cnt = 0
        for k in range(K):
            if k == skip[j]:
                continue
            t = 1.0 - xj * inv[k]
            for r in range(mult[k]):
                prod *= t
                cnt += 1
                if cnt == 16:
                    cnt = 0
                    if prod != 0.0:
                        _renorm(&prod, &expo)
        if prod == 0.0:
            lg[j] = -np.inf
            sg[j] = 0.0
        else:
            sgn = 1.0 if prod > 0.0 else -1.0
            lg[j] = log(fabs(prod)) + expo * LN2
            sg[j] = sgn
    return out_log, out_sign


def prod_log_complex(const double[::1] zr, const double[::1] zi, const double[::1] inv, const long[::1] mult):
    """Return ``(logabs, arg)`` of ``prod_k (1 - z_j inv_k)^mult_k`` at complex points."""
    cdef Py_ssize_t n = zr.shape[0], K = inv.shape[0]
    cdef Py_ssize_t j, k, r
    cdef double pr, pi, tr, ti, nr, m
    cdef long expo
    cdef int e, cnt
    out_log = np.empty(n, dtype=np.float64)
    out_arg = np.empty(n, dtype=np.float64)
    cdef double[::1] lg = out_log
    cdef double[::1] ag = out_arg
    for j in range(n):
        pr = 1.0
        pi = 0.0
        expo = 0
        cnt = 0
        for k in range(K):
            tr = 1.0 - zr[j] * inv[k]
            ti = -zi[j] * inv[k]
            for r in range(mult[k]):
                nr = pr * tr - pi * ti
                pi = pr * ti + pi * tr
                pr = nr
                cnt += 1
                if cnt == 16:
                    cnt = 0
                    m = fabs(pr) if fabs(pr) > fabs(pi) else fabs(pi)
                    if m != 0.0:
                        frexp(m, &e)
                        pr = ldexp(pr, -e)
                        pi = ldexp(pi, -e)
                        expo += e
        m = hypot(pr, pi)
        if m == 0.0:
            lg[j] = -np.inf
            ag[j] = 0.0
        else:
            lg[j] = log(m) + expo * LN2
            ag[j] = atan2(pi, pr)
    return out_log, out_arg
