# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the Fock-space output coefficients.

Same algorithm as ``_pykernels``; see that module for the derivation notes.
"""

import numpy as np

from libc.math cimport exp, log, lgamma, fabs

from .errors import SeriesConvergenceError


cdef double _hyp2f1_unit(double a, double b, double c, double z,
                         double tol, long max_iter) nogil:
    # returns -1.0 on non-convergence (the true value is always >= 1)
    cdef double total = 1.0, term = 1.0, ratio
    cdef long j = 0
    if z == 0.0:
        return 1.0
    while True:
        term *= (a + j) * (b + j) / ((c + j) * (1.0 + j)) * z
        total += term
        j += 1
        ratio = (a + j) * (b + j) / ((c + j) * (1.0 + j)) * z
        if ratio < 1.0 and term * ratio <= tol * total * (1.0 - ratio):
            return total
        if j >= max_iter:
            return -1.0


cdef inline int _log_power(double base, long exponent, double *acc) nogil:
    # adds log(base**exponent) to acc; returns 0 when the power is exactly zero
    if exponent == 0:
        return 1
    if base == 0.0:
        return 0
    acc[0] += exponent * log(base)
    return 1


cdef double _k_coefficient(long k, long l, long m, double q2, double t1, double t2,
                           double tol, long max_iter) nogil:
    cdef long a = k if k > l else l
    cdef double acc = 0.0
    cdef double series
    if not (_log_power(q2, a, &acc) and _log_power(1.0 - t1, a - k, &acc)
            and _log_power(1.0 - t2, a - l, &acc) and _log_power(t1, k, &acc)
            and _log_power(t2, l, &acc)):
        return 0.0
    acc += (lgamma(a + 1.0) + lgamma(a + m + 1.0)
            - 0.5 * (lgamma(k + 1.0) + lgamma(l + 1.0) + lgamma(k + m + 1.0) + lgamma(l + m + 1.0))
            - lgamma(a - k + 1.0) - lgamma(a - l + 1.0))
    series = _hyp2f1_unit(a + 1.0, a + m + 1.0, fabs(<double>(k - l)) + 1.0,
                          q2 * (1.0 - t1) * (1.0 - t2), tol, max_iter)
    if series < 0.0:
        return -1.0
    return exp(acc) * series


def hyp2f1_unit(double a, double b, double c, double z, double tol=1e-14, long max_iter=10000):
    cdef double value = _hyp2f1_unit(a, b, c, z, tol, max_iter)
    if value < 0.0:
        raise SeriesConvergenceError(f"2F1({a}, {b}; {c}; {z}) did not converge in {max_iter} terms")
    return value


def k_coefficient(long k, long l, long m, double q2, double t1, double t2,
                  double tol=1e-14, long max_iter=10000):
    cdef double value = _k_coefficient(k, l, m, q2, t1, t2, tol, max_iter)
    if value < 0.0:
        raise SeriesConvergenceError(f"series for K[{k}, {l}, {m}] did not converge")
    return value


def k_table(double q2, double t1, double t2, long n_max, double tol=1e-14, long max_iter=10000):
    out = np.zeros((n_max + 1, n_max + 1, n_max + 1))
    cdef double[:, :, ::1] view = out
    cdef long k, l, m
    cdef double value
    cdef bint failed = False
    with nogil:
        for m in range(n_max + 1):
            for k in range(n_max + 1 - m):
                for l in range(n_max + 1 - m):
                    value = _k_coefficient(k, l, m, q2, t1, t2, tol, max_iter)
                    if value < 0.0:
                        failed = True
                    view[k, l, m] = value
    if failed:
        raise SeriesConvergenceError("series for some K coefficients did not converge")
    return out
