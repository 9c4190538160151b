# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython kernels for elementwise UAF evaluation and gradients.

Mirror of ``_kernels_np`` with identical signatures; scalar loops over typed
memoryviews, no Python objects touched inside the loops.
"""

import numpy as np

from libc.math cimport exp, fabs, log1p

BACKEND_NAME = "cython"


cdef inline double _softplus(double z) nogil:
    # max(z, 0) + log1p(e^{-|z|})
    cdef double m = z if z > 0.0 else 0.0
    return m + log1p(exp(-fabs(z)))


cdef inline double _logistic(double z) nogil:
    cdef double ez
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    ez = exp(z)
    return ez / (1.0 + ez)


def uaf_eval(xs, double A, double B, double C, double D, double E):
    """Stable elementwise f(x) = softplus(A(x+B)+Cx^2) - softplus(D(x-B)) + E."""
    cdef double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double xi, z1, z2
    with nogil:
        for i in range(n):
            xi = x[i]
            z1 = A * (xi + B) + C * xi * xi
            z2 = D * (xi - B)
            out[i] = _softplus(z1) - _softplus(z2) + E
    return out_arr


def uaf_grad(xs, double A, double B, double C, double D, double E):
    """Elementwise first derivatives of the UAF.

    Returns an (n, 6) array with columns (df/dx, df/dA, df/dB, df/dC, df/dD,
    df/dE); formulas as in ``_kernels_np.uaf_grad``.
    """
    cdef double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    out_arr = np.empty((n, 6), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i
    cdef double xi, z1, z2, s1, s2
    with nogil:
        for i in range(n):
            xi = x[i]
            z1 = A * (xi + B) + C * xi * xi
            z2 = D * (xi - B)
            s1 = _logistic(z1)
            s2 = _logistic(z2)
            out[i, 0] = s1 * (A + 2.0 * C * xi) - s2 * D
            out[i, 1] = s1 * (xi + B)
            out[i, 2] = s1 * A + s2 * D
            out[i, 3] = s1 * xi * xi
            out[i, 4] = -s2 * (xi - B)
            out[i, 5] = 1.0
    return out_arr
