# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython group kernels: block norms and block soft-thresholding.

Same flattened-group contract as the NumPy fallback: ``indices`` is the
concatenation of the group index lists, ``offsets`` (length M+1) delimits
each group inside it.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

IMPL = "cython"


def group_norms(double[::1] v, long[::1] indices, long[::1] offsets):
    cdef Py_ssize_t M = offsets.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out = np.empty(M, dtype=np.float64)
    cdef double[::1] out_v = out
    cdef Py_ssize_t j, t
    cdef double acc, x
    for j in range(M):
        acc = 0.0
        for t in range(offsets[j], offsets[j + 1]):
            x = v[indices[t]]
            acc += x * x
        out_v[j] = sqrt(acc)
    return out


def group_prox(double[::1] z, long[::1] indices, long[::1] offsets,
               double[::1] thresholds):
    cdef Py_ssize_t K = z.shape[0]
    cdef Py_ssize_t M = offsets.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out = np.empty(K, dtype=np.float64)
    cdef double[::1] out_v = out
    cdef Py_ssize_t j, t
    cdef double acc, x, norm, scale
    for j in range(M):
        acc = 0.0
        for t in range(offsets[j], offsets[j + 1]):
            x = z[indices[t]]
            acc += x * x
        norm = sqrt(acc)
        if norm > thresholds[j] and norm > 0.0:
            scale = 1.0 - thresholds[j] / norm
        else:
            scale = 0.0
        for t in range(offsets[j], offsets[j + 1]):
            out_v[indices[t]] = scale * z[indices[t]]
    return out
