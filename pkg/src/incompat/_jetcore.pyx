"""Compiled jet kernels: truncated Taylor-coefficient products.

The multiplication table (sorted by output coefficient index) is shared with
the pure-numpy backend so both accumulate in the same order and produce
identical floating-point results.
"""

import numpy as np

BACKEND_NAME = "compiled"


def mul_coeffs(const double[:, ::1] a, const double[:, ::1] b,
               const Py_ssize_t[:] mul_i, const Py_ssize_t[:] mul_j,
               const Py_ssize_t[:] mul_k, const Py_ssize_t[:] mul_starts,
               Py_ssize_t nc_out):
    cdef Py_ssize_t npairs = mul_i.shape[0]
    cdef Py_ssize_t M = a.shape[1]
    out_arr = np.zeros((nc_out, M), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t p, m, i, j, k
    for p in range(npairs):
        i = mul_i[p]
        j = mul_j[p]
        k = mul_k[p]
        for m in range(M):
            out[k, m] += a[i, m] * b[j, m]
    return out_arr
