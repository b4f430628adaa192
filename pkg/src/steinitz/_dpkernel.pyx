# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled subset-DP value-table kernel.

Same recurrence as steinitz._dpkernel_py.fill_g, filled in increasing mask
order with a set-bit walk per mask. Only float comparisons occur, so the
output is bit-identical to the fallback's.
"""

from libc.math cimport INFINITY

import numpy as np


def fill_g(const double[::1] norms, int n):
    cdef Py_ssize_t full = (<Py_ssize_t>1) << n
    if norms.shape[0] != full:
        raise ValueError("norm table size does not match 2^n")
    out = np.empty(full, dtype=np.float64)
    cdef double[::1] g = out
    cdef Py_ssize_t m, mm, low
    cdef double best, nm
    g[0] = 0.0
    for m in range(1, full):
        best = INFINITY
        mm = m
        while mm != 0:
            low = mm & (-mm)
            if g[m ^ low] < best:
                best = g[m ^ low]
            mm ^= low
        nm = norms[m]
        g[m] = nm if nm > best else best
    return out
