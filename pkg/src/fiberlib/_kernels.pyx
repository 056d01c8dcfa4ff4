# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled retraction kernels; same contract as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

ctypedef long long i64


cdef inline Py_ssize_t _lower_bound(const i64[::1] p, Py_ssize_t lo, Py_ssize_t hi, i64 key) nogil:
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if p[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _nearest(i64 a, const i64[::1] p, int depth) nogil:
    cdef Py_ssize_t lo = 0, hi = p.shape[0], mid
    cdef i64 prefix = 0, bit
    cdef int b
    for b in range(depth - 1, -1, -1):
        bit = (<i64>1) << b
        mid = _lower_bound(p, lo, hi, prefix | bit)
        if a & bit:
            if mid < hi:
                lo = mid
                prefix |= bit
            else:
                hi = mid
        else:
            if lo < mid:
                hi = mid
            else:
                lo = mid
                prefix |= bit
    return lo


def nearest_index(a, planted, int depth):
    cdef const i64[::1] p = np.ascontiguousarray(planted, dtype=np.int64)
    return int(_nearest(<i64>a, p, depth))


def retract_many(addresses, planted, int depth):
    cdef const i64[::1] p = np.ascontiguousarray(planted, dtype=np.int64)
    cdef const i64[::1] q = np.ascontiguousarray(np.asarray(addresses, dtype=np.int64))
    cdef Py_ssize_t n = q.shape[0], i
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _nearest(q[i], p, depth)
    return out


def nearest_table(planted, int depth):
    cdef const i64[::1] p = np.ascontiguousarray(planted, dtype=np.int64)
    cdef Py_ssize_t n = (<Py_ssize_t>1) << depth, i
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _nearest(<i64>i, p, depth)
    return out
