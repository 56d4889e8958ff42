# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels; see ``_kernels_py`` for the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


def floor_sum(g, x):
    cdef double[::1] gv = np.ascontiguousarray(g, dtype=np.float64)
    cdef long long[::1] xv = np.ascontiguousarray(x, dtype=np.int64)
    if gv.shape[0] != xv.shape[0]:
        raise ValueError("coefficient and symbol arity differ")
    cdef Py_ssize_t i
    cdef long long s = 0
    for i in range(gv.shape[0]):
        s += <long long>floor(gv[i] * <double>xv[i])
    return s


def mac_search(g, long long spacing, long long qc, long long target):
    cdef double[::1] gv = np.ascontiguousarray(g, dtype=np.float64)
    cdef Py_ssize_t n = gv.shape[0]
    cdef long long total = 1
    cdef Py_ssize_t i
    for i in range(n):
        total *= qc
    # terms[i, c] = floor(g_i * c * spacing)
    cdef long long[:, ::1] terms = np.empty((n, qc), dtype=np.int64)
    cdef long long c
    for i in range(n):
        for c in range(qc):
            terms[i, c] = <long long>floor(gv[i] * <double>(c * spacing))
    cdef long long idx, rest, s, count = 0, first = -1
    for idx in range(total):
        rest = idx
        s = 0
        for i in range(n - 1, -1, -1):
            s += terms[i, rest % qc]
            rest //= qc
        if s == target:
            if first < 0:
                first = idx
            count += 1
    return count, first


def invert_floor(double g, long long offset, long long target, long long lo, long long hi):
    cdef long long mid
    while lo < hi:
        mid = (lo + hi) // 2
        if floor(g * <double>(mid + offset)) < target:
            lo = mid + 1
        else:
            hi = mid
    if floor(g * <double>(lo + offset)) == target:
        return lo
    return -1


def alignment_extents(long long a, long long a2, double delta1, double step, long long n):
    cdef double fa = <double>a, fa2 = <double>a2
    # the difference is bounded by |a - a2| * g_max + 1 in magnitude
    cdef double gmax_val = delta1 + <double>n * step
    cdef long long span = <long long>(abs(a - a2) * gmax_val) + 2
    cdef long long width = 2 * span + 1
    cdef double[::1] lo = np.full(width, np.inf)
    cdef double[::1] hi = np.full(width, -np.inf)
    cdef long long k, d, slot
    cdef double gk
    for k in range(n + 1):
        gk = delta1 + <double>k * step
        d = <long long>floor(gk * fa) - <long long>floor(gk * fa2)
        slot = d + span
        if gk < lo[slot]:
            lo[slot] = gk
        if gk > hi[slot]:
            hi[slot] = gk
    lo_a = np.asarray(lo)
    hi_a = np.asarray(hi)
    seen = np.isfinite(lo_a)
    values = np.arange(-span, span + 1, dtype=np.int64)[seen]
    return values, lo_a[seen], hi_a[seen]


def image_set_size(a, b, ga, gb, Py_ssize_t ref):
    cdef long long[:, ::1] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef long long[:, ::1] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef double[::1] gav = np.ascontiguousarray(ga, dtype=np.float64)
    cdef double[::1] gbv = np.ascontiguousarray(gb, dtype=np.float64)
    cdef Py_ssize_t rows = av.shape[0], m = av.shape[1], r, i
    cdef long long[::1] target = np.empty(m, dtype=np.int64)
    for i in range(m):
        target[i] = <long long>floor(<double>av[ref, i] * gav[i]) + <long long>floor(<double>bv[ref, i] * gbv[i])
    cdef long long count = 0
    cdef bint same
    for r in range(rows):
        same = True
        for i in range(m):
            if <long long>floor(<double>av[r, i] * gav[i]) + <long long>floor(<double>bv[r, i] * gbv[i]) != target[i]:
                same = False
                break
        if same:
            count += 1
    return count
