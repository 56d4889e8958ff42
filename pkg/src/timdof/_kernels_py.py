"""Reference implementations of the numeric kernels (numpy only).

Each function mirrors one in ``_kernels_c.pyx`` and performs the same IEEE
double operations in the same order, so both backends return identical values.
"""

import numpy as np


def floor_sum(g, x):
    g = np.asarray(g, dtype=np.float64)
    x = np.asarray(x, dtype=np.int64)
    if g.shape != x.shape:
        raise ValueError("coefficient and symbol arity differ")
    return int(np.floor(g * x.astype(np.float64)).astype(np.int64).sum())


def _tuples(n, q):
    # lexicographic order, first coordinate most significant
    idx = np.arange(q ** n, dtype=np.int64)
    out = np.empty((q ** n, n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        out[:, i] = idx % q
        idx //= q
    return out


def mac_search(g, spacing, qc, target):
    """Count common tuples c in {0..qc-1}^n with sum floor(g_i * c_i * spacing) == target.

    Returns ``(count, index of the first match or -1)``.
    """
    g = np.asarray(g, dtype=np.float64)
    levels = (_tuples(len(g), qc) * spacing).astype(np.float64)
    sums = np.floor(levels * g).astype(np.int64).sum(axis=1)
    hits = np.flatnonzero(sums == target)
    return int(hits.size), int(hits[0]) if hits.size else -1


def invert_floor(g, offset, target, lo, hi):
    """Smallest p in [lo, hi] with floor(g * (p + offset)) == target, or -1.

    Requires g >= 1 so the map is strictly increasing.
    """
    while lo < hi:
        mid = (lo + hi) // 2
        if np.floor(g * float(mid + offset)) < target:
            lo = mid + 1
        else:
            hi = mid
    return int(lo) if np.floor(g * float(lo + offset)) == target else -1


def alignment_extents(a, a2, delta1, step, n):
    """Scan g = delta1 + k*step, k = 0..n, grouping by floor(g a) - floor(g a2).

    Returns ``(values, gmin, gmax)`` arrays, one entry per observed difference.
    """
    k = np.arange(n + 1, dtype=np.float64)
    g = delta1 + k * step
    d = np.floor(g * float(a)).astype(np.int64) - np.floor(g * float(a2)).astype(np.int64)
    values, first = np.unique(d, return_index=True)
    last = len(d) - 1 - np.unique(d[::-1], return_index=True)[1]
    return values, g[first], g[last]


def image_set_size(a, b, ga, gb, ref):
    """Rows r with floor(ga_i a[r,i]) + floor(gb_i b[r,i]) equal to row ``ref`` for all i."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    z = np.floor(a.astype(np.float64) * ga).astype(np.int64) + np.floor(b.astype(np.float64) * gb).astype(np.int64)
    return int(np.all(z == z[ref], axis=1).sum())
