# cython: boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled hot kernels: CSR x dense products and window co-occurrence counts."""

from libcpp.unordered_map cimport unordered_map

import numpy as np


def csr_dense_matmul(double[::1] data, long long[::1] indices, long long[::1] indptr,
                     double[:, ::1] dense, double[:, ::1] out):
    """out += CSR(data, indices, indptr) @ dense."""
    cdef Py_ssize_t n_rows = indptr.shape[0] - 1
    cdef Py_ssize_t n_cols = dense.shape[1]
    cdef Py_ssize_t i, jj, k
    cdef long long col
    cdef double w
    for i in range(n_rows):
        for jj in range(indptr[i], indptr[i + 1]):
            col = indices[jj]
            w = data[jj]
            for k in range(n_cols):
                out[i, k] += w * dense[col, k]
    return np.asarray(out)


def window_unit_pair_counts(long long[::1] units, long long[::1] offsets):
    """Count per-window occurrences of units and unordered unit pairs.

    Window slices are strictly increasing (deduplicated), so i < j holds
    for every emitted pair. Pair keys are packed as i * 2^32 + j; unit ids
    must therefore stay below 2^32 (graph sizes are far smaller).
    """
    cdef unordered_map[long long, long long] singles
    cdef unordered_map[long long, long long] pairs
    cdef Py_ssize_t w, a, b, lo, hi
    cdef long long ua, key
    pairs.reserve(4 * <size_t>units.shape[0])
    for w in range(offsets.shape[0] - 1):
        lo = offsets[w]
        hi = offsets[w + 1]
        for a in range(lo, hi):
            ua = units[a]
            singles[ua] += 1
            for b in range(a + 1, hi):
                key = (ua << 32) | units[b]
                pairs[key] += 1

    cdef long long[::1] unit_ids = np.empty(singles.size(), dtype=np.int64)
    cdef long long[::1] unit_counts = np.empty(singles.size(), dtype=np.int64)
    cdef Py_ssize_t pos = 0
    for item in singles:
        unit_ids[pos] = item.first
        unit_counts[pos] = item.second
        pos += 1

    cdef long long[::1] pair_i = np.empty(pairs.size(), dtype=np.int64)
    cdef long long[::1] pair_j = np.empty(pairs.size(), dtype=np.int64)
    cdef long long[::1] pair_counts = np.empty(pairs.size(), dtype=np.int64)
    pos = 0
    for item in pairs:
        pair_i[pos] = item.first >> 32
        pair_j[pos] = item.first & 0xFFFFFFFF
        pair_counts[pos] = item.second
        pos += 1
    return (np.asarray(unit_ids), np.asarray(unit_counts),
            np.asarray(pair_i), np.asarray(pair_j), np.asarray(pair_counts))
