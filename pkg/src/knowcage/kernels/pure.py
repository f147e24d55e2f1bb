"""Numpy fallback implementations of the hot kernels.

Same signatures as the compiled module; selected at import time when the
extension is unavailable or KNOWCAGE_PURE_PYTHON is set.
"""

from __future__ import annotations

from collections import Counter

import numpy as np


def csr_dense_matmul(data, indices, indptr, dense, out):
    """out += CSR(data, indices, indptr) @ dense."""
    n_rows = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n_rows, dtype=np.int64), np.diff(indptr))
    np.add.at(out, rows, data[:, None] * dense[indices])
    return out


def window_unit_pair_counts(units, offsets):
    """Count per-window occurrences of units and unordered unit pairs.

    units: concatenated per-window unit ids, each window's slice strictly
    increasing (deduplicated); offsets: int64 array of n_windows+1 bounds.
    Returns (unit_ids, unit_counts, pair_i, pair_j, pair_counts) with
    pair_i < pair_j; ordering of returned entries is unspecified.
    """
    singles: Counter = Counter()
    pairs: Counter = Counter()
    for w in range(offsets.shape[0] - 1):
        win = units[offsets[w] : offsets[w + 1]].tolist()
        singles.update(win)
        for a in range(len(win)):
            ua = win[a]
            for b in range(a + 1, len(win)):
                pairs[(ua, win[b])] += 1
    unit_ids = np.fromiter(singles.keys(), dtype=np.int64, count=len(singles))
    unit_counts = np.fromiter(singles.values(), dtype=np.int64, count=len(singles))
    if pairs:
        keys = np.array(list(pairs.keys()), dtype=np.int64)
        pair_i, pair_j = keys[:, 0], keys[:, 1]
        pair_counts = np.fromiter(pairs.values(), dtype=np.int64, count=len(pairs))
    else:
        pair_i = pair_j = pair_counts = np.zeros(0, dtype=np.int64)
    return unit_ids, unit_counts, pair_i, pair_j, pair_counts
