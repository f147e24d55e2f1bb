"""Backend parity: the compiled kernels must agree with the pure fallback."""

import numpy as np
import pytest

from knowcage import kernels
from knowcage.kernels import pure

compiled = pytest.importorskip("knowcage.kernels._core") if kernels.HAS_COMPILED else None

pytestmark = pytest.mark.skipif(
    not kernels.HAS_COMPILED, reason="compiled kernels unavailable; fallback already exercised"
)


def random_csr(rng, n, density=0.3):
    dense = rng.random((n, n)) * (rng.random((n, n)) < density)
    rows, cols = np.nonzero(dense)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)
    return dense, dense[rows, cols].astype(np.float64), cols.astype(np.int64), indptr


def test_csr_matmul_matches_pure_and_dense():
    rng = np.random.default_rng(0)
    dense, data, indices, indptr = random_csr(rng, 40)
    b = rng.random((40, 7))
    out_c = np.zeros((40, 7))
    out_p = np.zeros((40, 7))
    compiled.csr_dense_matmul(data, indices, indptr, b, out_c)
    pure.csr_dense_matmul(data, indices, indptr, b, out_p)
    assert np.max(np.abs(out_c - out_p)) < 1e-12
    assert np.max(np.abs(out_c - dense @ b)) < 1e-12


def windows_fixture(rng, n_windows=50, n_units=30):
    flat, offsets = [], [0]
    for _ in range(n_windows):
        size = int(rng.integers(1, 8))
        win = sorted(rng.choice(n_units, size=size, replace=False).tolist())
        flat.extend(win)
        offsets.append(len(flat))
    return np.asarray(flat, dtype=np.int64), np.asarray(offsets, dtype=np.int64)


def test_window_counts_match_pure():
    rng = np.random.default_rng(1)
    units, offsets = windows_fixture(rng)
    res_c = compiled.window_unit_pair_counts(units, offsets)
    res_p = pure.window_unit_pair_counts(units, offsets)

    def as_dicts(res):
        ids, counts, pi, pj, pc = res
        return dict(zip(ids.tolist(), counts.tolist())), {
            (int(i), int(j)): int(c) for i, j, c in zip(pi, pj, pc)
        }

    assert as_dicts(res_c) == as_dicts(res_p)


def test_empty_windows():
    units = np.zeros(0, dtype=np.int64)
    offsets = np.zeros(1, dtype=np.int64)
    ids, counts, pi, pj, pc = compiled.window_unit_pair_counts(units, offsets)
    assert len(ids) == len(pi) == 0
