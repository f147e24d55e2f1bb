#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy fallback.

Times the two hot paths on synthetic inputs sized like a mid-size corpus:
CSR x dense products (one per encoder layer per epoch) and sliding-window
co-occurrence counting (once per graph build).

Usage: python benchmarks/bench_kernels.py [--n 4000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from knowcage.kernels import pure

try:
    from knowcage.kernels import _core as compiled
except ImportError:
    compiled = None


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_csr_matmul(n, d, density, repeat):
    rng = np.random.default_rng(0)
    nnz_per_row = max(1, int(n * density))
    indptr = np.arange(0, (n + 1) * nnz_per_row, nnz_per_row, dtype=np.int64)
    indices = rng.integers(0, n, size=n * nnz_per_row).astype(np.int64)
    data = rng.random(n * nnz_per_row)
    dense = rng.random((n, d))
    rows = []
    for name, impl in backends():
        out = np.zeros((n, d))
        t = time_call(lambda: impl.csr_dense_matmul(data, indices, indptr, dense, out), repeat)
        rows.append((f"csr_matmul n={n} d={d} nnz={data.size}", name, t))
    return rows


def bench_window_counts(n_windows, width, n_units, repeat):
    rng = np.random.default_rng(1)
    flat, offsets = [], [0]
    for _ in range(n_windows):
        win = np.unique(rng.integers(0, n_units, size=width))
        flat.extend(win.tolist())
        offsets.append(len(flat))
    units = np.asarray(flat, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    rows = []
    for name, impl in backends():
        t = time_call(lambda: impl.window_unit_pair_counts(units, offsets), repeat)
        rows.append((f"window_counts w={n_windows} width<={width}", name, t))
    return rows


def backends():
    yield "pure", pure
    if compiled is not None:
        yield "compiled", compiled


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=4000, help="matrix side for csr matmul")
    parser.add_argument("--d", type=int, default=300, help="dense width")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if compiled is None:
        print("compiled kernels not built; timing the pure fallback only\n")

    rows = []
    rows += bench_csr_matmul(args.n, args.d, density=0.01, repeat=args.repeat)
    rows += bench_window_counts(n_windows=20000, width=20, n_units=8000, repeat=args.repeat)

    print(f"{'case':<42} {'backend':<10} {'best (s)':>10} {'speedup':>9}")
    base = {}
    for case, name, t in rows:
        if name == "pure":
            base[case] = t
        speedup = f"{base[case] / t:6.2f}x" if name != "pure" and case in base else ""
        print(f"{case:<42} {name:<10} {t:>10.4f} {speedup:>9}")


if __name__ == "__main__":
    main()
