"""Hot-kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementations in
``knowcage.kernels.pure``. Set KNOWCAGE_PURE_PYTHON=1 to force the fallback.
Both backends produce identical results (asserted by the test suite); the
benchmark in benchmarks/bench_kernels.py compares their speed.
"""

import os

if os.environ.get("KNOWCAGE_PURE_PYTHON"):
    from . import pure as _impl

    HAS_COMPILED = False
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        HAS_COMPILED = True
    except ImportError:
        from . import pure as _impl

        HAS_COMPILED = False

BACKEND = "compiled" if HAS_COMPILED else "pure"
csr_dense_matmul = _impl.csr_dense_matmul
window_unit_pair_counts = _impl.window_unit_pair_counts

__all__ = ["BACKEND", "HAS_COMPILED", "csr_dense_matmul", "window_unit_pair_counts"]
