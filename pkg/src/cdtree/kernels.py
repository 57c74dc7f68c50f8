"""Backend selection for the hot numeric kernels.

Set CDTREE_BACKEND=numpy to force the pure-numpy path, CDTREE_BACKEND=numba
to require the jitted path (ImportError if numba is unavailable). Default:
numba when importable, numpy otherwise. ``benchmarks/bench_backends.py``
compares the two.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

_requested = os.environ.get("CDTREE_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"CDTREE_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    _impl = _kernels_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        _impl = _kernels_numpy
        BACKEND = "numpy"

hist_counts = _impl.hist_counts
nll_bits_from_counts = _impl.nll_bits_from_counts
nll_bits_for_h = _impl.nll_bits_for_h
scan_nll_bits = _impl.scan_nll_bits
extend_regret_row = _impl.extend_regret_row


def warmup() -> None:
    """Trigger jit compilation (no-op on the numpy backend)."""
    import numpy as np

    v = np.array([0.25, 0.75])
    hist_counts(v, 0.0, 1.0, 2)
    nll_bits_for_h(v, 0.0, 1.0, 2)
    scan_nll_bits(v, 0.0, 1.0, np.array([1, 2], dtype=np.int64))
    row = np.array([0.0, 0.0, 1.0, 0.0])
    extend_regret_row(row, 2, 3)
