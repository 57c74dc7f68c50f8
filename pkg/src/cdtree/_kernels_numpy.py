"""Pure-numpy implementations of the hot kernels.

Reference semantics for the numba twins in ``_kernels_numba``; selected at
import time by ``kernels`` when CDTREE_BACKEND=numpy or numba is missing.
"""

from __future__ import annotations

import math

import numpy as np


def hist_counts(values: np.ndarray, lo: float, hi: float, h: int) -> np.ndarray:
    """Equal-width bin counts; last bin closed on top (hi maps to h-1)."""
    w = (hi - lo) / h
    idx = np.floor((values - lo) / w).astype(np.int64)
    np.minimum(idx, h - 1, out=idx)
    return np.bincount(idx, minlength=h)


def nll_bits_from_counts(counts: np.ndarray, lo: float, hi: float) -> float:
    """-sum_j c_j * log2((c_j/n)/w); empty bins contribute 0, n=0 gives 0."""
    n = int(counts.sum())
    if n == 0:
        return 0.0
    w = (hi - lo) / len(counts)
    acc = 0.0
    for c in counts:
        if c > 0:
            acc += c * math.log2(c / (n * w))
    return -acc


def nll_bits_for_h(values: np.ndarray, lo: float, hi: float, h: int) -> float:
    return nll_bits_from_counts(hist_counts(values, lo, hi, h), lo, hi)


def scan_nll_bits(values: np.ndarray, lo: float, hi: float, hs: np.ndarray) -> np.ndarray:
    out = np.empty(len(hs), dtype=np.float64)
    for t, h in enumerate(hs):
        out[t] = nll_bits_for_h(values, lo, hi, int(h))
    return out


def extend_regret_row(row: np.ndarray, n: int, start: int) -> None:
    """Fill row[start:] with log2 R(n,k) via the two-term recurrence.

    row[k-1] and row[k-2] must already be filled; start >= 3.
    """
    for k in range(start, len(row)):
        a = row[k - 1]
        b = math.log2(n / (k - 2)) + row[k - 2]
        m = a if a > b else b
        row[k] = m + math.log2(2.0 ** (a - m) + 2.0 ** (b - m))
