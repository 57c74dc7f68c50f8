"""Numba-jitted twins of the kernels in ``_kernels_numpy``.

Same formulas, loop order, and dtypes as the numpy versions so each backend
is internally consistent between its scalar and batched entry points.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def hist_counts(values, lo, hi, h):
    w = (hi - lo) / h
    counts = np.zeros(h, dtype=np.int64)
    top = h - 1
    for i in range(values.shape[0]):
        j = int(math.floor((values[i] - lo) / w))
        if j > top:
            j = top
        counts[j] += 1
    return counts


@njit(cache=True)
def nll_bits_from_counts(counts, lo, hi):
    n = 0
    for j in range(counts.shape[0]):
        n += counts[j]
    if n == 0:
        return 0.0
    w = (hi - lo) / counts.shape[0]
    acc = 0.0
    for j in range(counts.shape[0]):
        c = counts[j]
        if c > 0:
            acc += c * math.log2(c / (n * w))
    return -acc


@njit(cache=True)
def nll_bits_for_h(values, lo, hi, h):
    return nll_bits_from_counts(hist_counts(values, lo, hi, h), lo, hi)


@njit(cache=True)
def scan_nll_bits(values, lo, hi, hs):
    out = np.empty(hs.shape[0], dtype=np.float64)
    for t in range(hs.shape[0]):
        out[t] = nll_bits_for_h(values, lo, hi, int(hs[t]))
    return out


@njit(cache=True)
def extend_regret_row(row, n, start):
    for k in range(start, row.shape[0]):
        a = row[k - 1]
        b = math.log2(n / (k - 2)) + row[k - 2]
        m = a if a > b else b
        row[k] = m + math.log2(2.0 ** (a - m) + 2.0 ** (b - m))
