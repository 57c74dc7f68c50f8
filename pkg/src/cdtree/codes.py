"""Code-length primitives in bits.

Universal integer code for positive integers, log2 Catalan numbers for full
binary tree structures, and the multinomial normalized-maximum-likelihood
regret with a brute-force enumeration oracle for testing.
"""

from __future__ import annotations

import math
from itertools import combinations
from threading import Lock

import numpy as np

from . import kernels

#: Universal-code constant (log2 of ~2.865). Other choices shift every
#: model's score by the same amount and never change a selection.
UNIVERSAL_CODE_CONSTANT = 2.865064
_LOG2_CONSTANT = math.log2(UNIVERSAL_CODE_CONSTANT)

_LN2 = math.log(2.0)


def rissanen_code_length(n: int) -> float:
    """Universal code length for a positive integer, in bits.

    log2(2.865064) + log2(n) + log2 log2(n) + ..., keeping only the
    strictly positive terms of the iterated logarithm.
    """
    if n < 1:
        raise ValueError(f"universal integer code needs n >= 1, got {n}")
    bits = _LOG2_CONSTANT
    term = math.log2(n)
    while term > 0.0:
        bits += term
        term = math.log2(term)
    return bits


class _RissanenTable:
    """Growable table of rissanen_code_length(1..k), indexed by k."""

    def __init__(self):
        self._values = np.zeros(1, dtype=np.float64)  # slot 0 unused
        self._lock = Lock()

    def row(self, kmax: int) -> np.ndarray:
        if kmax >= len(self._values):
            with self._lock:
                if kmax >= len(self._values):
                    new = np.empty(max(kmax + 1, 2 * len(self._values)))
                    new[: len(self._values)] = self._values
                    for k in range(len(self._values), len(new)):
                        new[k] = rissanen_code_length(k) if k >= 1 else 0.0
                    self._values = new
        return self._values


_RISSANEN = _RissanenTable()


def rissanen_row(kmax: int) -> np.ndarray:
    """Array r with r[k] = rissanen_code_length(k) for 1 <= k <= kmax."""
    return _RISSANEN.row(kmax)


def log2_catalan(k: int) -> float:
    """log2 of the k-th Catalan number (2k)! / ((k+1)! k!)."""
    if k < 0:
        raise ValueError(f"Catalan numbers need k >= 0, got {k}")
    return (
        math.lgamma(2 * k + 1) - math.lgamma(k + 2) - math.lgamma(k + 1)
    ) / _LN2


class _Log2FactTable:
    """Growable table of log2(k!)."""

    def __init__(self):
        self._values = np.zeros(2, dtype=np.float64)
        self._lock = Lock()

    def row(self, nmax: int) -> np.ndarray:
        if nmax >= len(self._values):
            with self._lock:
                if nmax >= len(self._values):
                    old = self._values
                    new = np.empty(max(nmax + 1, 2 * len(old)))
                    new[: len(old)] = old
                    for k in range(len(old), len(new)):
                        new[k] = new[k - 1] + math.log2(k)
                    self._values = new
        return self._values


_LOG2FACT = _Log2FactTable()


def _regret_base_log2(n: int) -> float:
    """log2 R(n,2) by the exact O(n) sum over left-bin occupancies.

    R(n,2) = sum_a C(n,a) (a/n)^a ((n-a)/n)^(n-a) with 0^0 = 1; evaluated
    as a log-sum-exp. The a=0 and a=n endpoints each contribute exactly 1.
    """
    if n == 0:
        return 0.0
    if n == 1:
        return 1.0
    lf = _LOG2FACT.row(n)
    a = np.arange(1, n, dtype=np.float64)
    log2n = math.log2(n)
    terms = (
        lf[n]
        - lf[1:n]
        - lf[n - 1 : 0 : -1]
        + a * (np.log2(a) - log2n)
        + (n - a) * (np.log2(n - a) - log2n)
    )
    m = max(float(terms.max()), 0.0)
    # the two endpoint terms enter as 2 * 2**(0 - m)
    return m + math.log2(2.0 * 2.0 ** (-m) + float(np.sum(np.exp2(terms - m))))


class RegretCache:
    """Memoized log2 multinomial regret rows, one per sample count n.

    Row r for a given n holds r[k] = log2 R(n,k); r[1] is 0 and rows are
    non-decreasing in k. Reads and inserts are guarded by a lock so one
    cache can serve concurrent split-evaluation workers; values are
    identical regardless of interleaving because every entry is a pure
    function of (n, k).
    """

    def __init__(self):
        self._rows: dict[int, np.ndarray] = {}
        self._lock = Lock()

    def row(self, n: int, kmax: int) -> np.ndarray:
        row = self._rows.get(n)
        if row is not None and len(row) > kmax:
            return row
        with self._lock:
            row = self._rows.get(n)
            if row is not None and len(row) > kmax:
                return row
            size = max(kmax + 1, 4)
            if row is None:
                new = np.empty(size, dtype=np.float64)
                new[0] = 0.0
                new[1] = 0.0
                if n == 0:
                    new[2:] = 0.0
                    self._rows[n] = new
                    return new
                new[2] = _regret_base_log2(n)
                start = 3
            else:
                size = max(size, 2 * len(row))
                new = np.empty(size, dtype=np.float64)
                new[: len(row)] = row
                start = len(row)
            if n == 0:
                new[start:] = 0.0
            else:
                kernels.extend_regret_row(new, n, start)
            self._rows[n] = new
            return new

    def get(self, n: int, k: int) -> float:
        return float(self.row(n, k)[k])


def log_multinomial_regret(n: int, k: int, cache: RegretCache) -> float:
    """log2 of the NML regret R(n,k) of a k-category multinomial."""
    if k < 1:
        raise ValueError(f"regret needs k >= 1, got {k}")
    if n < 0:
        raise ValueError(f"regret needs n >= 0, got {n}")
    if n == 0 or k == 1:
        return 0.0
    return cache.get(n, k)


_ORACLE_MAX_N = 12
_ORACLE_MAX_K = 6


def regret_oracle(n: int, k: int) -> float:
    """log2 R(n,k) by direct enumeration of all compositions of n into k.

    Test oracle only; bounded to n <= 12, k <= 6 where enumeration stays
    cheap. Stays independent of the recurrence path it checks.
    """
    if n < 0 or k < 1:
        raise ValueError("oracle needs n >= 0 and k >= 1")
    if n > _ORACLE_MAX_N or k > _ORACLE_MAX_K:
        raise ValueError(
            f"oracle bounded to n <= {_ORACLE_MAX_N}, k <= {_ORACLE_MAX_K}"
        )
    if n == 0:
        return 0.0
    total = 0.0
    # compositions of n into k ordered non-negative parts via bar positions
    for bars in combinations(range(n + k - 1), k - 1):
        parts = []
        prev = -1
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(n + k - 2 - prev)
        coeff = math.factorial(n)
        prob = 1.0
        for p in parts:
            coeff //= math.factorial(p)
            if p > 0:
                prob *= (p / n) ** p
        total += coeff * prob
    return math.log2(total)
