"""Best-split search for one tree node.

Continuous features are searched over a granularity hierarchy: level d
offers the c * 2^(d-1) equal-frequency quantiles of the node's local column
values, and the level's code cost is charged while comparing. The search
descends to level d+1 only while the best level total keeps strictly
improving. Binary features are tested once at 0.5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .codes import RegretCache, rissanen_code_length
from .core import ColumnKind, DataFrame, FitConfig, SplitCondition
from .histogram import Bounds, LeafScore, optimal_histogram


@dataclass(frozen=True)
class SplitProposal:
    """One candidate node split with its scored children.

    delta_bits is the change in the full-tree score if the split is
    applied, including the structure-cost change supplied by the caller.
    """

    condition: SplitCondition
    left_score: LeafScore
    right_score: LeafScore
    split_code_bits: float
    delta_bits: float


def candidate_thresholds(values, d: int, c: int) -> np.ndarray:
    """Equal-frequency quantile thresholds at granularity level d.

    With Q = c * 2^(d-1) candidates, returns the order statistics at ranks
    ceil(i*n/(Q+1)), deduplicated and with anything equal to the column
    maximum dropped so both children stay non-empty.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        raise ValueError("cannot place thresholds on an empty column")
    if d < 1:
        raise ValueError(f"granularity level must be >= 1, got {d}")
    nvals = vals.size
    q = c * 2 ** (d - 1)
    ordered = np.sort(vals)
    ranks = np.array(
        [(i * nvals + q) // (q + 1) for i in range(1, q + 1)], dtype=np.int64
    )
    thresholds = np.unique(ordered[ranks - 1])
    return thresholds[thresholds < ordered[-1]]


def split_code_bits(m: int, c: int, kind: ColumnKind, d: Optional[int]) -> float:
    """Bits to name the split feature and its splitting value."""
    name_bits = math.log2(m)
    if kind is ColumnKind.BINARY:
        return name_bits + 1.0
    return name_bits + rissanen_code_length(d) + math.log2(c) + (d - 1)


@dataclass(frozen=True)
class _Candidate:
    """Search-internal record; local_delta excludes the structure change."""

    local_delta: float
    feature_index: int
    threshold: float
    level: int  # 0 for binary splits
    kind: ColumnKind
    left: LeafScore
    right: LeafScore
    code_bits: float

    @property
    def order_key(self):
        return (self.local_delta, self.feature_index, self.threshold, self.level)

    def condition(self) -> SplitCondition:
        if self.kind is ColumnKind.BINARY:
            return SplitCondition(self.feature_index, self.kind)
        return SplitCondition(self.feature_index, self.kind, self.threshold, self.level)


def _score_children(
    col: np.ndarray,
    target: np.ndarray,
    s: float,
    bounds: Bounds,
    config: FitConfig,
    cache: RegretCache,
) -> Optional[tuple[LeafScore, LeafScore]]:
    mask = col <= s
    n_left = int(mask.sum())
    if n_left < config.min_leaf or len(col) - n_left < config.min_leaf:
        return None
    left = optimal_histogram(target[mask], bounds, config.g, cache)
    right = optimal_histogram(target[~mask], bounds, config.g, cache)
    return left, right


def evaluate_candidate(
    node_rows: DataFrame,
    j: int,
    s: float,
    bounds: Bounds,
    config: FitConfig,
    cache: RegretCache,
) -> Optional[tuple[LeafScore, LeafScore]]:
    """Score the two children induced by x_j <= s, or None when a child
    would fall below min_leaf."""
    return _score_children(
        node_rows.features[:, j], node_rows.target, s, bounds, config, cache
    )


def _search_feature(
    j: int,
    kind: ColumnKind,
    col: np.ndarray,
    target: np.ndarray,
    bounds: Bounds,
    config: FitConfig,
    cache: RegretCache,
    current_total: float,
    m: int,
) -> Optional[_Candidate]:
    if kind is ColumnKind.BINARY:
        pair = _score_children(col, target, 0.5, bounds, config, cache)
        if pair is None:
            return None
        bits = split_code_bits(m, config.c, kind, None)
        delta = pair[0].total_bits + pair[1].total_bits + bits - current_total
        return _Candidate(delta, j, 0.5, 0, kind, pair[0], pair[1], bits)

    evaluated: dict[float, Optional[tuple[LeafScore, LeafScore]]] = {}
    feature_best: Optional[_Candidate] = None
    prev_level_delta = None
    d = 1
    while True:
        bits = split_code_bits(m, config.c, kind, d)
        level_best: Optional[_Candidate] = None
        for s in candidate_thresholds(col, d, config.c):
            s = float(s)
            if s in evaluated:
                pair = evaluated[s]
            else:
                pair = _score_children(col, target, s, bounds, config, cache)
                evaluated[s] = pair
            if pair is None:
                continue
            delta = pair[0].total_bits + pair[1].total_bits + bits - current_total
            cand = _Candidate(delta, j, s, d, kind, pair[0], pair[1], bits)
            if level_best is None or cand.order_key < level_best.order_key:
                level_best = cand
        if level_best is None:
            break
        if prev_level_delta is not None and level_best.local_delta >= prev_level_delta:
            break
        feature_best = level_best
        prev_level_delta = level_best.local_delta
        d += 1
    return feature_best


def search_node(
    node_rows: DataFrame,
    bounds: Bounds,
    config: FitConfig,
    cache: RegretCache,
    current_leaf: LeafScore,
) -> Optional[_Candidate]:
    """Best raw split of the node regardless of whether it improves on
    keeping the leaf; the learner rebases its delta as the tree grows."""
    if node_rows.n == 0:
        raise ValueError("cannot split an empty node")
    best: Optional[_Candidate] = None
    for j, (_, kind) in enumerate(node_rows.schema.columns):
        cand = _search_feature(
            j,
            kind,
            node_rows.features[:, j],
            node_rows.target,
            bounds,
            config,
            cache,
            current_leaf.total_bits,
            node_rows.schema.m,
        )
        if cand is not None and (best is None or cand.order_key < best.order_key):
            best = cand
    return best


def best_split_for_node(
    node_rows: DataFrame,
    bounds: Bounds,
    config: FitConfig,
    cache: RegretCache,
    current_leaf: LeafScore,
    structure_delta_bits: float = 0.0,
) -> Optional[SplitProposal]:
    """Best improving split of the node, or None when keeping the leaf wins.

    structure_delta_bits carries the change in tree-size and tree-shape
    code when the leaf count grows by one; the learner supplies it so
    delta_bits is the exact change of the full-tree score.
    """
    cand = search_node(node_rows, bounds, config, cache, current_leaf)
    if cand is None:
        return None
    delta = cand.local_delta + structure_delta_bits
    if delta >= 0.0:
        return None
    return SplitProposal(
        condition=cand.condition(),
        left_score=cand.left,
        right_score=cand.right,
        split_code_bits=cand.code_bits,
        delta_bits=delta,
    )
