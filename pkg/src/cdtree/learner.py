"""Greedy tree growth minimizing the total description length.

Each iteration searches every current leaf for its best split, charges the
tree-size/shape code change for going from K to K+1 leaves, and applies the
single split that lowers the full-tree score the most. Growth stops when no
split strictly improves the score.

Searches for leaves untouched by the last split are reused across
iterations (a split never changes another leaf's rows, so the raw search
result stays valid; only the structure-cost rebasing depends on K).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .codes import RegretCache, log2_catalan, log_multinomial_regret, rissanen_code_length
from .core import (
    Bounds,
    CdTree,
    DataFrame,
    FitConfig,
    FitError,
    Internal,
    Leaf,
    MdlScore,
    SplitCondition,
    iter_internal,
    iter_leaves,
    validate,
)
from .core import FittedHistogram
from .histogram import LeafScore, fit_histogram, histogram_nll_bits, optimal_histogram
from .inference import leaf_partitions
from .splitter import _Candidate, search_node, split_code_bits


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    leaf_id: str
    condition: SplitCondition
    total_before: float
    total_after: float


@dataclass(frozen=True)
class FitTrace:
    """Witness of the greedy loop: applied splits and the score descent."""

    initial_total_bits: float
    records: tuple[TraceRecord, ...]

    @property
    def final_total_bits(self) -> float:
        return self.records[-1].total_after if self.records else self.initial_total_bits


def structure_delta_bits(k: int) -> float:
    """Change in tree-size + tree-shape code when k leaves become k+1."""
    return (
        rissanen_code_length(k + 1)
        - rissanen_code_length(k)
        + log2_catalan(k)
        - log2_catalan(k - 1)
    )


def model_code_length_bits(tree: CdTree) -> float:
    """Bits to transmit the model: leaf count, shape, splits, bin counts.

    The shared target boundary costs the same for every model and is
    omitted.
    """
    leaves = list(iter_leaves(tree.root))
    k = len(leaves)
    bits = rissanen_code_length(k) + log2_catalan(k - 1)
    for _, node in iter_internal(tree.root):
        bits += split_code_bits(
            tree.schema.m, tree.config.c, node.split.kind, node.split.granularity
        )
    for _, leaf in leaves:
        bits += rissanen_code_length(leaf.hist.h)
    return bits


def total_mdl_score(tree: CdTree, frame: DataFrame, cache: Optional[RegretCache] = None) -> MdlScore:
    """Score the tree against a frame from scratch.

    Routes every row, re-tallies each leaf's counts at its stored bin
    count, and assembles the full decomposition.
    """
    if frame.schema != tree.schema:
        raise FitError("frame schema does not match the tree schema")
    y = frame.target
    if len(y) and (y.min() < tree.bounds.lower or y.max() > tree.bounds.upper):
        raise FitError("target value outside the tree's global bounds")
    if cache is None:
        cache = RegretCache()

    parts = leaf_partitions(tree, frame.features)
    nll = 0.0
    regret = 0.0
    bin_bits = 0.0
    for _, leaf, rows in parts:
        h = leaf.hist.h
        refit = fit_histogram(y[rows], tree.bounds, h)
        nll += histogram_nll_bits(refit)
        regret += log_multinomial_regret(len(rows), h, cache)
        bin_bits += rissanen_code_length(h)

    k = len(parts)
    split_bits = 0.0
    for _, node in iter_internal(tree.root):
        split_bits += split_code_bits(
            tree.schema.m, tree.config.c, node.split.kind, node.split.granularity
        )
    return MdlScore(
        data_nll_bits=nll,
        regret_bits=regret,
        structure_bits=rissanen_code_length(k) + log2_catalan(k - 1),
        split_bits=split_bits,
        bin_count_bits=bin_bits,
    )


@dataclass(eq=False)
class _LeafState:
    path: str
    rows: np.ndarray
    score: LeafScore
    hist: FittedHistogram
    searched: bool = False
    best: Optional[_Candidate] = None


def _make_leaf_state(
    frame: DataFrame, rows: np.ndarray, bounds: Bounds, config: FitConfig, cache: RegretCache
) -> _LeafState:
    score = optimal_histogram(frame.target[rows], bounds, config.g, cache)
    hist = fit_histogram(frame.target[rows], bounds, score.h)
    return _LeafState(path="", rows=rows, score=score, hist=hist)


def fit(
    frame: DataFrame,
    config: FitConfig,
    reuse_searches: bool = True,
) -> tuple[CdTree, FitTrace]:
    """Grow a tree on the frame; returns the tree and its fit trace.

    reuse_searches=False recomputes every leaf's split search each
    iteration (the naive loop); results are identical and the flag exists
    so tests can assert that.
    """
    validate(frame)
    if frame.n < 1:
        raise FitError("cannot fit on an empty frame")
    y = frame.target
    lo = float(y.min()) - config.boundary_pad
    hi = float(y.max()) + config.boundary_pad
    if not lo < hi:
        raise FitError(
            "degenerate target range; use a positive boundary_pad for a constant target"
        )
    bounds = Bounds(lo, hi)
    cache = RegretCache()

    root_state = _make_leaf_state(frame, np.arange(frame.n), bounds, config, cache)
    leaves: list[_LeafState] = [root_state]  # kept in depth-first order
    splits: dict[str, SplitCondition] = {}
    initial_total = (
        root_state.score.total_bits + rissanen_code_length(1) + log2_catalan(0)
    )
    total = initial_total
    trace: list[TraceRecord] = []

    iteration = 0
    while True:
        k = len(leaves)
        struct_delta = structure_delta_bits(k)
        best_leaf = None
        best_key = None
        for state in leaves:
            if not (reuse_searches and state.searched):
                node_frame = frame.take(state.rows)
                state.best = search_node(node_frame, bounds, config, cache, state.score)
                state.searched = True
            if state.best is None:
                continue
            key = state.best.order_key
            if best_key is None or key < best_key:
                best_key = key
                best_leaf = state
        if best_leaf is None:
            break
        delta = best_leaf.best.local_delta + struct_delta
        if delta >= 0.0:
            break

        cand = best_leaf.best
        cond = cand.condition()
        col = frame.features[best_leaf.rows, cond.feature_index]
        mask = col <= cond.threshold
        left_rows = best_leaf.rows[mask]
        right_rows = best_leaf.rows[~mask]
        left = _LeafState(
            path=best_leaf.path + "L",
            rows=left_rows,
            score=cand.left,
            hist=fit_histogram(y[left_rows], bounds, cand.left.h),
        )
        right = _LeafState(
            path=best_leaf.path + "R",
            rows=right_rows,
            score=cand.right,
            hist=fit_histogram(y[right_rows], bounds, cand.right.h),
        )
        splits[best_leaf.path] = cond
        pos = leaves.index(best_leaf)
        leaves[pos : pos + 1] = [left, right]

        new_total = total + delta
        trace.append(
            TraceRecord(
                iteration=iteration,
                leaf_id=best_leaf.path or "root",
                condition=cond,
                total_before=total,
                total_after=new_total,
            )
        )
        total = new_total
        iteration += 1
        if iteration >= frame.n:  # every split shrinks a leaf; bound is n-1
            break

    hists = {state.path: state.hist for state in leaves}

    def build(path: str):
        if path in splits:
            return Internal(splits[path], build(path + "L"), build(path + "R"))
        return Leaf(hists[path])

    tree = CdTree(schema=frame.schema, bounds=bounds, root=build(""), config=config)
    return tree, FitTrace(initial_total_bits=initial_total, records=tuple(trace))
