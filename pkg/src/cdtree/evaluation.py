"""Held-out evaluation: test NLL, cross-validation, tree-size reporting.

Negative log-likelihoods are reported in nats (the convention of the CDE
benchmarking literature); the training objective itself stays in bits.
Zero-density events (target outside the boundary or in an empty bin) are
counted and clamped to a floor instead of silently smoothed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CdTree, DataError, DataFrame, FitConfig, iter_internal, iter_leaves
from .data import kfold
from .inference import _leaf_log_density, leaf_partitions
from .learner import fit

#: default clamp: ln(1e-10)
DEFAULT_CLAMP_FLOOR_NATS = math.log(1e-10)


@dataclass(frozen=True)
class EvalReport:
    n_test: int
    mean_nll_nats: float
    zero_density_events: int
    clamp_floor_nats: float


@dataclass(frozen=True)
class CvReport:
    fold_reports: tuple[EvalReport, ...]
    fold_leaf_counts: tuple[int, ...]
    mean_nll_nats: float
    sd_nll_nats: float
    mean_leaves: float


def _check_conformance(tree: CdTree, frame: DataFrame) -> None:
    if frame.schema != tree.schema:
        raise DataError("frame schema does not match the model schema")


def log_densities(tree: CdTree, frame: DataFrame) -> np.ndarray:
    """Natural-log conditional density for every row (may hold -inf)."""
    _check_conformance(tree, frame)
    out = np.empty(frame.n, dtype=np.float64)
    for _, leaf, rows in leaf_partitions(tree, frame.features):
        for i in rows:
            out[i] = _leaf_log_density(leaf, float(frame.target[i]))
    return out


def evaluate_nll(
    tree: CdTree,
    test: DataFrame,
    clamp_floor_nats: float = DEFAULT_CLAMP_FLOOR_NATS,
) -> EvalReport:
    """Mean held-out NLL with zero-density events counted and clamped."""
    dens = log_densities(tree, test)
    zero = int(np.sum(np.isneginf(dens)))
    clamped = np.where(np.isneginf(dens), clamp_floor_nats, dens)
    mean_nll = float(-np.mean(clamped)) if test.n else 0.0
    return EvalReport(
        n_test=test.n,
        mean_nll_nats=mean_nll,
        zero_density_events=zero,
        clamp_floor_nats=clamp_floor_nats,
    )


def leaf_count(tree: CdTree) -> int:
    return sum(1 for _ in iter_leaves(tree.root))


def count_irrelevant_splits(tree: CdTree, irrelevant_columns) -> int:
    """Internal nodes whose split feature is in the given name set."""
    names = set(irrelevant_columns)
    known = set(tree.schema.feature_names)
    unknown = names - known
    if unknown:
        raise DataError(f"unknown feature column {sorted(unknown)[0]!r}")
    count = 0
    for _, node in iter_internal(tree.root):
        if tree.schema.columns[node.split.feature_index][0] in names:
            count += 1
    return count


def cross_validate(
    frame: DataFrame,
    folds: int,
    config: FitConfig,
    seed: int,
    clamp_floor_nats: float = DEFAULT_CLAMP_FLOOR_NATS,
) -> CvReport:
    """Fit on each training fold (boundaries from that fold's targets) and
    evaluate on the held-out fold."""
    reports = []
    leaves = []
    for train, test in kfold(frame, folds, seed):
        tree, _ = fit(train, config)
        reports.append(evaluate_nll(tree, test, clamp_floor_nats))
        leaves.append(leaf_count(tree))
    nlls = np.array([r.mean_nll_nats for r in reports])
    return CvReport(
        fold_reports=tuple(reports),
        fold_leaf_counts=tuple(leaves),
        mean_nll_nats=float(nlls.mean()),
        sd_nll_nats=float(nlls.std(ddof=1)),
        mean_leaves=float(np.mean(leaves)),
    )
