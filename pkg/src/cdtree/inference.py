"""Routing and read-only queries against a fitted tree.

Densities use the raw maximum-likelihood bin weights: a target outside the
global boundary or in an empty bin has density zero (log density -inf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CdTree, ColumnKind, DataError, Internal, Leaf, TreeNode


def _check_vector(tree: CdTree, x) -> np.ndarray:
    vec = np.asarray(x, dtype=np.float64)
    if vec.shape != (tree.schema.m,):
        raise DataError(
            f"feature vector has shape {vec.shape}, schema expects ({tree.schema.m},)"
        )
    if not np.isfinite(vec).all():
        raise DataError("feature vector holds a non-finite value")
    return vec


def _descend(root: TreeNode, vec: np.ndarray) -> tuple[str, Leaf]:
    path = ""
    node = root
    while isinstance(node, Internal):
        if vec[node.split.feature_index] <= node.split.threshold:
            path += "L"
            node = node.left
        else:
            path += "R"
            node = node.right
    return path, node


def route(tree: CdTree, x) -> str:
    """Leaf identifier (path of L/R moves, '' for the root) for a row."""
    vec = _check_vector(tree, x)
    path, _ = _descend(tree.root, vec)
    return path


def leaf_partitions(
    tree: CdTree, features: np.ndarray
) -> list[tuple[str, Leaf, np.ndarray]]:
    """Depth-first (path, leaf, row-index array) partition of a matrix."""
    out: list[tuple[str, Leaf, np.ndarray]] = []

    def recurse(node: TreeNode, path: str, rows: np.ndarray) -> None:
        if isinstance(node, Leaf):
            out.append((path, node, rows))
            return
        mask = features[rows, node.split.feature_index] <= node.split.threshold
        recurse(node.left, path + "L", rows[mask])
        recurse(node.right, path + "R", rows[~mask])

    recurse(tree.root, "", np.arange(len(features)))
    return out


def _leaf_log_density(leaf: Leaf, y: float) -> float:
    hist = leaf.hist
    lo, hi = hist.bounds.lower, hist.bounds.upper
    if y < lo or y > hi or hist.n == 0:
        return -math.inf
    w = hist.bin_width
    j = min(int(math.floor((y - lo) / w)), hist.h - 1)
    c = int(hist.counts[j])
    if c == 0:
        return -math.inf
    return math.log(c / (hist.n * w))


def log_density(tree: CdTree, x, y: float) -> float:
    """Natural-log conditional density at (x, y); -inf when density is 0."""
    vec = _check_vector(tree, x)
    _, leaf = _descend(tree.root, vec)
    return _leaf_log_density(leaf, y)


def density_grid(tree: CdTree, x, points: int) -> np.ndarray:
    """(points, 2) array of (y, density) pairs for the leaf x routes to.

    When points equals the leaf's bin count the grid sits on bin midpoints
    and reproduces the per-bin densities exactly; otherwise it is evenly
    spaced over the global boundary.
    """
    if points < 2:
        raise ValueError(f"grid needs at least 2 points, got {points}")
    vec = _check_vector(tree, x)
    _, leaf = _descend(tree.root, vec)
    hist = leaf.hist
    lo, hi = hist.bounds.lower, hist.bounds.upper
    w = hist.bin_width
    if points == hist.h:
        ys = lo + w * (np.arange(points) + 0.5)
    else:
        ys = np.linspace(lo, hi, points)
    if hist.n == 0:
        dens = np.zeros(points)
    else:
        idx = np.minimum(np.floor((ys - lo) / w).astype(np.int64), hist.h - 1)
        dens = np.asarray(hist.counts)[idx] / (hist.n * w)
    return np.column_stack([ys, dens])


@dataclass(frozen=True)
class RuleCondition:
    feature: str
    op: str  # "<=" or ">"
    threshold: float
    binary: bool

    def render(self) -> str:
        if self.binary:
            return f"{self.feature} = {'0' if self.op == '<=' else '1'}"
        return f"{self.feature} {self.op} {self.threshold:.6g}"


@dataclass(frozen=True)
class LeafRule:
    """Root-to-leaf conditions with logically redundant ones removed."""

    leaf_id: str
    conditions: tuple[RuleCondition, ...]
    n: int
    h: int

    def render(self) -> str:
        if self.conditions:
            body = " and ".join(c.render() for c in self.conditions)
        else:
            body = "true"
        return f"{body} -> leaf(n={self.n}, h={self.h})"


def leaf_rules(tree: CdTree) -> list[LeafRule]:
    """One rule per leaf, keeping only the tightest bound per feature and
    direction, ordered by feature index."""
    rules: list[LeafRule] = []

    def recurse(node: TreeNode, path: str, trail: list[tuple[int, str, float]]):
        if isinstance(node, Leaf):
            upper: dict[int, float] = {}
            lower: dict[int, float] = {}
            for j, op, s in trail:
                if op == "<=":
                    upper[j] = min(upper.get(j, math.inf), s)
                else:
                    lower[j] = max(lower.get(j, -math.inf), s)
            conds = []
            for j in sorted(set(upper) | set(lower)):
                name, kind = tree.schema.columns[j]
                binary = kind is ColumnKind.BINARY
                if j in lower:
                    conds.append(RuleCondition(name, ">", lower[j], binary))
                if j in upper:
                    conds.append(RuleCondition(name, "<=", upper[j], binary))
            rules.append(
                LeafRule(path, tuple(conds), n=node.hist.n, h=node.hist.h)
            )
            return
        j, s = node.split.feature_index, node.split.threshold
        recurse(node.left, path + "L", trail + [(j, "<=", s)])
        recurse(node.right, path + "R", trail + [(j, ">", s)])

    recurse(tree.root, "", [])
    return rules
