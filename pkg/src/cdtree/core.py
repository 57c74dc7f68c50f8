"""Shared domain types: schemas, frames, histograms, trees, scores.

Everything here is immutable after construction and safe to share across
workers. Algorithms live in the other modules; this one only carries data
and invariant checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

import numpy as np


class ValidationError(ValueError):
    """A domain-type invariant does not hold."""


class DataError(ValueError):
    """Malformed input data (ingestion, schema mismatch, missing cells)."""


class FitError(RuntimeError):
    """Training cannot proceed (empty frame, degenerate target, ...)."""


class ColumnKind(Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"


@dataclass(frozen=True)
class Schema:
    """Feature column names/kinds plus the target name."""

    columns: tuple[tuple[str, ColumnKind], ...]
    target_name: str

    def __post_init__(self):
        names = [name for name, _ in self.columns]
        if len(names) < 1:
            raise ValidationError("schema needs at least one feature column")
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise ValidationError(f"duplicate column name {dup!r}")
        if self.target_name in names:
            raise ValidationError(
                f"target {self.target_name!r} is also a feature column"
            )

    @property
    def m(self) -> int:
        return len(self.columns)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.columns)

    def kind_of(self, index: int) -> ColumnKind:
        return self.columns[index][1]

    def index_of(self, name: str) -> int:
        for i, (col, _) in enumerate(self.columns):
            if col == name:
                return i
        raise DataError(f"unknown feature column {name!r}")


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DataFrame:
    """Row-major tabular dataset: n*m feature matrix plus target vector.

    Construction only coerces dtypes; invariants (binary 0/1 values, length
    agreement) are checked by :func:`validate` so malformed frames can be
    built and reported on.
    """

    schema: Schema
    features: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "features", _frozen_array(self.features, np.float64))
        object.__setattr__(self, "target", _frozen_array(self.target, np.float64))
        if self.features.ndim != 2:
            raise ValidationError("features must be a 2-d matrix")
        if self.target.ndim != 1:
            raise ValidationError("target must be a 1-d vector")

    @property
    def n(self) -> int:
        return len(self.target)

    def take(self, rows: np.ndarray) -> "DataFrame":
        return DataFrame(self.schema, self.features[rows], self.target[rows])


def validate(frame: DataFrame) -> None:
    """Check all DataFrame invariants; raise on the first violation."""
    n_feat, m_feat = frame.features.shape
    if m_feat != frame.schema.m:
        raise ValidationError(
            f"feature matrix has {m_feat} columns, schema declares {frame.schema.m}"
        )
    if n_feat != frame.n:
        raise ValidationError(
            f"length mismatch: {n_feat} feature rows vs {frame.n} target values"
        )
    if not np.isfinite(frame.features).all():
        row, col = np.argwhere(~np.isfinite(frame.features))[0]
        name = frame.schema.columns[col][0]
        raise ValidationError(f"non-finite value in column {name!r}, row {row}")
    if not np.isfinite(frame.target).all():
        row = int(np.flatnonzero(~np.isfinite(frame.target))[0])
        raise ValidationError(f"non-finite target value in row {row}")
    for j, (name, kind) in enumerate(frame.schema.columns):
        if kind is ColumnKind.BINARY:
            col = frame.features[:, j]
            bad = np.flatnonzero((col != 0.0) & (col != 1.0))
            if bad.size:
                raise ValidationError(
                    f"binary column {name!r} holds {col[bad[0]]!r} in row {bad[0]}"
                )


@dataclass(frozen=True)
class Bounds:
    """Global histogram boundary for the target variable."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower < self.upper):
            raise ValidationError(
                f"bounds require lower < upper, got [{self.lower}, {self.upper}]"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class FittedHistogram:
    """Equal-width histogram over a shared boundary with per-bin counts."""

    bounds: Bounds
    h: int
    counts: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "counts", _frozen_array(self.counts, np.int64))
        if self.h < 1:
            raise ValidationError(f"bin count must be >= 1, got {self.h}")
        if len(self.counts) != self.h:
            raise ValidationError(
                f"{len(self.counts)} counts for {self.h} bins"
            )
        if int(self.counts.sum()) != self.n:
            raise ValidationError(
                f"counts sum to {int(self.counts.sum())}, expected n={self.n}"
            )
        if (self.counts < 0).any():
            raise ValidationError("negative bin count")

    @property
    def bin_width(self) -> float:
        return self.bounds.width / self.h


@dataclass(frozen=True)
class SplitCondition:
    """Routing test at an internal node: rows with x_j <= threshold go left.

    Continuous splits record the granularity level d of the quantile
    hierarchy they were drawn from (it is part of the model code length).
    Binary splits always test at 0.5 and carry no granularity.
    """

    feature_index: int
    kind: ColumnKind
    threshold: float = 0.5
    granularity: Optional[int] = None

    def __post_init__(self):
        if self.feature_index < 0:
            raise ValidationError("feature index must be non-negative")
        if self.kind is ColumnKind.CONTINUOUS:
            if self.granularity is None or self.granularity < 1:
                raise ValidationError("continuous split needs granularity >= 1")
        else:
            if self.granularity is not None:
                raise ValidationError("binary split carries no granularity")
            if self.threshold != 0.5:
                raise ValidationError("binary split always tests at 0.5")


@dataclass(frozen=True)
class Leaf:
    hist: FittedHistogram


@dataclass(frozen=True)
class Internal:
    split: SplitCondition
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class FitConfig:
    """Training knobs. Defaults follow the method's standard settings."""

    c: int = 5
    g: int = 30
    boundary_pad: float = 1e-3
    min_leaf: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.c < 1:
            raise ValidationError("c must be >= 1")
        if self.g < 1:
            raise ValidationError("g must be >= 1")
        if self.boundary_pad < 0:
            raise ValidationError("boundary_pad must be >= 0")
        if self.min_leaf < 1:
            raise ValidationError("min_leaf must be >= 1")


@dataclass(frozen=True)
class CdTree:
    """Full binary tree with histogram leaves sharing one global boundary."""

    schema: Schema
    bounds: Bounds
    root: TreeNode
    config: FitConfig

    def __post_init__(self):
        for path, node in iter_nodes(self.root):
            if isinstance(node, Leaf):
                if node.hist.bounds != self.bounds:
                    raise ValidationError(
                        f"leaf {path or 'root'} does not share the tree bounds"
                    )
            else:
                split = node.split
                if split.feature_index >= self.schema.m:
                    raise ValidationError(
                        f"split on feature index {split.feature_index}, m={self.schema.m}"
                    )
                if self.schema.kind_of(split.feature_index) is not split.kind:
                    name = self.schema.columns[split.feature_index][0]
                    raise ValidationError(
                        f"split kind does not match column kind of {name!r}"
                    )


def iter_nodes(root: TreeNode) -> Iterator[tuple[str, TreeNode]]:
    """Depth-first pre-order walk yielding (path, node); root path is ''."""
    stack = [("", root)]
    while stack:
        path, node = stack.pop()
        yield path, node
        if isinstance(node, Internal):
            stack.append((path + "R", node.right))
            stack.append((path + "L", node.left))


def iter_leaves(root: TreeNode) -> Iterator[tuple[str, Leaf]]:
    for path, node in iter_nodes(root):
        if isinstance(node, Leaf):
            yield path, node


def iter_internal(root: TreeNode) -> Iterator[tuple[str, Internal]]:
    for path, node in iter_nodes(root):
        if isinstance(node, Internal):
            yield path, node


@dataclass(frozen=True)
class MdlScore:
    """Total description length in bits, decomposed.

    total_bits is derived in __post_init__, so the sum invariant holds by
    construction.
    """

    data_nll_bits: float
    regret_bits: float
    structure_bits: float
    split_bits: float
    bin_count_bits: float
    total_bits: float = field(init=False)

    def __post_init__(self):
        if self.regret_bits < 0:
            raise ValidationError("regret_bits must be >= 0")
        for label, value in (
            ("structure_bits", self.structure_bits),
            ("split_bits", self.split_bits),
            ("bin_count_bits", self.bin_count_bits),
        ):
            if value < 0:
                raise ValidationError(f"{label} must be >= 0")
        total = (
            self.data_nll_bits
            + self.regret_bits
            + self.structure_bits
            + self.split_bits
            + self.bin_count_bits
        )
        if not math.isfinite(total):
            raise ValidationError("score components must be finite")
        object.__setattr__(self, "total_bits", total)
