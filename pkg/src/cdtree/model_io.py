"""Versioned JSON model format.

Splits are stored by feature name so a model survives column reordering in
prediction data. Floats go through repr, so a round trip preserves routing
and log densities exactly; serialization is byte-deterministic.
"""

from __future__ import annotations

import json
from typing import Optional

from .core import (
    Bounds,
    CdTree,
    ColumnKind,
    DataError,
    FitConfig,
    FittedHistogram,
    Internal,
    Leaf,
    Schema,
    TreeNode,
)
from .learner import FitTrace

FORMAT_VERSION = 1


def _node_to_dict(node: TreeNode, schema: Schema) -> dict:
    if isinstance(node, Leaf):
        return {
            "type": "leaf",
            "h": node.hist.h,
            "counts": [int(c) for c in node.hist.counts],
            "n": node.hist.n,
        }
    split = node.split
    return {
        "type": "split",
        "feature": schema.columns[split.feature_index][0],
        "kind": split.kind.value,
        "threshold": split.threshold,
        "granularity": split.granularity,
        "left": _node_to_dict(node.left, schema),
        "right": _node_to_dict(node.right, schema),
    }


def tree_to_dict(tree: CdTree, trace: Optional[FitTrace] = None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "schema": {
            "columns": [[name, kind.value] for name, kind in tree.schema.columns],
            "target": tree.schema.target_name,
        },
        "bounds": {"lower": tree.bounds.lower, "upper": tree.bounds.upper},
        "config": {
            "c": tree.config.c,
            "g": tree.config.g,
            "boundary_pad": tree.config.boundary_pad,
            "min_leaf": tree.config.min_leaf,
            "seed": tree.config.seed,
        },
        "tree": _node_to_dict(tree.root, tree.schema),
    }
    if trace is not None:
        doc["trace"] = {
            "initial_total_bits": trace.initial_total_bits,
            "final_total_bits": trace.final_total_bits,
            "splits": [
                {
                    "iteration": r.iteration,
                    "leaf": r.leaf_id,
                    "feature": tree.schema.columns[r.condition.feature_index][0],
                    "threshold": r.condition.threshold,
                    "total_before": r.total_before,
                    "total_after": r.total_after,
                }
                for r in trace.records
            ],
        }
    return doc


def _node_from_dict(doc: dict, schema: Schema, bounds: Bounds) -> TreeNode:
    if doc["type"] == "leaf":
        return Leaf(
            FittedHistogram(bounds=bounds, h=doc["h"], counts=doc["counts"], n=doc["n"])
        )
    if doc["type"] != "split":
        raise DataError(f"unknown node type {doc['type']!r} in model file")
    from .core import SplitCondition

    index = schema.index_of(doc["feature"])
    kind = ColumnKind(doc["kind"])
    if kind is ColumnKind.BINARY:
        cond = SplitCondition(index, kind)
    else:
        cond = SplitCondition(index, kind, doc["threshold"], doc["granularity"])
    return Internal(
        split=cond,
        left=_node_from_dict(doc["left"], schema, bounds),
        right=_node_from_dict(doc["right"], schema, bounds),
    )


def tree_from_dict(doc: dict) -> CdTree:
    try:
        if doc.get("format_version") != FORMAT_VERSION:
            raise DataError(
                f"unsupported model format version {doc.get('format_version')!r}"
            )
        schema = Schema(
            columns=tuple(
                (name, ColumnKind(kind)) for name, kind in doc["schema"]["columns"]
            ),
            target_name=doc["schema"]["target"],
        )
        bounds = Bounds(doc["bounds"]["lower"], doc["bounds"]["upper"])
        cfg = doc["config"]
        config = FitConfig(
            c=cfg["c"],
            g=cfg["g"],
            boundary_pad=cfg["boundary_pad"],
            min_leaf=cfg["min_leaf"],
            seed=cfg["seed"],
        )
        root = _node_from_dict(doc["tree"], schema, bounds)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"malformed model file: {exc}") from exc
    return CdTree(schema=schema, bounds=bounds, root=root, config=config)


def dumps(tree: CdTree, trace: Optional[FitTrace] = None) -> str:
    return json.dumps(tree_to_dict(tree, trace), indent=2, sort_keys=True) + "\n"


def save(tree: CdTree, path, trace: Optional[FitTrace] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(tree, trace))


def load(path) -> CdTree:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON: {exc}") from exc
    return tree_from_dict(doc)
