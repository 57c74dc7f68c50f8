"""CSV ingestion, fold splitting, and synthetic/noisy-feature generators.

Ingestion rules: numeric columns with exactly two distinct raw values
become binary (smaller value -> 0, larger -> 1); other numeric columns stay
continuous; text columns are one-hot encoded into "col=value" indicator
columns in first-appearance order. Jitter (small Gaussian noise that breaks
duplicate values) applies to continuous feature columns and the target,
never to binary indicators. Missing cells are a hard error.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import ColumnKind, DataError, DataFrame, Schema


@dataclass(frozen=True)
class IngestConfig:
    target_column: str
    jitter_sd: float = 1e-3
    one_hot: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.jitter_sd < 0:
            raise DataError("jitter_sd must be >= 0")


@dataclass(frozen=True)
class NoiseSpec:
    """Irrelevant-feature injection: independent standard-normal columns,
    or noisy copies of sampled existing columns."""

    mode: str  # "independent" | "dependent"
    w: int
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("independent", "dependent"):
            raise DataError(f"noise mode must be independent|dependent, got {self.mode!r}")
        if self.w < 1:
            raise DataError("w must be >= 1")


def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: empty file, header row required") from None
            rows = [row for row in reader]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8: {exc}") from exc
    header = [name.strip() for name in header]
    if len(set(header)) != len(header):
        raise DataError(f"{path}: duplicate column names in header")
    for i, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise DataError(f"{path}: row {i} has {len(row)} cells, expected {len(header)}")
    return header, rows


def _parse_column(name: str, cells: list[str]):
    """Return float values when every cell parses as a finite number, else None."""
    values = np.empty(len(cells), dtype=np.float64)
    for i, cell in enumerate(cells):
        text = cell.strip()
        if text == "":
            raise DataError(f"missing cell in row {i + 1}, column {name!r}")
        try:
            val = float(text)
        except ValueError:
            return None
        if not math.isfinite(val):
            raise DataError(f"non-finite value {text!r} in row {i + 1}, column {name!r}")
        values[i] = val
    return values


def load_csv(path, config: IngestConfig) -> DataFrame:
    """Load a CSV into a typed frame; deterministic given the seed."""
    header, rows = _read_rows(path)
    if config.target_column not in header:
        raise DataError(f"{path}: target column {config.target_column!r} not found")
    # reject missing cells everywhere before any typing decision
    for i, row in enumerate(rows, start=1):
        for name, cell in zip(header, row):
            if cell.strip() == "":
                raise DataError(f"missing cell in row {i}, column {name!r}")

    columns: list[tuple[str, ColumnKind, np.ndarray]] = []
    target = None
    for j, name in enumerate(header):
        cells = [row[j] for row in rows]
        numeric = _parse_column(name, cells)
        if name == config.target_column:
            if numeric is None:
                raise DataError(f"target column {name!r} is not numeric")
            target = numeric
            continue
        if numeric is not None:
            distinct = np.unique(numeric)
            if len(distinct) == 2:
                columns.append(
                    (name, ColumnKind.BINARY, (numeric == distinct[1]).astype(np.float64))
                )
            else:
                columns.append((name, ColumnKind.CONTINUOUS, numeric))
        else:
            if not config.one_hot:
                raise DataError(
                    f"text column {name!r} requires one-hot encoding (one_hot=False)"
                )
            levels: list[str] = []
            for cell in cells:
                text = cell.strip()
                if text not in levels:
                    levels.append(text)
            for level in levels:
                indicator = np.array(
                    [1.0 if cell.strip() == level else 0.0 for cell in cells]
                )
                columns.append((f"{name}={level}", ColumnKind.BINARY, indicator))

    if not columns:
        raise DataError(f"{path}: no feature columns besides the target")

    if config.jitter_sd > 0:
        rng = np.random.default_rng(config.seed)
        for idx, (name, kind, values) in enumerate(columns):
            if kind is ColumnKind.CONTINUOUS:
                columns[idx] = (
                    name,
                    kind,
                    values + rng.normal(0.0, config.jitter_sd, size=len(values)),
                )
        target = target + rng.normal(0.0, config.jitter_sd, size=len(target))

    schema = Schema(
        columns=tuple((name, kind) for name, kind, _ in columns),
        target_name=config.target_column,
    )
    features = (
        np.column_stack([vals for _, _, vals in columns])
        if rows
        else np.empty((0, len(columns)))
    )
    return DataFrame(schema=schema, features=features, target=target)


def save_csv(frame: DataFrame, path) -> None:
    """Write a frame as CSV (features then target); floats via repr so a
    jitter-free reload reproduces the frame exactly."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(frame.schema.feature_names) + [frame.schema.target_name])
        for i in range(frame.n):
            writer.writerow(
                [repr(float(v)) for v in frame.features[i]]
                + [repr(float(frame.target[i]))]
            )


def kfold(frame: DataFrame, folds: int, seed: int) -> list[tuple[DataFrame, DataFrame]]:
    """Seeded shuffle, contiguous fold assignment; first n%folds test sets
    take the remainder."""
    if folds < 2:
        raise DataError(f"folds must be >= 2, got {folds}")
    if folds > frame.n:
        raise DataError(f"{folds} folds but only {frame.n} rows")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(frame.n)
    base, extra = divmod(frame.n, folds)
    out = []
    start = 0
    for f in range(folds):
        size = base + (1 if f < extra else 0)
        test_idx = perm[start : start + size]
        train_idx = np.concatenate([perm[:start], perm[start + size :]])
        out.append((frame.take(train_idx), frame.take(test_idx)))
        start += size
    return out


def _fresh_name(base: str, taken: set[str]) -> str:
    name = base
    suffix = 2
    while name in taken:
        name = f"{base}_{suffix}"
        suffix += 1
    return name


def inject_noise_features(
    frame: DataFrame, spec: NoiseSpec
) -> tuple[DataFrame, list[str]]:
    """Append w irrelevant feature columns; original columns and the target
    are untouched. Returns the new frame and the injected column names
    (all carry the noise_ prefix)."""
    rng = np.random.default_rng(spec.seed)
    taken = set(frame.schema.feature_names) | {frame.schema.target_name}
    new_cols: list[np.ndarray] = []
    new_names: list[str] = []

    if spec.mode == "independent":
        for i in range(1, spec.w + 1):
            name = _fresh_name(f"noise_{i}", taken)
            taken.add(name)
            new_names.append(name)
            new_cols.append(rng.standard_normal(frame.n))
    else:
        sds = frame.features.std(axis=0, ddof=1) if frame.n > 1 else np.zeros(frame.schema.m)
        eligible = np.flatnonzero(np.nan_to_num(sds) > 0)
        if len(eligible) < spec.w:
            raise DataError(
                f"dependent mode needs {spec.w} source columns with positive"
                f" standard deviation, found {len(eligible)}"
            )
        chosen = rng.choice(eligible, size=spec.w, replace=False)
        for j in chosen:
            src_name = frame.schema.columns[j][0]
            name = _fresh_name(f"noise_{src_name}", taken)
            taken.add(name)
            new_names.append(name)
            new_cols.append(
                frame.features[:, j] + rng.normal(0.0, sds[j] / 2.0, size=frame.n)
            )

    schema = Schema(
        columns=frame.schema.columns
        + tuple((name, ColumnKind.CONTINUOUS) for name in new_names),
        target_name=frame.schema.target_name,
    )
    features = np.column_stack([frame.features] + new_cols)
    return DataFrame(schema=schema, features=features, target=frame.target), new_names


def make_step_dataset(n: int, m_noise: int, seed: int) -> DataFrame:
    """Step benchmark: y ~ U(0, 0.5) when x1 <= 0.5 else U(0.5, 1), plus
    m_noise standard-normal columns z1..zk. True conditional log density is
    ln 2 on-support."""
    if n < 1:
        raise DataError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(0.0, 1.0, n)
    y = rng.uniform(0.0, 0.5, n) + np.where(x1 <= 0.5, 0.0, 0.5)
    cols = [("x1", ColumnKind.CONTINUOUS)]
    mats = [x1]
    for i in range(1, m_noise + 1):
        cols.append((f"z{i}", ColumnKind.CONTINUOUS))
        mats.append(rng.standard_normal(n))
    schema = Schema(columns=tuple(cols), target_name="y")
    return DataFrame(schema=schema, features=np.column_stack(mats), target=y)
