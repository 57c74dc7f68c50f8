"""Command-line surface: fit, evaluate, cv, predict, density, export,
robustness, synth.

Exit codes: 0 success, 1 for I/O and validation problems, 2 for
computation failures. Diagnostics go to stderr; results to stdout or the
requested output file.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import model_io
from .core import (
    CdTree,
    ColumnKind,
    DataError,
    DataFrame,
    FitConfig,
    FitError,
    Internal,
    Leaf,
    ValidationError,
    iter_nodes,
)
from .data import IngestConfig, NoiseSpec, inject_noise_features, kfold, load_csv, make_step_dataset, save_csv
from .evaluation import (
    DEFAULT_CLAMP_FLOOR_NATS,
    count_irrelevant_splits,
    cross_validate,
    evaluate_nll,
    leaf_count,
    log_densities,
)
from .inference import density_grid, leaf_rules
from .learner import fit, total_mdl_score


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise _UsageError(message)


def _add_fit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c", type=int, default=5, help="quantile-count base (default 5)")
    p.add_argument("--g", type=int, default=30, help="bin-search step size (default 30)")
    p.add_argument(
        "--jitter-sd",
        type=float,
        default=1e-3,
        help="sd of duplicate-breaking noise on load; 0 disables (default 1e-3)",
    )
    p.add_argument("--min-leaf", type=int, default=1, help="minimum rows per leaf (default 1)")
    p.add_argument("--seed", type=int, default=0, help="seed for jitter and shuffling (default 0)")


def _fit_config(args) -> FitConfig:
    if args.c < 1:
        raise DataError("c must be >= 1")
    if args.g < 1:
        raise DataError("g must be >= 1")
    if args.min_leaf < 1:
        raise DataError("min_leaf must be >= 1")
    if args.jitter_sd < 0:
        raise DataError("jitter-sd must be >= 0")
    return FitConfig(c=args.c, g=args.g, min_leaf=args.min_leaf, seed=args.seed)


def _load(path, target, jitter_sd, seed) -> DataFrame:
    return load_csv(path, IngestConfig(target_column=target, jitter_sd=jitter_sd, seed=seed))


def _align_to_model(tree: CdTree, frame: DataFrame) -> DataFrame:
    """Project a loaded frame onto the model's schema by column name."""
    cols = []
    for name, kind in tree.schema.columns:
        try:
            j = frame.schema.index_of(name)
        except DataError:
            raise DataError(f"data is missing model feature column {name!r}") from None
        have = frame.schema.columns[j][1]
        if have is not kind:
            raise DataError(
                f"column {name!r} is {have.value} in the data but {kind.value} in the model"
            )
        cols.append(frame.features[:, j])
    features = np.column_stack(cols) if cols else np.empty((frame.n, 0))
    return DataFrame(schema=tree.schema, features=features, target=frame.target)


def _print_score(tree: CdTree, frame: DataFrame, out) -> None:
    score = total_mdl_score(tree, frame)
    print(f"leaves,{leaf_count(tree)}", file=out)
    print(f"total_bits,{score.total_bits!r}", file=out)
    print(f"data_nll_bits,{score.data_nll_bits!r}", file=out)
    print(f"regret_bits,{score.regret_bits!r}", file=out)
    print(f"structure_bits,{score.structure_bits!r}", file=out)
    print(f"split_bits,{score.split_bits!r}", file=out)
    print(f"bin_count_bits,{score.bin_count_bits!r}", file=out)


def _cmd_fit(args, out) -> int:
    frame = _load(args.train, args.target, args.jitter_sd, args.seed)
    config = _fit_config(args)
    tree, trace = fit(frame, config)
    model_io.save(tree, args.out, trace)
    _print_score(tree, frame, out)
    print(f"model,{args.out}", file=out)
    return 0


def _cmd_evaluate(args, out) -> int:
    tree = model_io.load(args.model)
    frame = _align_to_model(
        tree, _load(args.data, tree.schema.target_name, 0.0, 0)
    )
    report = evaluate_nll(tree, frame, args.floor_nats)
    print(f"n_test,{report.n_test}", file=out)
    print(f"mean_nll_nats,{report.mean_nll_nats!r}", file=out)
    print(f"zero_density_events,{report.zero_density_events}", file=out)
    print(f"clamp_floor_nats,{report.clamp_floor_nats!r}", file=out)
    return 0


def _cmd_cv(args, out) -> int:
    frame = _load(args.data, args.target, args.jitter_sd, args.seed)
    config = _fit_config(args)
    if args.folds < 2:
        raise DataError("folds must be >= 2")
    report = cross_validate(frame, args.folds, config, args.seed)
    print("fold,n_test,mean_nll_nats,zero_density_events,leaves", file=out)
    for f, (rep, leaves) in enumerate(zip(report.fold_reports, report.fold_leaf_counts)):
        print(
            f"{f},{rep.n_test},{rep.mean_nll_nats!r},{rep.zero_density_events},{leaves}",
            file=out,
        )
    print(f"mean_nll_nats,{report.mean_nll_nats!r}", file=out)
    print(f"sd_nll_nats,{report.sd_nll_nats!r}", file=out)
    print(f"mean_leaves,{report.mean_leaves!r}", file=out)
    return 0


def _cmd_predict(args, out) -> int:
    tree = model_io.load(args.model)
    frame = _align_to_model(
        tree, _load(args.data, tree.schema.target_name, 0.0, 0)
    )
    dens = log_densities(tree, frame)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("log_density\n")
        for v in dens:
            fh.write(f"{float(v)!r}\n")
    print(f"rows,{len(dens)}", file=out)
    print(f"predictions,{args.out}", file=out)
    return 0


def _parse_x(text: str, m: int) -> np.ndarray:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != m:
        raise DataError(f"--x needs {m} comma-separated values, got {len(parts)}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise DataError(f"--x holds a non-numeric value: {exc}") from exc


def _cmd_density(args, out) -> int:
    tree = model_io.load(args.model)
    if args.points < 2:
        raise DataError("points must be >= 2")
    if (args.row is None) == (args.x is None):
        raise DataError("exactly one of --row or --x is required")
    if args.row is not None:
        if args.data is None:
            raise DataError("--row needs --data to index into")
        frame = _align_to_model(
            tree, _load(args.data, tree.schema.target_name, 0.0, 0)
        )
        if not (0 <= args.row < frame.n):
            raise DataError(f"row {args.row} out of range (n={frame.n})")
        x = frame.features[args.row]
    else:
        x = _parse_x(args.x, tree.schema.m)
    grid = density_grid(tree, x, args.points)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("y,density\n")
        for y, d in grid:
            fh.write(f"{float(y)!r},{float(d)!r}\n")
    print(f"points,{len(grid)}", file=out)
    print(f"grid,{args.out}", file=out)
    return 0


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _export_dot(tree: CdTree, out) -> None:
    ids = {}
    for path, _ in iter_nodes(tree.root):
        ids[path] = f"n{len(ids)}"
    print("digraph cdtree {", file=out)
    print("  node [shape=box];", file=out)
    for path, node in iter_nodes(tree.root):
        if isinstance(node, Leaf):
            label = f"n={node.hist.n}, h={node.hist.h}"
        else:
            name = tree.schema.columns[node.split.feature_index][0]
            if node.split.kind is ColumnKind.BINARY:
                label = f"{name} = 0"
            else:
                label = f"{name} <= {node.split.threshold:.6g}"
        print(f'  {ids[path]} [label="{_dot_escape(label)}"];', file=out)
    for path, node in iter_nodes(tree.root):
        if isinstance(node, Internal):
            print(f'  {ids[path]} -> {ids[path + "L"]} [label="yes"];', file=out)
            print(f'  {ids[path]} -> {ids[path + "R"]} [label="no"];', file=out)
    print("}", file=out)


def _cmd_export(args, out) -> int:
    tree = model_io.load(args.model)
    if args.format == "text":
        for rule in leaf_rules(tree):
            print(rule.render(), file=out)
    elif args.format == "dot":
        _export_dot(tree, out)
    else:
        out.write(model_io.dumps(tree))
    return 0


def _cmd_robustness(args, out) -> int:
    frame = _load(args.data, args.target, args.jitter_sd, args.seed)
    config = _fit_config(args)
    try:
        w_list = [int(w) for w in args.w.split(",") if w.strip()]
    except ValueError as exc:
        raise DataError(f"--w must be a comma-separated integer list: {exc}") from exc
    if not w_list or any(w < 1 for w in w_list):
        raise DataError("--w needs positive integers")
    if args.seeds < 1:
        raise DataError("--seeds must be >= 1")

    print(
        "mode,w,seed,irrelevant_splits,leaves,nll_nats,baseline_nll_nats,delta_nll_nats",
        file=out,
    )
    for run in range(args.seeds):
        train_base, test_base = kfold(frame, 5, seed=run)[0]
        base_tree, _ = fit(train_base, config)
        base_nll = evaluate_nll(base_tree, test_base).mean_nll_nats
        for w in w_list:
            noisy, injected = inject_noise_features(
                frame, NoiseSpec(mode=args.mode, w=w, seed=run)
            )
            train, test = kfold(noisy, 5, seed=run)[0]
            tree, _ = fit(train, config)
            bad = count_irrelevant_splits(tree, injected)
            nll = evaluate_nll(tree, test).mean_nll_nats
            print(
                f"{args.mode},{w},{run},{bad},{leaf_count(tree)},"
                f"{nll!r},{base_nll!r},{nll - base_nll!r}",
                file=out,
            )
    return 0


def _cmd_synth(args, out) -> int:
    if args.generator != "step":
        raise DataError(f"unknown generator {args.generator!r}; available: step")
    frame = make_step_dataset(args.n, args.noise, args.seed)
    save_csv(frame, args.out)
    print(f"rows,{frame.n}", file=out)
    print(f"columns,{frame.schema.m + 1}", file=out)
    print(f"data,{args.out}", file=out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="cdtree", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="learn a tree from a training CSV")
    p.add_argument("--train", required=True, help="training CSV path")
    p.add_argument("--target", required=True, help="target column name")
    _add_fit_flags(p)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("evaluate", help="held-out NLL of a model on a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument(
        "--floor-nats",
        type=float,
        default=DEFAULT_CLAMP_FLOOR_NATS,
        help="clamp for zero-density events (default ln 1e-10)",
    )
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("cv", help="k-fold cross-validation on a CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--folds", type=int, default=5)
    _add_fit_flags(p)
    p.set_defaults(func=_cmd_cv)

    p = sub.add_parser("predict", help="write per-row log densities")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("density", help="write a (y, density) grid for one row")
    p.add_argument("--model", required=True)
    p.add_argument("--row", type=int, default=None, help="row index into --data")
    p.add_argument("--x", default=None, help="comma-separated feature vector")
    p.add_argument("--data", default=None, help="CSV supplying --row")
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("export", help="render a model as rules, dot, or json")
    p.add_argument("--model", required=True)
    p.add_argument("--format", required=True, choices=["text", "dot", "json"])
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("robustness", help="irrelevant-feature robustness runs")
    p.add_argument("--data", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--mode", required=True, choices=["independent", "dependent"])
    p.add_argument("--w", required=True, help="comma-separated injected-feature counts")
    p.add_argument("--seeds", type=int, required=True, help="number of seeded runs")
    _add_fit_flags(p)
    p.set_defaults(func=_cmd_robustness)

    p = sub.add_parser("synth", help="write a synthetic dataset CSV")
    p.add_argument("generator", choices=["step"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--noise", type=int, default=0, help="extra standard-normal columns")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None, out=sys.stdout, err=sys.stderr) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=err)
        return 1
    try:
        return args.func(args, out)
    except (DataError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    except _UsageError as exc:
        print(f"error: {exc}", file=err)
        return 1
    except (FitError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    except Exception as exc:  # malformed input must never escape as a traceback
        print(f"internal error: {exc}", file=err)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
