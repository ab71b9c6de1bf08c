"""Command line interface.

Exit status is 0 on success, 1 on a usage error and 2 when input data
cannot be read or does not fit together.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import estimate_dmax
from .classifiers import FlexKnnConfig, KnnConfig, Voting, classify_batch
from .dataio import (
    NormalizationParams,
    apply_normalization,
    fit_normalization,
    load_training_set,
    read_dataset,
    write_dataset,
)
from .errors import DataError, FlexKnnError
from .evaluation import (
    DEFAULT_GRID,
    evaluate,
    missing_class_experiment,
    parse_grid,
    sweep_dmax,
)
from .metrics import Metric
from .synthdata import SCENARIOS, ScenarioSpec, generate_scenario

USAGE_ERROR = 1
DATA_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def _metric(text):
    try:
        return Metric.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text):
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _vector(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}") from None


def _float_list(text):
    return _vector(text)


def _int_list(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def _centers(text):
    return [_vector(part) for part in text.split(";") if part.strip()]


def _add_model_flags(p, flexible_only=False):
    p.add_argument("--metric", type=_metric, default=Metric(), metavar="NAME",
                   help="euclidean, manhattan, canberra or minkowski:<p>")
    p.add_argument("--voting", choices=[v.value for v in Voting], default="majority",
                   help="how neighbors vote")
    p.add_argument("--min-k", type=_positive_int, default=1,
                   help="fewest neighbors within --dmax needed to give a label")
    if not flexible_only:
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--dmax", type=_positive_float, default=None,
                           help="radius of the flexible classifier")
        group.add_argument("--k", type=_positive_int, default=None,
                           help="number of neighbors of the standard classifier")
    p.add_argument("--norm", type=Path, default=None, metavar="JSON",
                   help="normalization parameters applied to all data")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="flexknn", description="Flexible and standard k-nearest-neighbor classification.",
                     formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("synth", help="generate a synthetic data set", formatter_class=fmt)
    p.add_argument("--scenario", choices=SCENARIOS, required=True, help="layout to generate")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--centers", type=_centers, default=None,
                   help="clusters: class centers, e.g. '0,0;5,5'")
    p.add_argument("--spread", type=_float_list, default="1.0",
                   help="clusters: standard deviation, one value or one per class")
    p.add_argument("--count", type=_int_list, default="20",
                   help="clusters: training samples, one value or one per class")
    p.add_argument("--test-count", type=_int_list, default="0",
                   help="clusters: test samples, one value or one per class")
    p.add_argument("--names", default=None,
                   help="clusters: comma-separated class names (class1, class2, ... if omitted)")
    p.add_argument("--out", type=Path, default=None, help="training CSV (standard output if omitted)")
    p.add_argument("--test-out", type=Path, default=None,
                   help="test CSV; <out>_test.csv when omitted and --out is given")
    p.add_argument("--hidden-out", type=Path, default=None,
                   help="CSV of samples from the class unknown to the classifier; "
                        "<out>_hidden.csv when omitted and --out is given")

    p = sub.add_parser("fit-norm", help="fit z-score parameters on training data", formatter_class=fmt)
    p.add_argument("--train", type=Path, required=True, help="training CSV")
    p.add_argument("--out", type=Path, default=None, help="output file (standard output if omitted)")

    p = sub.add_parser("estimate-dmax", help="estimate the radius from class spreads", formatter_class=fmt)
    p.add_argument("--train", type=Path, required=True, help="training CSV")
    p.add_argument("--metric", type=_metric, default=Metric(), metavar="NAME",
                   help="euclidean, manhattan, canberra or minkowski:<p>")
    p.add_argument("--aggregate", choices=("mean", "median"), default="mean",
                   help="how per-class spreads are combined")
    p.add_argument("--norm", type=Path, default=None, metavar="JSON",
                   help="normalization parameters applied to the data")
    p.add_argument("--out", type=Path, default=None, help="output file (standard output if omitted)")

    p = sub.add_parser("classify", help="classify query vectors", formatter_class=fmt)
    p.add_argument("--train", type=Path, required=True, help="training CSV")
    p.add_argument("--query", type=_vector, action="append", required=True,
                   help="comma-separated feature values; repeat for several queries")
    _add_model_flags(p)

    p = sub.add_parser("evaluate", help="score a classifier on a test set", formatter_class=fmt)
    p.add_argument("--train", type=Path, required=True, help="training CSV")
    p.add_argument("--test", type=Path, required=True, help="test CSV")
    _add_model_flags(p)
    p.add_argument("--out", type=Path, default=None, help="JSON report")

    p = sub.add_parser("sweep", help="evaluate the flexible classifier over a radius grid",
                       formatter_class=fmt)
    p.add_argument("--train", type=Path, required=True, help="training CSV")
    p.add_argument("--test", type=Path, required=True, help="test CSV")
    p.add_argument("--grid", type=_grid, default=DEFAULT_GRID, metavar="START:STEP:END",
                   help="radii to evaluate, end included")
    _add_model_flags(p, flexible_only=True)
    p.add_argument("--out", type=Path, default=None, help="CSV, one row per radius")

    p = sub.add_parser("holdout", help="evaluate with some classes removed from training",
                       formatter_class=fmt)
    p.add_argument("--train", type=Path, required=True, help="training CSV")
    p.add_argument("--test", type=Path, required=True, help="test CSV")
    p.add_argument("--exclude", required=True, help="comma-separated class names to hold out")
    _add_model_flags(p)
    p.add_argument("--out", type=Path, default=None, help="JSON report")
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load(args):
    params = NormalizationParams.load(args.norm) if getattr(args, "norm", None) else None
    train = load_training_set(args.train)
    test = read_dataset(args.test) if getattr(args, "test", None) else None
    if params is not None:
        train = apply_normalization(params, train)
        if test is not None:
            test = apply_normalization(params, test)
    return params, train, test


def _config(args):
    if args.dmax is not None:
        return FlexKnnConfig(args.dmax, args.metric, args.voting, args.min_k)
    if args.voting == Voting.RATIO.value:
        raise UsageError("--voting ratio needs --dmax (the standard classifier has no ratio vote)")
    return KnnConfig(args.k, args.metric, args.voting)


def _config_dict(cfg) -> dict:
    if isinstance(cfg, FlexKnnConfig):
        return {"classifier": "flexknn", "dmax": cfg.d_max, "metric": str(cfg.metric),
                "voting": cfg.voting.value, "min_k": cfg.min_k}
    return {"classifier": "knn", "k": cfg.k, "metric": str(cfg.metric), "voting": cfg.voting.value}


def _cmd_synth(args):
    spec = ScenarioSpec(
        args.scenario,
        seed=args.seed,
        centers=args.centers,
        spreads=args.spread if len(args.spread) > 1 else args.spread[0],
        counts=args.count if len(args.count) > 1 else args.count[0],
        test_counts=args.test_count if len(args.test_count) > 1 else args.test_count[0],
        names=args.names.split(",") if args.names else None,
    )
    if args.scenario == "clusters" and not spec.centers:
        raise UsageError("--centers is required for --scenario clusters")
    scenario = generate_scenario(spec)
    if args.out is None:
        write_dataset(scenario.train, sys.stdout)
    else:
        write_dataset(scenario.train, args.out)
    stem = None if args.out is None else args.out.with_suffix("")
    test_out = args.test_out or (stem and Path(f"{stem}_test.csv"))
    hidden_out = args.hidden_out or (stem and Path(f"{stem}_hidden.csv"))
    if scenario.test and test_out:
        write_dataset(scenario.test, test_out)
    if scenario.hidden and hidden_out:
        write_dataset(scenario.hidden, hidden_out)


def _cmd_fit_norm(args):
    params = fit_normalization(load_training_set(args.train))
    _emit(params.to_json() + "\n", args.out)


def _cmd_estimate_dmax(args):
    _, train, _ = _load(args)
    est = estimate_dmax(train, args.metric)
    record = {
        "metric": str(args.metric),
        "per_class": {train.label(cid).name: v for cid, v in est.per_class.items()},
        "aggregate_mean": est.aggregate_mean,
        "aggregate_median": est.aggregate_median,
        "skipped_classes": [train.label(cid).name for cid in est.skipped_classes],
        "aggregate": args.aggregate,
        "dmax": est.aggregate(args.aggregate),
    }
    _emit(_json(record), args.out)


def _cmd_classify(args):
    cfg = _config(args)
    params, train, _ = _load(args)
    dims = {len(q) for q in args.query}
    if dims != {train.dimension}:
        raise UsageError(f"--query must have {train.dimension} values per vector")
    queries = args.query
    if params is not None:
        queries = apply_normalization(params, np.array(queries))
    for out in classify_batch(train, queries, cfg):
        if out.rejected:
            print(f"label=rejected k={out.k_found} reason={out.rejection.value}")
        else:
            print(f"label={out.label.name} k={out.k_found}")


def _cmd_evaluate(args):
    cfg = _config(args)
    _, train, test = _load(args)
    report = evaluate(train, test, cfg)
    _emit(_json({"config": _config_dict(cfg), **report.to_dict()}), args.out)


def _cmd_sweep(args):
    _, train, test = _load(args)
    sweep = sweep_dmax(train, test, args.grid, args.metric, args.voting, args.min_k)
    _emit(sweep.to_csv(), args.out)


def _cmd_holdout(args):
    cfg = _config(args)
    held = [h.strip() for h in args.exclude.split(",") if h.strip()]
    if not held:
        raise UsageError("--exclude needs at least one class name")
    _, train, test = _load(args)
    report = missing_class_experiment(train, test, held, cfg)
    _emit(_json({"config": _config_dict(cfg), **report.to_dict()}), args.out)


COMMANDS = {
    "synth": _cmd_synth,
    "fit-norm": _cmd_fit_norm,
    "estimate-dmax": _cmd_estimate_dmax,
    "classify": _cmd_classify,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "holdout": _cmd_holdout,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"flexknn {args.command}: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (DataError, FlexKnnError, OSError, ValueError, KeyError) as exc:
        print(f"flexknn {args.command}: data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
