"""Command-line entry point.

Subcommands: simulate, standardize, test, power, nulls, rainfall. Every
run prints one JSON document to stdout (a report or a manifest) and
artifact-producing runs write the same manifest next to their outputs, so
any run can be reproduced from its recorded flags, seed and version.

Exit codes: 0 success / null not rejected, 2 invalid flags, 3 null
rejected, 4 numerical or data failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import __version__
from .copulas import CopulaModel, sample
from .errors import TailTestError
from .experiments import (ExperimentPlan, k_sensitivity_study, null_histogram_study,
                          size_power_study, write_nulls_outputs, write_power_outputs)
from .inference import TestConfig, run_test
from .ingest import load_csv, seasonal_tests
from .margins import KNOWN_CDF_STUBS, Sample, to_pareto, to_pseudo
from .numerics import RngStream

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REJECT = 3
EXIT_FAILURE = 4

_FAMILIES = {
    "logistic": "logistic",
    "outer-power-clayton": "outer_power_clayton",
    "asymmetric-logistic": "asymmetric_logistic",
}


def _sets_type(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("at least 2 partition sets are required")
    return value


def _grid_type(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}")


def _add_model_args(parser, suffix=""):
    parser.add_argument(f"--family{suffix}", required=True, choices=sorted(_FAMILIES))
    parser.add_argument(f"--theta{suffix}", type=float, required=True)
    parser.add_argument(f"--psi{suffix}", type=float, nargs=2, default=None,
                        metavar=("PSI1", "PSI2"))


def _model_from_args(args, suffix=""):
    family = _FAMILIES[getattr(args, f"family{suffix}".replace("-", "_"))]
    theta = getattr(args, f"theta{suffix}".replace("-", "_"))
    psi = getattr(args, f"psi{suffix}".replace("-", "_"))
    return CopulaModel(family, theta, tuple(psi) if psi else None)


def _add_test_flags(parser):
    parser.add_argument("--risk", default="l2", choices=["max", "min", "l2", "l1"])
    parser.add_argument("--sets", type=_sets_type, default=None,
                        help="number of partition cells (required for l1/l2)")
    parser.add_argument("--k-exceedances", type=int, required=True)
    parser.add_argument("--level", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=0)


def _add_bootstrap_flags(parser):
    parser.add_argument("--margins", default="empirical", choices=["known", "empirical"])
    parser.add_argument("--known-cdf", default="uniform", choices=sorted(KNOWN_CDF_STUBS))
    parser.add_argument("--bootstrap", type=int, default=1000,
                        help="bootstrap replicates for empirical margins")
    parser.add_argument("--bootstrap-exceedances", default="proportional",
                        choices=["proportional", "same"])
    parser.add_argument("--bootstrap-source", default="x", choices=["x", "symmetric"])


def _default_outdir(args) -> str:
    if getattr(args, "outdir", None):
        return args.outdir
    return os.environ.get("TAILTEST_OUTDIR", ".")


def _read_sample(path: str) -> Sample:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise TailTestError(f"could not read sample CSV {path!r}: {exc}") from exc
    return Sample(data)


def _write_sample(path: str, data: np.ndarray):
    header = ",".join(f"x{j + 1}" for j in range(data.shape[1]))
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


def _emit(doc: dict):
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _write_manifest(doc: dict, path: str):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


def _cmd_simulate(args) -> int:
    model = _model_from_args(args)
    drawn = sample(model, args.size, RngStream(args.seed))
    _write_sample(args.out, drawn.data)
    manifest_path = args.out + ".manifest.json"
    doc = {
        "command": "simulate",
        "model": dataclasses.asdict(model),
        "n": args.size,
        "seed": args.seed,
        "outputs": {"csv": args.out, "manifest": manifest_path},
        "version": __version__,
    }
    _write_manifest(doc, manifest_path)
    _emit(doc)
    return EXIT_OK


def _cmd_standardize(args) -> int:
    raw = _read_sample(args.input)
    if args.margins == "known":
        cdf = KNOWN_CDF_STUBS[args.known_cdf]
        out = to_pareto(raw, [cdf] * raw.d)
    else:
        out = to_pseudo(raw)
    _write_sample(args.out, out.data)
    manifest_path = args.out + ".manifest.json"
    doc = {
        "command": "standardize",
        "input": args.input,
        "margins": args.margins,
        "known_cdf": args.known_cdf if args.margins == "known" else None,
        "n": out.n,
        "dim": out.d,
        "rank_ties": out.ties,
        "outputs": {"csv": args.out, "manifest": manifest_path},
        "version": __version__,
    }
    _write_manifest(doc, manifest_path)
    _emit(doc)
    return EXIT_OK


def _cmd_test(args) -> int:
    x = _read_sample(args.x)
    y = _read_sample(args.y)
    config = TestConfig(
        k_exceedances=args.k_exceedances,
        risk=args.risk,
        num_cells=args.sets,
        level=args.level,
        margins=args.margins,
        bootstrap_replicates=args.bootstrap,
        bootstrap_exceedances=args.bootstrap_exceedances,
        bootstrap_source=args.bootstrap_source,
        seed=args.seed,
    )
    cdfs = None
    if args.margins == "known":
        cdf = KNOWN_CDF_STUBS[args.known_cdf]
        cdfs = [cdf] * x.d
    report = run_test(x, y, config, known_cdfs=cdfs)
    doc = report.to_dict()
    if args.out:
        _write_manifest(doc, args.out)
    _emit(doc)
    return EXIT_REJECT if report.reject else EXIT_OK


def _cmd_power(args) -> int:
    if (args.k_grid is None) == (args.set_grid is None):
        raise TailTestError("pass exactly one of --k-grid and --set-grid")
    plan = ExperimentPlan(
        model_x=_model_from_args(args, "-x"),
        model_y=_model_from_args(args, "-y"),
        n=args.size,
        repetitions=args.reps,
        risk=args.risk,
        num_cells=args.sets,
        k_grid=args.k_grid,
        K_grid=args.set_grid,
        k_exceedances=args.k_exceedances,
        margins=args.margins,
        level=args.level,
        bootstrap_replicates=args.bootstrap,
        seed=args.seed,
        workers=args.workers,
    )
    outdir = _default_outdir(args)
    if plan.k_grid is not None:
        curve = size_power_study(plan)
        manifest = write_power_outputs(curve, plan, outdir, name="power")
    else:
        curve = k_sensitivity_study(plan)
        manifest = write_power_outputs(curve, plan, outdir, name="ksets")
    _emit(manifest)
    return EXIT_OK


def _cmd_nulls(args) -> int:
    model = _model_from_args(args)
    result = null_histogram_study(model, args.size, args.k_exceedances, args.sets,
                                  args.bootstrap, seed=args.seed, risk=args.risk)
    manifest = write_nulls_outputs(result, _default_outdir(args))
    _emit(manifest)
    return EXIT_OK


def _cmd_rainfall(args) -> int:
    series = load_csv(args.input, timestamp_col=args.timestamp_col,
                      depth_col=args.depth_col, missing_token=args.missing_token,
                      station_id=args.station)
    config = TestConfig(
        k_exceedances=args.k_exceedances,
        risk=args.risk,
        num_cells=args.sets,
        level=args.level,
        margins="empirical",
        bootstrap_replicates=args.bootstrap,
        seed=args.seed,
    )
    outcomes = seasonal_tests(series, config,
                              drop_incomplete_days=not args.keep_incomplete_days,
                              drop_dry_days=not args.keep_dry_days)
    outdir = _default_outdir(args)
    os.makedirs(outdir, exist_ok=True)

    from .ingest import SEASONS, build_pairs
    seasons_doc = {}
    outputs = {}
    for season in SEASONS:
        try:
            pairs = build_pairs(series, season,
                                drop_incomplete_days=not args.keep_incomplete_days,
                                drop_dry_days=not args.keep_dry_days)
            path = os.path.join(outdir, f"pairs_{season}.csv")
            _write_sample(path, pairs.data)
            outputs[f"pairs_{season}"] = path
            seasons_doc[season] = {"days": pairs.n, "error": None}
        except TailTestError as exc:
            seasons_doc[season] = {"days": None, "error": str(exc)}

    pairs_doc = {}
    for (sx, sy), outcome in outcomes.items():
        key = f"{sx}_{sy}"
        if outcome.report is None:
            pairs_doc[key] = {"error": outcome.error}
            continue
        report_path = os.path.join(outdir, f"report_{key}.json")
        _write_manifest(outcome.report.to_dict(), report_path)
        outputs[f"report_{key}"] = report_path
        pairs_doc[key] = {
            "error": None,
            "p_value": outcome.report.p_value,
            "reject": outcome.report.reject,
            "statistic": outcome.report.statistic,
            "k_used": outcome.k_used,
        }
    doc = {
        "command": "rainfall",
        "input": args.input,
        "station": args.station,
        "seasons": seasons_doc,
        "pairs": pairs_doc,
        "outputs": outputs,
        "version": __version__,
    }
    manifest_path = os.path.join(outdir, "rainfall_summary.json")
    _write_manifest(doc, manifest_path)
    _emit(doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailtest",
        description="Two-sample divergence test for multivariate extremal dependence.",
    )
    parser.add_argument("--version", action="version", version=f"tailtest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="draw a bivariate copula sample to CSV")
    _add_model_args(p_sim)
    p_sim.add_argument("-n", "--size", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=_cmd_simulate)

    p_std = sub.add_parser("standardize", help="transform a sample to the Pareto scale")
    p_std.add_argument("input")
    p_std.add_argument("--margins", default="empirical", choices=["known", "empirical"])
    p_std.add_argument("--known-cdf", default="uniform", choices=sorted(KNOWN_CDF_STUBS))
    p_std.add_argument("--out", required=True)
    p_std.set_defaults(func=_cmd_standardize)

    p_test = sub.add_parser("test", help="two-sample extremal dependence test")
    p_test.add_argument("x")
    p_test.add_argument("y")
    _add_test_flags(p_test)
    _add_bootstrap_flags(p_test)
    p_test.add_argument("--out", default=None, help="also write the report JSON here")
    p_test.set_defaults(func=_cmd_test)

    p_power = sub.add_parser("power", help="size/power study over a grid")
    _add_model_args(p_power, "-x")
    _add_model_args(p_power, "-y")
    p_power.add_argument("-n", "--size", type=int, required=True)
    p_power.add_argument("--reps", type=int, default=500)
    p_power.add_argument("--k-grid", type=_grid_type, default=None,
                         help="comma-separated exceedance numbers")
    p_power.add_argument("--set-grid", type=_grid_type, default=None,
                         help="comma-separated cell counts (angular risks)")
    p_power.add_argument("--k-exceedances", type=int, default=None,
                         help="fixed k for the --set-grid study")
    p_power.add_argument("--risk", default="l2", choices=["max", "min", "l2", "l1"])
    p_power.add_argument("--sets", type=_sets_type, default=None)
    p_power.add_argument("--level", type=float, default=0.05)
    p_power.add_argument("--seed", type=int, default=0)
    p_power.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p_power.add_argument("--outdir", default=None)
    _add_bootstrap_flags(p_power)
    p_power.set_defaults(func=_cmd_power)

    p_nulls = sub.add_parser("nulls", help="bootstrap vs fresh null replicates")
    _add_model_args(p_nulls)
    p_nulls.add_argument("-n", "--size", type=int, required=True)
    p_nulls.add_argument("--k-exceedances", type=int, required=True)
    p_nulls.add_argument("--sets", type=_sets_type, required=True)
    p_nulls.add_argument("--risk", default="l2", choices=["l2", "l1"])
    p_nulls.add_argument("--bootstrap", type=int, default=1000)
    p_nulls.add_argument("--seed", type=int, default=0)
    p_nulls.add_argument("--outdir", default=None)
    p_nulls.set_defaults(func=_cmd_nulls)

    p_rain = sub.add_parser("rainfall", help="seasonal precipitation pipeline")
    p_rain.add_argument("input")
    p_rain.add_argument("--timestamp-col", default="timestamp")
    p_rain.add_argument("--depth-col", default="depth")
    p_rain.add_argument("--missing-token", default="")
    p_rain.add_argument("--station", default="")
    _add_test_flags(p_rain)
    p_rain.add_argument("--bootstrap", type=int, default=1000)
    p_rain.add_argument("--keep-dry-days", action="store_true")
    p_rain.add_argument("--keep-incomplete-days", action="store_true")
    p_rain.add_argument("--outdir", default=None)
    p_rain.set_defaults(func=_cmd_rainfall)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "power" and args.risk in ("l1", "l2") and args.set_grid is None \
            and args.sets is None:
        parser.print_usage(sys.stderr)
        print("tailtest power: error: angular risks need --sets for a --k-grid study",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except TailTestError as exc:
        print(f"tailtest: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except FloatingPointError as exc:
        print(f"tailtest: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
