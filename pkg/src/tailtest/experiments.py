"""Monte Carlo studies: size/power over a k_n grid, the role of the cell
count K, and bootstrap-vs-fresh null comparisons.

Repetition r of any study draws its data from streams keyed by the plan
seed and r, so results are reproducible and independent of the worker
count; partial re-runs of a repetition range produce identical numbers.
Studies emit plot-ready long-format CSV rows plus a JSON manifest carrying
the plan, seed and package version.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .copulas import CopulaModel, sample
from .divergence import kl_divergence
from .errors import ConfigError
from .inference import (TestConfig, bootstrap_null, bootstrap_p_value,
                        build_partition, derived_seed)
from .margins import Sample, to_pareto, to_pseudo, uniform_cdf
from .numerics import ChiSquared, RngStream, chisq_cdf, chisq_quantile
from .partitions import count_cells, make_angular_partition, make_max_partition

_UNIFORM_PAIR = (uniform_cdf, uniform_cdf)


@dataclass(frozen=True)
class ExperimentPlan:
    """One simulation study: two models, a grid, and aggregation settings."""

    model_x: CopulaModel
    model_y: CopulaModel
    n: int
    repetitions: int
    risk: str = "euclidean"
    num_cells: Optional[int] = None
    k_grid: Optional[tuple[int, ...]] = None
    K_grid: Optional[tuple[int, ...]] = None
    k_exceedances: Optional[int] = None
    margins: str = "known"
    level: float = 0.05
    bootstrap_replicates: int = 1000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if (self.k_grid is None) == (self.K_grid is None):
            raise ConfigError("exactly one of k_grid and K_grid must be set")
        if self.k_grid is not None:
            object.__setattr__(self, "k_grid", tuple(int(k) for k in self.k_grid))
            if not self.k_grid:
                raise ConfigError("k_grid must be non-empty")
            if self.num_cells is None and self.risk in ("euclidean", "sum", "l1", "l2"):
                raise ConfigError("angular risks need num_cells")
        else:
            object.__setattr__(self, "K_grid", tuple(int(K) for K in self.K_grid))
            if not self.K_grid:
                raise ConfigError("K_grid must be non-empty")
            if any(not 2 <= K <= 12 for K in self.K_grid):
                raise ConfigError(f"K grid must lie within 2..12, got {self.K_grid}")
            if self.risk not in ("euclidean", "sum", "l1", "l2"):
                raise ConfigError("the K study varies angular partitions; risk must be euclidean or sum")
            if self.k_exceedances is None:
                raise ConfigError("the K study needs a fixed k_exceedances")
        if self.margins not in ("known", "empirical"):
            raise ConfigError(f"margins must be 'known' or 'empirical', got {self.margins!r}")

    def to_manifest(self) -> dict:
        plan = dataclasses.asdict(self)
        return {"plan": plan, "seed": self.seed, "version": __version__}


@dataclass(frozen=True)
class PowerCurvePoint:
    grid_value: int
    mean_statistic: float
    q05: float
    q95: float
    rejection_rate: float
    critical_value: float


@dataclass(frozen=True)
class PowerCurve:
    """Aggregates over repetitions, one point per grid value."""

    grid_name: str
    points: tuple[PowerCurvePoint, ...]
    baseline: Optional[dict] = None  # max-risk reference in the K study

    def rejection_rates(self) -> dict[int, float]:
        return {p.grid_value: p.rejection_rate for p in self.points}

    def to_rows(self) -> list[tuple]:
        rows = []
        for p in self.points:
            for aggregate in ("mean_statistic", "q05", "q95", "rejection_rate", "critical_value"):
                rows.append((self.grid_name, p.grid_value, aggregate, getattr(p, aggregate)))
        if self.baseline is not None:
            for key, value in self.baseline.items():
                rows.append(("baseline", "", key, value))
        return rows


def _simulate_standardized(plan: ExperimentPlan, rep: int) -> tuple[Sample, Sample]:
    rep_stream = RngStream(plan.seed, (rep,))
    x = sample(plan.model_x, plan.n, rep_stream.child(0))
    y = sample(plan.model_y, plan.n, rep_stream.child(1))
    if plan.margins == "known":
        return to_pareto(x, _UNIFORM_PAIR), to_pareto(y, _UNIFORM_PAIR)
    return to_pseudo(x), to_pseudo(y)


def _rep_config(plan: ExperimentPlan, rep: int, k: int, num_cells: Optional[int],
                risk: Optional[str] = None) -> TestConfig:
    return TestConfig(
        k_exceedances=k,
        risk=risk or plan.risk,
        num_cells=num_cells,
        level=plan.level,
        margins=plan.margins,
        bootstrap_replicates=plan.bootstrap_replicates,
        seed=derived_seed(plan.seed, rep),
    )


def _evaluate(xs: Sample, ys: Sample, partition, k: int, plan: ExperimentPlan,
              config: TestConfig) -> tuple[float, float, float]:
    """Statistic, p-value and D-scale critical value for one repetition/grid point."""
    div = kl_divergence(count_cells(xs, partition, k), count_cells(ys, partition, k))
    dof = partition.num_cells - 1
    if plan.margins == "known":
        p_value = ChiSquared(dof).sf(div.normalized)
        critical = 2.0 * chisq_quantile(1.0 - plan.level, dof) / k
    else:
        null = bootstrap_null(xs, config, partition,
                              RngStream(config.seed, (1_000_003, 0)), "x")
        p_value = bootstrap_p_value(div, null)
        critical = float(np.quantile(null.replicates, 1.0 - plan.level))
    return div.value, p_value, critical


def _power_rep(args: tuple[ExperimentPlan, int]) -> np.ndarray:
    plan, rep = args
    xs, ys = _simulate_standardized(plan, rep)
    partition = None
    out = np.empty((len(plan.k_grid), 3))
    for i, k in enumerate(plan.k_grid):
        config = _rep_config(plan, rep, k, plan.num_cells)
        if partition is None:
            partition = build_partition(config, xs.d)
        out[i] = _evaluate(xs, ys, partition, k, plan, config)
    return out


def _k_sensitivity_rep(args: tuple[ExperimentPlan, int]) -> np.ndarray:
    plan, rep = args
    xs, ys = _simulate_standardized(plan, rep)
    k = plan.k_exceedances
    out = np.empty((len(plan.K_grid) + 1, 3))
    for i, K in enumerate(plan.K_grid):
        config = _rep_config(plan, rep, k, K)
        partition = make_angular_partition(config.risk, K)
        out[i] = _evaluate(xs, ys, partition, k, plan, config)
    baseline_config = _rep_config(plan, rep, k, None, risk="max")
    out[-1] = _evaluate(xs, ys, make_max_partition(xs.d), k, plan, baseline_config)
    return out


def _map_reps(worker, plan: ExperimentPlan) -> list[np.ndarray]:
    args = [(plan, r) for r in range(plan.repetitions)]
    if plan.workers > 1:
        chunk = max(1, plan.repetitions // (4 * plan.workers))
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            return list(pool.map(worker, args, chunksize=chunk))
    return [worker(a) for a in args]


def _aggregate(grid_values, results: np.ndarray, level: float) -> list[PowerCurvePoint]:
    points = []
    for i, g in enumerate(grid_values):
        stats = results[:, i, 0]
        pvals = results[:, i, 1]
        crits = results[:, i, 2]
        points.append(PowerCurvePoint(
            grid_value=int(g),
            mean_statistic=float(stats.mean()),
            q05=float(np.quantile(stats, 0.05)),
            q95=float(np.quantile(stats, 0.95)),
            rejection_rate=float(np.mean(pvals < level)),
            critical_value=float(crits.mean()),
        ))
    return points


def size_power_study(plan: ExperimentPlan) -> PowerCurve:
    """Rejection rate and statistic quantiles over the k_n grid."""
    if plan.k_grid is None:
        raise ConfigError("size_power_study needs a k_grid plan")
    results = np.stack(_map_reps(_power_rep, plan))
    return PowerCurve("k_exceedances", tuple(_aggregate(plan.k_grid, results, plan.level)))


def k_sensitivity_study(plan: ExperimentPlan) -> PowerCurve:
    """Rejection rate over the number of angular cells, with a max-risk baseline."""
    if plan.K_grid is None:
        raise ConfigError("k_sensitivity_study needs a K_grid plan")
    results = np.stack(_map_reps(_k_sensitivity_rep, plan))
    points = _aggregate(plan.K_grid, results[:, :-1, :], plan.level)
    base_stats = results[:, -1, 0]
    base_pvals = results[:, -1, 1]
    baseline = {
        "risk": "max",
        "num_cells": 2 ** 2 - 1,
        "mean_statistic": float(base_stats.mean()),
        "rejection_rate": float(np.mean(base_pvals < plan.level)),
    }
    return PowerCurve("num_cells", tuple(points), baseline=baseline)


def ks_statistic_one_sample(values: np.ndarray, cdf) -> float:
    """Kolmogorov-Smirnov distance between an empirical sample and a CDF."""
    vals = np.sort(np.asarray(values, dtype=np.float64))
    n = vals.size
    cdf_vals = np.asarray([cdf(v) for v in vals])
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - cdf_vals), np.max(cdf_vals - (grid - 1.0 / n))))


def ks_statistic_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov distance."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


@dataclass(frozen=True)
class NullModeResult:
    """Bootstrap and fresh-simulation null replicates for one margin mode."""

    bootstrap: np.ndarray
    fresh: np.ndarray
    ks_bootstrap_vs_fresh: float
    ks_fresh_vs_chisq: Optional[float]


@dataclass(frozen=True)
class NullStudyResult:
    known: NullModeResult
    empirical: NullModeResult
    model: CopulaModel
    n: int
    k_exceedances: int
    num_cells: int
    seed: int


def null_histogram_study(model: CopulaModel, n: int, k_exceedances: int,
                         num_cells: int, bootstrap_replicates: int,
                         seed: int = 0, risk: str = "euclidean") -> NullStudyResult:
    """Bootstrap null from one dataset vs the true null from fresh datasets.

    Both margin modes are produced. For known margins the fresh replicates,
    normalized by k_n/2, are additionally compared against chi-squared(K-1).
    """
    risk = {"l2": "euclidean", "l1": "sum"}.get(risk, risk)
    partition = make_angular_partition(risk, num_cells)
    base_stream = RngStream(seed)
    raw = sample(model, n, base_stream.child(0))
    dof = num_cells - 1

    modes = {}
    for mode_ix, margins in enumerate(("known", "empirical")):
        config = TestConfig(k_exceedances=k_exceedances, risk=risk, num_cells=num_cells,
                            margins=margins, bootstrap_replicates=max(bootstrap_replicates, 100),
                            seed=seed)
        source = to_pareto(raw, _UNIFORM_PAIR) if margins == "known" else to_pseudo(raw)
        null = bootstrap_null(source, config, partition,
                              base_stream.child(1).child(mode_ix), "x")
        boot = null.replicates[:bootstrap_replicates]

        fresh = np.empty(bootstrap_replicates)
        for b in range(bootstrap_replicates):
            pair_stream = base_stream.child(2).child(b)
            fx = sample(model, n, pair_stream.child(0))
            fy = sample(model, n, pair_stream.child(1))
            if margins == "known":
                sx, sy = to_pareto(fx, _UNIFORM_PAIR), to_pareto(fy, _UNIFORM_PAIR)
            else:
                sx, sy = to_pseudo(fx), to_pseudo(fy)
            fresh[b] = kl_divergence(count_cells(sx, partition, k_exceedances),
                                     count_cells(sy, partition, k_exceedances)).value

        ks_chisq = None
        if margins == "known":
            ks_chisq = ks_statistic_one_sample(k_exceedances * fresh / 2.0,
                                               lambda v: chisq_cdf(v, dof))
        modes[margins] = NullModeResult(
            bootstrap=boot,
            fresh=fresh,
            ks_bootstrap_vs_fresh=ks_statistic_two_sample(boot, fresh),
            ks_fresh_vs_chisq=ks_chisq,
        )
    return NullStudyResult(modes["known"], modes["empirical"], model, n,
                           k_exceedances, num_cells, seed)


def write_power_outputs(curve: PowerCurve, plan: ExperimentPlan, outdir: str,
                        name: str = "power") -> dict:
    """Long-format CSV (grid point x aggregate) plus a reproducibility manifest."""
    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, f"{name}.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grid_name", "grid_value", "aggregate", "value"])
        writer.writerows(curve.to_rows())
    manifest = plan.to_manifest()
    manifest["command"] = name
    manifest["outputs"] = {"csv": csv_path}
    manifest_path = os.path.join(outdir, f"{name}_manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2)
    manifest["outputs"]["manifest"] = manifest_path
    return manifest


def write_nulls_outputs(result: NullStudyResult, outdir: str) -> dict:
    """Replicate vectors per margin mode plus KS distances and a manifest."""
    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, "null_replicates.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["margins", "source", "replicate", "value"])
        for margins, mode in (("known", result.known), ("empirical", result.empirical)):
            for b, v in enumerate(mode.bootstrap):
                writer.writerow([margins, "bootstrap", b, repr(float(v))])
            for b, v in enumerate(mode.fresh):
                writer.writerow([margins, "fresh", b, repr(float(v))])
    manifest = {
        "command": "nulls",
        "model": dataclasses.asdict(result.model),
        "n": result.n,
        "k_exceedances": result.k_exceedances,
        "num_cells": result.num_cells,
        "seed": result.seed,
        "version": __version__,
        "ks": {
            "known_bootstrap_vs_fresh": result.known.ks_bootstrap_vs_fresh,
            "empirical_bootstrap_vs_fresh": result.empirical.ks_bootstrap_vs_fresh,
            "known_fresh_vs_chisq": result.known.ks_fresh_vs_chisq,
        },
        "outputs": {"csv": csv_path},
    }
    manifest_path = os.path.join(outdir, "nulls_manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2)
    manifest["outputs"]["manifest"] = manifest_path
    return manifest
