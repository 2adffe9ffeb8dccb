"""The two-sample divergence test: standardize, count, calibrate, decide.

With known margins the normalized statistic k_n * D / 2 is referred to a
chi-squared distribution with K - 1 degrees of freedom. With empirical
margins the null distribution is approximated by a split-half subsample
bootstrap: half of one sample is drawn without replacement, the two-half
statistic is computed and divided by 2 to emulate the full sample size.
By default the half-sample statistic uses k_n/2 exceedances so that its
rate matches the full-sample statistic after the division; the literal
"same k_n in each half" reading is available as an alternative rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .divergence import Divergence, kl_divergence
from .errors import ConfigError, DomainError, InsufficientDataError
from .margins import MarginalCdf, Sample, _rank_transform, to_pareto, to_pseudo
from .numerics import ChiSquared, RngStream
from .partitions import (CellProbabilities, Partition, count_cells,
                         make_angular_partition, make_max_partition,
                         make_min_partition)

RISK_ALIASES = {"max": "max", "min": "min", "l2": "euclidean", "euclidean": "euclidean",
                "l1": "sum", "sum": "sum"}

# Namespace offset separating bootstrap permutation streams from data streams.
_BOOTSTRAP_NS = 1_000_003


@dataclass(frozen=True)
class TestConfig:
    """Settings of one two-sample divergence test."""

    __test__ = False  # not a pytest class despite the name

    k_exceedances: int
    risk: str = "euclidean"
    num_cells: Optional[int] = None
    level: float = 0.05
    margins: str = "empirical"
    bootstrap_replicates: int = 1000
    bootstrap_exceedances: str = "proportional"  # or "same"
    bootstrap_source: str = "x"                  # or "symmetric"
    angles: Optional[tuple[float, ...]] = None
    seed: int = 0

    def __post_init__(self):
        if self.k_exceedances < 1:
            raise ConfigError(f"k_exceedances must be >= 1, got {self.k_exceedances}")
        if not 0.0 < self.level < 1.0:
            raise ConfigError(f"level must lie in (0,1), got {self.level}")
        if self.margins not in ("known", "empirical"):
            raise ConfigError(f"margins must be 'known' or 'empirical', got {self.margins!r}")
        if self.risk not in RISK_ALIASES:
            raise ConfigError(f"risk must be one of {sorted(RISK_ALIASES)}, got {self.risk!r}")
        object.__setattr__(self, "risk", RISK_ALIASES[self.risk])
        if self.num_cells is not None and self.num_cells < 2:
            raise ConfigError(f"num_cells must be >= 2, got {self.num_cells}")
        if self.margins == "empirical" and self.bootstrap_replicates < 100:
            raise ConfigError(
                f"empirical margins need at least 100 bootstrap replicates, got {self.bootstrap_replicates}"
            )
        if self.bootstrap_exceedances not in ("proportional", "same"):
            raise ConfigError(f"bootstrap_exceedances must be 'proportional' or 'same', "
                              f"got {self.bootstrap_exceedances!r}")
        if self.bootstrap_source not in ("x", "symmetric"):
            raise ConfigError(f"bootstrap_source must be 'x' or 'symmetric', got {self.bootstrap_source!r}")


def build_partition(config: TestConfig, d: int) -> Partition:
    """Partition implied by the configured risk, cell count and dimension."""
    if config.risk == "max":
        part = make_max_partition(d)
    elif config.risk == "min":
        part = make_min_partition(d)
    else:
        if config.num_cells is None:
            raise ConfigError("angular partitions need an explicit num_cells")
        part = make_angular_partition(config.risk, config.num_cells,
                                      list(config.angles) if config.angles else None)
    if config.num_cells is not None and part.num_cells != config.num_cells:
        raise ConfigError(
            f"{config.risk} risk in dimension {d} implies {part.num_cells} cells, "
            f"but num_cells={config.num_cells} was requested"
        )
    return part


@dataclass(frozen=True)
class NullDistribution:
    """Rate-corrected bootstrap replicates of the statistic under the null."""

    replicates: np.ndarray
    source_sample: str
    k_half: int
    exceedance_rule: str

    def __post_init__(self):
        reps = np.asarray(self.replicates, dtype=np.float64)
        if reps.ndim != 1 or reps.size < 1:
            raise DomainError("replicates must be a non-empty 1-D array")
        if (reps < 0).any() or not np.isfinite(reps).all():
            raise DomainError("replicates must be non-negative and finite")
        object.__setattr__(self, "replicates", reps)

    @property
    def B(self) -> int:
        return self.replicates.size


@dataclass(frozen=True)
class TestReport:
    """Everything Algorithm-style output needs: statistic, p-value, decision."""

    __test__ = False  # not a pytest class despite the name

    statistic: float
    normalized: float
    p_value: float
    reject: bool
    method: str
    level: float
    k_exceedances: int
    num_cells: int
    risk: str
    scheme: str
    margins: str
    zero_adjusted: bool
    cells_x: CellProbabilities
    cells_y: CellProbabilities
    cell_labels: list[str]
    n_x: int
    n_y: int
    dim: int
    ties_x: int
    ties_y: int
    seed: int
    bootstrap_replicates: Optional[int] = None
    bootstrap_source: Optional[str] = None
    bootstrap_exceedance_rule: Optional[str] = None
    k_half: Optional[int] = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        """JSON-ready report with the stable field schema shipped in schemas.py."""
        return {
            "statistic": self.statistic,
            "normalized": self.normalized,
            "p_value": self.p_value,
            "reject": self.reject,
            "method": self.method,
            "level": self.level,
            "k_exceedances": self.k_exceedances,
            "num_cells": self.num_cells,
            "risk": self.risk,
            "scheme": self.scheme,
            "margins": self.margins,
            "zero_adjusted": self.zero_adjusted,
            "cells": {
                "labels": list(self.cell_labels),
                "x_counts": [int(c) for c in self.cells_x.counts],
                "y_counts": [int(c) for c in self.cells_y.counts],
                "x_probs": [float(p) for p in self.cells_x.probs],
                "y_probs": [float(p) for p in self.cells_y.probs],
                "x_threshold": float(self.cells_x.threshold),
                "y_threshold": float(self.cells_y.threshold),
            },
            "sample_sizes": {"x": self.n_x, "y": self.n_y},
            "dim": self.dim,
            "rank_ties": {"x": self.ties_x, "y": self.ties_y, "policy": "stable-ordinal"},
            "seed": self.seed,
            "bootstrap": None if self.method != "bootstrap" else {
                "replicates": self.bootstrap_replicates,
                "source": self.bootstrap_source,
                "exceedance_rule": self.bootstrap_exceedance_rule,
                "k_half": self.k_half,
            },
            "warnings": list(self.warnings),
            "version": __version__,
        }


def _standardize(sample: Sample, margins: str, cdfs: Optional[Sequence[MarginalCdf]]) -> Sample:
    if margins == "known":
        if sample.margin_state == "raw":
            if cdfs is None:
                raise ConfigError("known-margin mode on raw data needs marginal CDFs")
            return to_pareto(sample, cdfs)
        return sample
    if sample.margin_state == "pseudo":
        return sample
    if sample.margin_state == "raw":
        return to_pseudo(sample)
    # Pareto in, empirical mode: re-rank; ranks are invariant to the monotone
    # transform already applied, so this equals ranking the raw data.
    data, ties = _rank_transform(sample.data)
    return Sample(data, "pseudo", ties=ties)


def _split_cdfs(known_cdfs):
    if known_cdfs is None:
        return None, None
    seq = list(known_cdfs)
    if len(seq) == 2 and not callable(seq[0]) and not callable(seq[1]):
        return list(seq[0]), list(seq[1])
    return seq, seq


def bootstrap_null(source: Sample, config: TestConfig,
                   partition: Optional[Partition] = None,
                   stream: Optional[RngStream] = None,
                   source_label: str = "x") -> NullDistribution:
    """Split-half subsample bootstrap of the null distribution.

    Draws floor(n/2) observations without replacement, computes the
    two-half statistic and divides it by 2 (the rate correction for the
    halved sample size). For known margins the source must already be on
    the Pareto scale; for empirical margins each half is re-ranked, which
    is identical to ranking the corresponding raw half.
    """
    n = source.n
    k_n = config.k_exceedances
    if n < 4 * k_n:
        raise InsufficientDataError(
            f"bootstrap needs n >= 4*k_exceedances, got n={n}, k={k_n}"
        )
    if config.margins == "known" and source.margin_state == "raw":
        raise ConfigError("bootstrap with known margins needs a standardized source sample")
    if partition is None:
        partition = build_partition(config, source.d)
    if stream is None:
        stream = RngStream(config.seed, (_BOOTSTRAP_NS, 0 if source_label == "x" else 1))
    half = n // 2
    k_half = max(1, k_n // 2) if config.bootstrap_exceedances == "proportional" else k_n

    data = source.data
    state = source.margin_state if config.margins == "known" else "pseudo"
    replicates = np.empty(config.bootstrap_replicates)
    for b in range(config.bootstrap_replicates):
        perm = stream.child(b).permutation(n)
        first = data[perm[:half]]
        second = data[perm[half:]]
        if config.margins == "empirical":
            first = _rank_transform(first)[0]
            second = _rank_transform(second)[0]
        cells_a = count_cells(Sample(first, state), partition, k_half)
        cells_b = count_cells(Sample(second, state), partition, k_half)
        replicates[b] = kl_divergence(cells_a, cells_b).value / 2.0
    return NullDistribution(replicates, source_label, k_half, config.bootstrap_exceedances)


def bootstrap_p_value(observed: Divergence, null: NullDistribution) -> float:
    """Fraction of rate-corrected replicates strictly above the observed value."""
    return float(np.mean(null.replicates > observed.value))


def run_test(x: Sample, y: Sample, config: TestConfig,
             known_cdfs=None) -> TestReport:
    """Run the full two-sample extremal dependence test.

    ``known_cdfs`` may be one CDF list applied to both samples or a pair of
    lists (one per sample); it is only consulted for raw samples in
    known-margin mode.
    """
    if x.d != y.d:
        raise ConfigError(f"samples must share dimension, got {x.d} and {y.d}")
    if config.k_exceedances >= min(x.n, y.n):
        raise ConfigError(
            f"k_exceedances={config.k_exceedances} must be below both sample sizes "
            f"({x.n}, {y.n})"
        )
    cdfs_x, cdfs_y = _split_cdfs(known_cdfs)
    xs = _standardize(x, config.margins, cdfs_x)
    ys = _standardize(y, config.margins, cdfs_y)
    partition = build_partition(config, x.d)

    cells_x = count_cells(xs, partition, config.k_exceedances)
    cells_y = count_cells(ys, partition, config.k_exceedances)
    div = kl_divergence(cells_x, cells_y)

    boot_meta = {}
    if config.margins == "known":
        method = "chisq"
        p_value = ChiSquared(partition.num_cells - 1).sf(div.normalized)
    else:
        method = "bootstrap"
        null_x = bootstrap_null(xs, config, partition,
                                RngStream(config.seed, (_BOOTSTRAP_NS, 0)), "x")
        p_value = bootstrap_p_value(div, null_x)
        source = "x"
        if config.bootstrap_source == "symmetric":
            null_y = bootstrap_null(ys, config, partition,
                                    RngStream(config.seed, (_BOOTSTRAP_NS, 1)), "y")
            p_value = 0.5 * (p_value + bootstrap_p_value(div, null_y))
            source = "symmetric"
        boot_meta = {
            "bootstrap_replicates": config.bootstrap_replicates,
            "bootstrap_source": source,
            "bootstrap_exceedance_rule": config.bootstrap_exceedances,
            "k_half": null_x.k_half,
        }

    return TestReport(
        statistic=div.value,
        normalized=div.normalized,
        p_value=p_value,
        reject=bool(p_value < config.level),
        method=method,
        level=config.level,
        k_exceedances=config.k_exceedances,
        num_cells=partition.num_cells,
        risk=config.risk,
        scheme=partition.scheme,
        margins=config.margins,
        zero_adjusted=div.zero_adjusted,
        cells_x=cells_x,
        cells_y=cells_y,
        cell_labels=partition.cell_labels,
        n_x=x.n,
        n_y=y.n,
        dim=x.d,
        ties_x=xs.ties,
        ties_y=ys.ties,
        seed=config.seed,
        **boot_meta,
    )


def derived_seed(master_seed: int, index: int) -> int:
    """Deterministic per-repetition seed, collision-free across indices."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])
