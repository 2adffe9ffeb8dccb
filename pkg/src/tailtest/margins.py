"""Marginal standardization to the common Pareto scale.

Two routes exist: the exact transform ``1/(1 - F_j(x))`` when the marginal
CDFs are known, and rank-based pseudo-observations ``(n+1)/(n+1-rank)``
otherwise. Both leave the copula untouched, so downstream cell counts only
see the dependence structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateMarginError, DomainError, InsufficientDataError, ShapeError

MARGIN_STATES = ("raw", "pareto", "pseudo")

# A marginal CDF is any callable mapping an array of reals to values in [0, 1).
MarginalCdf = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Sample:
    """An n x d data matrix with a declared marginal state.

    ``ties`` counts entries that shared a column value with another row when
    pseudo-observations were formed (ties are broken by row order).
    """

    data: np.ndarray
    margin_state: str = "raw"
    ties: int = 0

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeError(f"sample data must be 2-D (n x d), got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"sample must be non-empty, got shape {arr.shape}")
        if self.margin_state not in MARGIN_STATES:
            raise DomainError(f"margin_state must be one of {MARGIN_STATES}, got {self.margin_state!r}")
        if self.margin_state in ("pareto", "pseudo") and arr.min() < 1.0:
            raise DomainError(f"{self.margin_state} samples must have all entries >= 1")
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


def to_pareto(raw: Sample, cdfs: Sequence[MarginalCdf]) -> Sample:
    """Exact standardization x -> 1/(1 - F_j(x)) using known marginal CDFs."""
    if raw.margin_state != "raw":
        raise DomainError(f"to_pareto expects a raw sample, got state {raw.margin_state!r}")
    if len(cdfs) != raw.d:
        raise ShapeError(f"need {raw.d} marginal CDFs, got {len(cdfs)}")
    out = np.empty_like(raw.data)
    for j, cdf in enumerate(cdfs):
        f = np.asarray(cdf(raw.data[:, j]), dtype=np.float64)
        if f.shape != (raw.n,):
            raise ShapeError(f"marginal CDF {j} returned shape {f.shape}, expected ({raw.n},)")
        bad = ~((f >= 0.0) & (f <= 1.0)) | np.isnan(f)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise DomainError(
                f"marginal CDF {j} returned an invalid probability {f[row]} at row {row}"
            )
        hit_one = f >= 1.0
        if hit_one.any():
            row = int(np.flatnonzero(hit_one)[0])
            raise DegenerateMarginError(coordinate=j, row=row)
        out[:, j] = 1.0 / (1.0 - f)
    return Sample(out, "pareto")


def _ordinal_ranks(col: np.ndarray) -> np.ndarray:
    """Stable ordinal ranks, 1..n; ties broken by row order."""
    order = np.argsort(col, kind="stable")
    ranks = np.empty(col.shape[0], dtype=np.int64)
    ranks[order] = np.arange(1, col.shape[0] + 1)
    return ranks


def to_pseudo(raw: Sample) -> Sample:
    """Rank-based standardization to (n+1)/(n+1-rank) per column."""
    if raw.margin_state != "raw":
        raise DomainError(f"to_pseudo expects a raw sample, got state {raw.margin_state!r}")
    if raw.n < 2:
        raise InsufficientDataError(f"pseudo-observations need n >= 2, got n={raw.n}")
    data, ties = _rank_transform(raw.data)
    return Sample(data, "pseudo", ties=ties)


def _rank_transform(data: np.ndarray) -> tuple[np.ndarray, int]:
    """Rank transform of an arbitrary matrix; also used on already-standardized
    data inside the bootstrap, where re-ranking a half equals ranking the raw half."""
    n = data.shape[0]
    out = np.empty_like(data, dtype=np.float64)
    ties = 0
    for j in range(data.shape[1]):
        col = data[:, j]
        ranks = _ordinal_ranks(col)
        counts = np.unique(col, return_counts=True)[1]
        ties += int(counts[counts > 1].sum())
        out[:, j] = (n + 1.0) / (n + 1.0 - ranks)
    return out, ties


# Parametric stubs exposed on the CLI for known-margin round trips.

def uniform_cdf(x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


def unit_pareto_cdf(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.where(x < 1.0, 0.0, 1.0 - 1.0 / x)


def unit_exponential_cdf(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.where(x < 0.0, 0.0, -np.expm1(-x))


KNOWN_CDF_STUBS: dict[str, MarginalCdf] = {
    "uniform": uniform_cdf,
    "pareto": unit_pareto_cdf,
    "exponential": unit_exponential_cdf,
}
