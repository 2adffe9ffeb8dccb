"""Homogeneous risk functionals and partitions of the exceedance region.

A partition splits the unit exceedance region {x : r(x) > 1} into K cells.
Three schemes are provided: the max-orthant partition (2^d - 1 cells indexed
by the set of coordinates above 1), the min-orthant partition (2^d cells
indexed by the set of coordinates above 2), and bivariate angular wedges for
the euclidean and sum risks. Orthant cells are inflation-stable, angular
cells are cones, so classification of a threshold exceedance x only needs
the rescaled point x/u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, ShapeError
from .margins import Sample

RISK_KINDS = ("max", "min", "euclidean", "sum")
SCHEMES = ("max-orthant", "min-orthant", "angular")


@dataclass(frozen=True)
class RiskFunctional:
    """A 1-homogeneous risk map from the positive orthant to the half-line."""

    kind: str

    def __post_init__(self):
        if self.kind not in RISK_KINDS:
            raise DomainError(f"risk kind must be one of {RISK_KINDS}, got {self.kind!r}")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if self.kind == "max":
            vals = pts.max(axis=1)
        elif self.kind == "min":
            vals = pts.min(axis=1)
        elif self.kind == "euclidean":
            vals = np.sqrt((pts * pts).sum(axis=1))
        else:
            vals = np.abs(pts).sum(axis=1)
        return vals if np.asarray(x).ndim == 2 else float(vals[0])


def risk_functional(kind: str) -> RiskFunctional:
    return RiskFunctional(kind)


@dataclass(frozen=True)
class Partition:
    """K disjoint cells covering the exceedance region of a risk functional.

    ``classify`` expects points already rescaled by the threshold (x/u) and
    returns 1-based cell indices. Points on the boundary r(x/u) = 1 can be
    handed in when threshold ties occur; the max-orthant scheme then falls
    back to non-strict comparisons so every selected exceedance lands in
    exactly one cell.
    """

    risk: RiskFunctional
    num_cells: int
    scheme: str
    dim: Optional[int] = None            # orthant schemes
    angles: Optional[tuple[float, ...]] = None  # angular scheme

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.num_cells < 2:
            raise DomainError(f"a partition needs at least 2 cells, got {self.num_cells}")

    @property
    def K(self) -> int:
        return self.num_cells

    def classify(self, x: np.ndarray):
        pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if self.scheme == "angular":
            if pts.shape[1] != 2:
                raise DomainError("angular partitions are bivariate")
            ang = np.arctan2(pts[:, 1], pts[:, 0])
            interior = np.asarray(self.angles[1:-1])
            idx = np.searchsorted(interior, ang, side="left") + 1
        elif self.scheme == "max-orthant":
            if pts.shape[1] != self.dim:
                raise ShapeError(f"expected dimension {self.dim}, got {pts.shape[1]}")
            weights = 1 << np.arange(self.dim)
            idx = (pts > 1.0) @ weights
            on_boundary = idx == 0
            if np.any(on_boundary):
                relaxed = (pts[on_boundary] >= 1.0) @ weights
                if np.any(relaxed == 0):
                    raise DomainError("point below the exceedance region cannot be classified")
                idx = idx.copy()
                idx[on_boundary] = relaxed
        else:
            if pts.shape[1] != self.dim:
                raise ShapeError(f"expected dimension {self.dim}, got {pts.shape[1]}")
            weights = 1 << np.arange(self.dim)
            idx = (pts > 2.0) @ weights + 1
        idx = idx.astype(np.int64)
        return idx if np.asarray(x).ndim == 2 else int(idx[0])

    @property
    def cell_labels(self) -> list[str]:
        if self.scheme == "angular":
            return [f"({self.angles[j - 1]:.4f},{self.angles[j]:.4f}]" for j in range(1, self.num_cells + 1)]
        labels = []
        codes = range(1, 2 ** self.dim) if self.scheme == "max-orthant" else range(2 ** self.dim)
        for code in codes:
            members = [str(j + 1) for j in range(self.dim) if code >> j & 1]
            labels.append("{" + ",".join(members) + "}")
        return labels


def make_max_partition(d: int) -> Partition:
    """Cells indexed by the non-empty set {j : x_j > 1}; K = 2^d - 1."""
    if d < 2:
        raise DomainError(f"max-orthant partition needs dimension >= 2, got {d}")
    return Partition(RiskFunctional("max"), 2 ** d - 1, "max-orthant", dim=d)


def make_min_partition(d: int) -> Partition:
    """Cells indexed by the (possibly empty) set {j : x_j > 2}; K = 2^d."""
    if d < 2:
        raise DomainError(f"min-orthant partition needs dimension >= 2, got {d}")
    return Partition(RiskFunctional("min"), 2 ** d, "min-orthant", dim=d)


def make_angular_partition(risk: str = "euclidean", num_cells: int = 4,
                           angles: Optional[list[float]] = None) -> Partition:
    """Bivariate wedges (theta_{j-1}, theta_j] between 0 and pi/2.

    Equally spaced angles by default; a custom strictly increasing angle
    vector spanning [0, pi/2] may be supplied instead. Points on the x1-axis
    (angle 0) belong to cell 1.
    """
    if risk not in ("euclidean", "sum"):
        raise DomainError(f"angular partitions support euclidean or sum risk, got {risk!r}")
    if num_cells < 2:
        raise DomainError(f"angular partition needs at least 2 cells, got {num_cells}")
    if angles is None:
        bounds = tuple((math.pi / 2.0) * j / num_cells for j in range(num_cells + 1))
    else:
        bounds = tuple(float(a) for a in angles)
        if len(bounds) != num_cells + 1:
            raise DomainError(f"need {num_cells + 1} angles for {num_cells} cells, got {len(bounds)}")
        if abs(bounds[0]) > 1e-12 or abs(bounds[-1] - math.pi / 2.0) > 1e-12:
            raise DomainError("angles must span [0, pi/2]")
        if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise DomainError("angles must be strictly increasing")
    return Partition(RiskFunctional(risk), num_cells, "angular", dim=2, angles=bounds)


@dataclass(frozen=True)
class CellProbabilities:
    """Empirical cell frequencies of the k_n risk exceedances of one sample."""

    probs: np.ndarray
    counts: np.ndarray
    k_n: int
    threshold: float

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if probs.shape != counts.shape or probs.ndim != 1:
            raise ShapeError("probs and counts must be 1-D arrays of equal length")
        if int(counts.sum()) != self.k_n:
            raise DomainError(f"cell counts sum to {counts.sum()}, expected k_n={self.k_n}")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise DomainError(f"cell probabilities sum to {probs.sum()}, expected 1")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "counts", counts)

    @property
    def K(self) -> int:
        return self.probs.shape[0]

    @classmethod
    def from_counts(cls, counts, threshold: float = math.nan) -> "CellProbabilities":
        counts = np.asarray(counts, dtype=np.int64)
        k_n = int(counts.sum())
        if k_n < 1:
            raise DomainError("counts must sum to a positive exceedance number")
        return cls(counts / k_n, counts, k_n, threshold)


def count_cells(sample: Sample, partition: Partition, k_n: int) -> CellProbabilities:
    """Empirical cell probabilities of the top-k_n risk exceedances.

    The threshold is the (n-k_n)-th order statistic of the risk values and
    exceedances are the k_n highest positions of a stable ascending sort, so
    ties at the threshold never change the exceedance count.
    """
    if sample.margin_state not in ("pareto", "pseudo"):
        raise DomainError(f"count_cells needs a standardized sample, got state {sample.margin_state!r}")
    n = sample.n
    if not 1 <= k_n < n:
        raise DomainError(f"need 1 <= k_n < n, got k_n={k_n}, n={n}")
    r_vals = partition.risk(sample.data)
    order = np.argsort(r_vals, kind="stable")
    threshold = float(r_vals[order[n - k_n - 1]])
    exceed = sample.data[order[n - k_n:]]
    cells = partition.classify(exceed / threshold)
    counts = np.bincount(cells, minlength=partition.num_cells + 1)[1:]
    return CellProbabilities(counts / k_n, counts, k_n, threshold)
