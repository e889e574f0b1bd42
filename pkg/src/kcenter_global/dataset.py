"""Datasets and center regions: CSV loading, synthetic generation, root bounds."""

import logging
import math
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .config import get_config
from .exceptions import DatasetError, DimensionError, InfeasibleProblemError

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    """Return a float64 copy of ``array`` that cannot be written to."""
    out = np.array(array, dtype=np.float64, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Dataset:
    """Immutable S x A matrix of finite samples."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2:
            raise DatasetError(f"Samples must be a 2-D matrix, got {samples.ndim}-D")
        if samples.shape[0] < 1 or samples.shape[1] < 1:
            raise DatasetError(f"Dataset must not be empty, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise DatasetError("Dataset contains NaN or infinite values")
        object.__setattr__(self, "samples", _frozen(samples))

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[0])

    @property
    def n_attrs(self) -> int:
        return int(self.samples.shape[1])

    @property
    def lower(self) -> np.ndarray:
        """Per-attribute minimum over all samples."""
        return self.samples.min(axis=0)

    @property
    def upper(self) -> np.ndarray:
        """Per-attribute maximum over all samples."""
        return self.samples.max(axis=0)

    def distinct_count(self) -> int:
        """Number of distinct rows."""
        return int(np.unique(self.samples, axis=0).shape[0])

    def __len__(self) -> int:
        return self.n_samples


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box ``[lo, hi]``; ``lo_a > hi_a`` marks an empty box."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self) -> None:
        lo = np.asarray(self.lo, dtype=np.float64).reshape(-1)
        hi = np.asarray(self.hi, dtype=np.float64).reshape(-1)
        if lo.shape != hi.shape:
            raise DimensionError(
                f"Box bounds disagree in dimension: {lo.shape[0]} vs {hi.shape[0]}"
            )
        object.__setattr__(self, "lo", _frozen(lo))
        object.__setattr__(self, "hi", _frozen(hi))

    @classmethod
    def empty(cls, n_attrs: int) -> "Box":
        """The empty marker box in ``n_attrs`` dimensions."""
        return cls(np.full(n_attrs, np.inf), np.full(n_attrs, -np.inf))

    @classmethod
    def around(cls, points: np.ndarray) -> "Box":
        """Smallest box containing ``points``; empty marker when there are none."""
        points = np.asarray(points, dtype=np.float64)
        if points.shape[0] == 0:
            return cls.empty(points.shape[1])
        return cls(points.min(axis=0), points.max(axis=0))

    @property
    def n_attrs(self) -> int:
        return int(self.lo.shape[0])

    @property
    def is_empty(self) -> bool:
        return bool(np.any(self.lo > self.hi))

    @property
    def is_degenerate(self) -> bool:
        """True when the box is a single point."""
        return bool(np.all(self.lo == self.hi))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean membership mask for an (n, A) array of points."""
        points = np.atleast_2d(points)
        return np.all((points >= self.lo) & (points <= self.hi), axis=1)

    def intersect(self, other: "Box") -> "Box":
        return Box(np.maximum(self.lo, other.lo), np.minimum(self.hi, other.hi))

    def issubset(self, other: "Box") -> bool:
        if self.is_empty:
            return True
        return bool(np.all(self.lo >= other.lo) and np.all(self.hi <= other.hi))


@dataclass(frozen=True)
class CenterRegion:
    """K axis-aligned boxes, one per cluster center, stored as (K, A) bounds."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self) -> None:
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        if lo.ndim != 2 or lo.shape != hi.shape:
            raise DimensionError(
                f"Region bounds must be matching (K, A) arrays, got {lo.shape} "
                f"and {hi.shape}"
            )
        if lo.shape[0] < 1:
            raise DimensionError("A center region needs at least one box")
        object.__setattr__(self, "lo", _frozen(lo))
        object.__setattr__(self, "hi", _frozen(hi))

    @classmethod
    def from_boxes(cls, boxes: Sequence[Box]) -> "CenterRegion":
        dims = {box.n_attrs for box in boxes}
        if len(dims) > 1:
            raise DimensionError(f"Boxes have mixed dimensions: {sorted(dims)}")
        return cls(
            np.stack([box.lo for box in boxes]), np.stack([box.hi for box in boxes])
        )

    @property
    def k(self) -> int:
        return int(self.lo.shape[0])

    @property
    def n_attrs(self) -> int:
        return int(self.lo.shape[1])

    @property
    def boxes(self) -> List[Box]:
        return [self.box(k) for k in range(self.k)]

    def box(self, k: int) -> Box:
        return Box(self.lo[k], self.hi[k])

    def with_box(self, k: int, box: Box) -> "CenterRegion":
        lo = self.lo.copy()
        hi = self.hi.copy()
        lo[k] = box.lo
        hi[k] = box.hi
        return CenterRegion(lo, hi)

    @property
    def is_empty(self) -> bool:
        """True when any cluster's box is the empty marker."""
        return bool(np.any(self.lo > self.hi))

    @property
    def widths(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def is_point(self) -> bool:
        """True when every box has collapsed to a single point."""
        return bool(np.all(self.lo == self.hi))

    def membership(self, points: np.ndarray) -> np.ndarray:
        """(n, K) mask: sample s lies inside box k."""
        inside = (points[:, None, :] >= self.lo[None, :, :]) & (
            points[:, None, :] <= self.hi[None, :, :]
        )
        return np.all(inside, axis=2)

    def issubset(self, other: "CenterRegion") -> bool:
        return all(mine.issubset(theirs) for mine, theirs in zip(self.boxes, other.boxes))


def load_csv(path: str, has_header: bool = False) -> Dataset:
    """Load a comma-delimited numeric dataset.

    Args:
        path: Path to the CSV file.
        has_header: Skip the first line when True.

    Returns:
        Dataset: One sample per data line.

    Raises:
        DatasetError: If the file is missing, a field is not a finite number,
            rows are ragged, or there is no data.
    """
    if not os.path.exists(path):
        raise DatasetError(f"Dataset file not found: {path}")

    rows: List[List[float]] = []
    width: Optional[int] = None
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if has_header and line_no == 1:
                continue
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise DatasetError(
                    f"Ragged row: expected {width} fields, found {len(fields)}",
                    row=line_no,
                )
            row = []
            for col_no, field in enumerate(fields, start=1):
                try:
                    value = float(field)
                except ValueError:
                    raise DatasetError(
                        f"Non-numeric field {field.strip()!r}", row=line_no, column=col_no
                    ) from None
                if not math.isfinite(value):
                    raise DatasetError(
                        f"Field {field.strip()!r} is not a finite number",
                        row=line_no,
                        column=col_no,
                    )
                row.append(value)
            rows.append(row)

    if not rows:
        raise DatasetError(f"No data rows in {path}")

    logger.info(f"Loaded {len(rows)} samples x {width} attributes from {path}")
    return Dataset(np.array(rows, dtype=np.float64))


def write_csv(d: Dataset, path: str, header: Optional[Sequence[str]] = None) -> None:
    """Write a dataset so that ``load_csv`` reads back identical values."""
    with open(path, "w", encoding="utf-8") as f:
        if header is not None:
            f.write(",".join(header) + "\n")
        for row in d.samples:
            f.write(",".join(repr(float(v)) for v in row) + "\n")


def generate_gaussian(
    n: int,
    k_clusters: int,
    n_attrs: int,
    seed: int,
    mean_low: Optional[float] = None,
    mean_high: Optional[float] = None,
    stddev: Optional[float] = None,
) -> Dataset:
    """Draw ``n`` samples from ``k_clusters`` isotropic Gaussians.

    Cluster means are uniform in ``[mean_low, mean_high]^A``; samples are
    dealt round-robin to clusters so every cluster is populated. Missing
    parameters come from the ``generator`` config section.
    """
    if k_clusters < 1:
        raise DatasetError(f"Need at least one cluster, got {k_clusters}")
    if n < k_clusters:
        raise DatasetError(f"Cannot draw {n} samples from {k_clusters} clusters")
    if n_attrs < 1:
        raise DatasetError(f"Need at least one attribute, got {n_attrs}")

    config = get_config()
    low = config.get("generator.mean_low", 0.0) if mean_low is None else mean_low
    high = config.get("generator.mean_high", 100.0) if mean_high is None else mean_high
    sd = config.get("generator.stddev", 1.0) if stddev is None else stddev

    rng = np.random.default_rng(seed)
    means = rng.uniform(low, high, size=(k_clusters, n_attrs))
    labels = np.arange(n) % k_clusters
    noise = rng.normal(0.0, sd, size=(n, n_attrs))
    return Dataset(means[labels] + noise)


def root_region(d: Dataset, k: int) -> CenterRegion:
    """Every cluster's box is the bounding box of the data."""
    if k < 1:
        raise InfeasibleProblemError(f"Number of clusters must be at least 1, got {k}")
    return CenterRegion(np.tile(d.lower, (k, 1)), np.tile(d.upper, (k, 1)))
