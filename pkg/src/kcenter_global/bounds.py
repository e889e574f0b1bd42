"""Closed-form distance kernels, node lower bounds and feasible upper bounds.

All distances are squared Euclidean. Squared distances are accumulated one
attribute at a time, in attribute order, so a value computed for a given
(sample, box) or (sample, center) pair rounds identically no matter how the
surrounding arrays are shaped or partitioned. The solver, the oracle and the
parallel reductions rely on that to agree bitwise.
"""

import logging
from typing import Optional, Union

import numpy as np

from .dataset import Box, CenterRegion, Dataset
from .exceptions import DimensionError, KCenterError

logger = logging.getLogger(__name__)

BoundValue = float
Points = Union[Dataset, np.ndarray]


def as_points(d: Points) -> np.ndarray:
    """Return the (n, A) sample matrix behind a Dataset or array."""
    if isinstance(d, Dataset):
        return d.samples
    return np.atleast_2d(np.asarray(d, dtype=np.float64))


def sum_squares(diff: np.ndarray) -> np.ndarray:
    """Sum of squares over the last axis, accumulated in attribute order."""
    acc = diff[..., 0] * diff[..., 0]
    for a in range(1, diff.shape[-1]):
        acc = acc + diff[..., a] * diff[..., a]
    return acc


def sqdist(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Broadcasting squared Euclidean distance."""
    return sum_squares(np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64))


def _check_dims(x: np.ndarray, n_attrs: int) -> None:
    if x.shape[-1] != n_attrs:
        raise DimensionError(
            f"Point has {x.shape[-1]} attributes but the box has {n_attrs}"
        )


def min_sqdist_to_box(x: np.ndarray, b: Box) -> Union[BoundValue, np.ndarray]:
    """Squared distance from ``x`` to the nearest point of ``b``.

    The minimizer is the attribute-wise clamp ``mid{lo_a, x_a, hi_a}``.
    Accepts a single A-vector (returns a float) or an (n, A) array.
    """
    x = np.asarray(x, dtype=np.float64)
    _check_dims(x, b.n_attrs)
    if b.is_empty:
        value = np.full(x.shape[:-1], np.inf)
    else:
        value = sum_squares(x - np.clip(x, b.lo, b.hi))
    return float(value) if x.ndim == 1 else value


def max_sqdist_to_box(x: np.ndarray, b: Box) -> Union[BoundValue, np.ndarray]:
    """Squared distance from ``x`` to the farthest corner of ``b``."""
    x = np.asarray(x, dtype=np.float64)
    _check_dims(x, b.n_attrs)
    if b.is_empty:
        value = np.full(x.shape[:-1], -np.inf)
    else:
        far = np.where(np.abs(b.lo - x) > np.abs(b.hi - x), b.lo, b.hi)
        value = sum_squares(x - far)
    return float(value) if x.ndim == 1 else value


def cluster_lower_bounds(points: np.ndarray, m: CenterRegion) -> np.ndarray:
    """(n, K) matrix of per-cluster minimum squared distances to ``m``'s boxes.

    Empty boxes yield ``inf`` so they never win a minimum.
    """
    _check_dims(points, m.n_attrs)
    p = points[:, None, :]
    values = sum_squares(p - np.clip(p, m.lo[None, :, :], m.hi[None, :, :]))
    empty = np.any(m.lo > m.hi, axis=1)
    if empty.any():
        values[:, empty] = np.inf
    return values


def cluster_upper_bounds(points: np.ndarray, m: CenterRegion) -> np.ndarray:
    """(n, K) matrix of per-cluster farthest-corner squared distances.

    Empty boxes yield ``-inf``, the maximum over no points.
    """
    _check_dims(points, m.n_attrs)
    p = points[:, None, :]
    lo = m.lo[None, :, :]
    hi = m.hi[None, :, :]
    far = np.where(np.abs(lo - p) > np.abs(hi - p), lo, hi)
    values = sum_squares(p - far)
    empty = np.any(m.lo > m.hi, axis=1)
    if empty.any():
        values[:, empty] = -np.inf
    return values


def sample_lower_bound(x: np.ndarray, m: CenterRegion) -> BoundValue:
    """Smallest squared distance from ``x`` to any of the region's boxes."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    return float(cluster_lower_bounds(x, m).min())


def node_lower_bound(
    d: Points, m: CenterRegion, active: Optional[np.ndarray] = None
) -> BoundValue:
    """Max over active samples of the sample lower bound.

    Args:
        d: Dataset or (n, A) sample matrix.
        m: Center region of the node.
        active: Index array or boolean mask of samples to include; all when None.

    Raises:
        KCenterError: If the active set is empty.
    """
    points = as_points(d)
    if active is not None:
        points = points[active]
    if points.shape[0] == 0:
        raise KCenterError("Cannot bound a node over an empty sample set")
    return float(cluster_lower_bounds(points, m).min(axis=1).max())


def nearest_center_sqdist(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Per-sample squared distance to the closest of ``centers``."""
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    _check_dims(points, centers.shape[1])
    return sqdist(points[:, None, :], centers[None, :, :]).min(axis=1)


def evaluate_assignment(d: Points, centers: np.ndarray) -> BoundValue:
    """Objective of a fixed center tuple: max over samples of the nearest-center distance."""
    points = as_points(d)
    return float(nearest_center_sqdist(points, centers).max())


def candidate_centers(
    d: Points, m: CenterRegion, eligible: Optional[np.ndarray] = None
) -> Optional[np.ndarray]:
    """Per cluster, the sample inside its box closest to the box midpoint.

    Ties go to the lowest sample index.

    Args:
        d: Dataset or (n, A) sample matrix.
        m: Center region.
        eligible: Optional boolean mask of samples allowed as centers.

    Returns:
        K sample indices, or None when some box holds no eligible sample.
    """
    points = as_points(d)
    inside = m.membership(points)
    if eligible is not None:
        inside &= eligible[:, None]
    if not np.all(inside.any(axis=0)):
        return None
    midpoints = m.lo + (m.hi - m.lo) / 2.0
    dist = sqdist(points[:, None, :], midpoints[None, :, :])
    dist[~inside] = np.inf
    return np.argmin(dist, axis=0)
