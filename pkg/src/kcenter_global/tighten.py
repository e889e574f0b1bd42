"""Feasibility-based tightening of cluster center boxes."""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

import numpy as np

from .bounds import BoundValue, Points, as_points, sqdist
from .dataset import Box, CenterRegion
from .assign import AssignmentState

if TYPE_CHECKING:
    from .search import SolverConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TightenOutcome:
    """Tightened region plus the number of candidate centers per cluster."""

    region: CenterRegion
    counts: np.ndarray
    infeasible: bool


def _inside(points: np.ndarray, box: Box, eligible: Optional[np.ndarray]) -> np.ndarray:
    mask = box.contains(points)
    if eligible is not None:
        mask &= eligible
    return mask


def ball_bt(
    d: Points,
    box: Box,
    assigned: Sequence[int],
    alpha: BoundValue,
    max_balls: int = 50,
    eligible: Optional[np.ndarray] = None,
) -> Box:
    """Shrink ``box`` to the samples within alpha of every assigned sample.

    Only the first ``max_balls`` assigned samples are used. The result is the
    bounding box of the surviving samples, or the empty marker.
    """
    points = as_points(d)
    keep = _inside(points, box, eligible)
    balls = np.asarray(assigned, dtype=np.int64)[:max_balls]
    if balls.size and keep.any():
        rows = np.flatnonzero(keep)
        close = sqdist(points[rows][:, None, :], points[balls][None, :, :]) <= alpha
        keep[rows[~close.all(axis=1)]] = False
    return Box.around(points[keep])


def box_bt(box: Box, assigned_points: np.ndarray, alpha: BoundValue) -> Box:
    """Intersect ``box`` with the enclosing box of each alpha-ball.

    Bounds are rounded outward by a few ulps so that a sample whose computed
    squared distance is within alpha is never cut off.
    """
    assigned_points = np.atleast_2d(np.asarray(assigned_points, dtype=np.float64))
    if assigned_points.shape[0] == 0 or box.is_empty:
        return box
    radius = float(np.sqrt(alpha))
    slack = 4.0 * np.finfo(np.float64).eps * (np.abs(assigned_points) + radius)
    lo = np.max(assigned_points - radius - slack, axis=0)
    hi = np.min(assigned_points + radius + slack, axis=0)
    out = box.intersect(Box(lo, hi))
    return Box.empty(box.n_attrs) if out.is_empty else out


def centers_on_samples_bt(
    d: Points, box: Box, eligible: Optional[np.ndarray] = None
) -> Tuple[Box, int]:
    """Bounding box of the samples inside ``box`` and how many there are."""
    points = as_points(d)
    mask = _inside(points, box, eligible)
    return Box.around(points[mask]), int(mask.sum())


def symmetry_break(m: CenterRegion) -> CenterRegion:
    """Impose ``mu_1^1 <= mu_1^2 <= ... <= mu_1^K`` on the first attribute."""
    lo = m.lo.copy()
    hi = m.hi.copy()
    for k in range(1, m.k):
        lo[k, 0] = max(lo[k, 0], lo[k - 1, 0])
    for k in range(m.k - 2, -1, -1):
        hi[k, 0] = min(hi[k, 0], hi[k + 1, 0])
    return CenterRegion(lo, hi)


def tighten_node(
    d: Points,
    m: CenterRegion,
    st: AssignmentState,
    alpha: BoundValue,
    cfg: "SolverConfig",
    symmetry: bool = False,
    eligible: Optional[np.ndarray] = None,
) -> TightenOutcome:
    """Tighten every cluster's box.

    With bounds tightening enabled, boxes of clusters with assigned samples
    are cut by their alpha-balls (ball form up to ``cfg.ball_threshold``
    members; beyond that the box form over all members, followed by the
    ball form over the first ``cfg.ball_threshold``). Every box is then
    shrunk to its eligible samples, and the symmetry chain is applied when
    requested.
    """
    points = as_points(d)
    boxes = []
    counts = np.zeros(m.k, dtype=np.int64)
    for k, box in enumerate(m.boxes):
        if cfg.bounds_tightening:
            members = st.members(k)
            if members.size > cfg.ball_threshold:
                box = box_bt(box, points[members], alpha)
            if members.size:
                box = ball_bt(points, box, members, alpha, cfg.ball_threshold, eligible)
        box, counts[k] = centers_on_samples_bt(points, box, eligible)
        boxes.append(box)
    region = CenterRegion.from_boxes(boxes)

    # Shrinking a box to its samples can re-activate the chain, so repeat
    # until no box moves.
    while symmetry and m.k > 1 and not region.is_empty:
        ordered = symmetry_break(region)
        changed = np.flatnonzero(
            np.any(ordered.lo != region.lo, axis=1)
            | np.any(ordered.hi != region.hi, axis=1)
        )
        if changed.size == 0:
            break
        for k in changed:
            box, counts[k] = centers_on_samples_bt(points, ordered.box(k), eligible)
            region = region.with_box(int(k), box)

    return TightenOutcome(region, counts, bool(np.any(counts == 0)))
