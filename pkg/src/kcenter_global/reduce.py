"""Redundant-sample detection and permanent sample reduction.

A sample is lb-redundant in a node when even its farthest possible distance
to the nearest center box is below the global lower bound: it can never be
the worst-case sample there. It is ub-redundant when it cannot be a center
for any cluster: it lies outside every box, or some sample assigned to the
cluster is farther than alpha from it. Both properties are inherited by
child nodes. Samples redundant in both senses in every open node are
deleted from the working set.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Protocol, Tuple

import numpy as np

from .assign import AssignmentState, RepresentativeScan
from .bounds import (
    BoundValue,
    Points,
    as_points,
    cluster_upper_bounds,
    max_sqdist_to_box,
    sqdist,
)
from .dataset import CenterRegion, Dataset

logger = logging.getLogger(__name__)


@dataclass
class RedundancyFlags:
    """Per-sample redundancy flags of one node."""

    lb: np.ndarray
    ub: np.ndarray

    @classmethod
    def empty(cls, n: int) -> "RedundancyFlags":
        return cls(np.zeros(n, dtype=bool), np.zeros(n, dtype=bool))

    def copy(self) -> "RedundancyFlags":
        return RedundancyFlags(self.lb.copy(), self.ub.copy())

    def remap(self, keep: np.ndarray) -> "RedundancyFlags":
        return RedundancyFlags(self.lb[keep], self.ub[keep])

    @property
    def both(self) -> np.ndarray:
        return self.lb & self.ub


class SampleHolder(Protocol):
    """Anything carrying per-sample node state (the search engine's nodes)."""

    region: CenterRegion
    state: AssignmentState
    flags: RedundancyFlags


@dataclass
class WorkingSet:
    """Samples still in play, with their original dataset indices."""

    points: np.ndarray
    ids: np.ndarray
    audit: List[Tuple[int, List[int]]] = field(default_factory=list)

    @classmethod
    def from_dataset(cls, d: Dataset) -> "WorkingSet":
        return cls(d.samples, np.arange(d.n_samples))

    @property
    def n_samples(self) -> int:
        return int(self.points.shape[0])

    @property
    def removed_count(self) -> int:
        return sum(len(ids) for _, ids in self.audit)

    def remove(self, drop: np.ndarray, iteration: int) -> np.ndarray:
        """Delete the samples flagged in ``drop``; returns the keep mask."""
        keep = ~drop
        self.audit.append((iteration, [int(i) for i in self.ids[drop]]))
        self.points = self.points[keep]
        self.ids = self.ids[keep]
        return keep


def lb_redundant(x: np.ndarray, m: CenterRegion, beta_best: BoundValue) -> bool:
    """True iff ``min_k max_{mu in M^k} ||x - mu||^2 < beta_best``."""
    farthest = min(max_sqdist_to_box(x, box) for box in m.boxes)
    return bool(farthest < beta_best)


def lb_redundant_mask(
    d: Points, m: CenterRegion, beta_best: BoundValue
) -> np.ndarray:
    """Vectorized :func:`lb_redundant` over all samples."""
    return cluster_upper_bounds(as_points(d), m).min(axis=1) < beta_best


def ub_redundant(
    j: int, d: Points, m: CenterRegion, st: AssignmentState, alpha: BoundValue
) -> bool:
    """True iff sample ``j`` cannot be the center of any cluster.

    Checks, per cluster, box containment and the distance from ``j`` to
    every sample assigned to the cluster.
    """
    points = as_points(d)
    x = points[j]
    inside = m.membership(x[None, :])[0]
    for k in range(m.k):
        if not inside[k]:
            continue
        members = st.members(k)
        if members.size and np.any(sqdist(points[members], x) > alpha):
            continue
        return False
    return True


def ub_redundant_mask(
    d: Points,
    m: CenterRegion,
    alpha: BoundValue,
    scan: Optional[RepresentativeScan] = None,
) -> np.ndarray:
    """Vectorized ub-redundancy, reusing a representative scan when given."""
    blocked = ~m.membership(as_points(d))
    if scan is not None and scan.rep_indices.size:
        blocked |= scan.beyond(alpha)
    return blocked.all(axis=1)


def sample_reduction(
    nodes: Iterable[SampleHolder],
    working: WorkingSet,
    beta_best: BoundValue,
    iteration: int,
) -> np.ndarray:
    """Delete samples that are lb- and ub-redundant in every open node.

    Refreshes each node's lb flags against ``beta_best`` and its ub flags
    against box containment, intersects the flags across nodes, removes the
    result from ``working`` and remaps every node's per-sample state.

    Returns:
        Original ids of the removed samples.
    """
    nodes = list(nodes)
    redundant = np.ones(working.n_samples, dtype=bool)
    for node in nodes:
        # Flags may be shared with sibling nodes, so build fresh arrays.
        node.flags = RedundancyFlags(
            node.flags.lb | lb_redundant_mask(working.points, node.region, beta_best),
            node.flags.ub | ~node.region.membership(working.points).any(axis=1),
        )
        redundant &= node.flags.both
        if not redundant.any():
            return np.empty(0, dtype=np.int64)

    # Keep at least one sample per working set; the search never runs dry.
    if redundant.all():
        redundant[0] = False
    removed_ids = working.ids[redundant]
    keep = working.remove(redundant, iteration)
    for node in nodes:
        node.state = node.state.remap(keep)
        node.flags = node.flags.remap(keep)
    logger.debug(
        f"Iteration {iteration}: removed {removed_ids.size} samples, "
        f"{working.n_samples} remain"
    )
    return removed_ids
