"""Cluster membership pre-determination.

A sample assigned to cluster k must lie within squared distance alpha of
center k in every solution no worse than the incumbent alpha; an excluded
cluster can never serve the sample in such a solution. Both facts stay true
in child nodes (regions shrink) and as alpha decreases, so states are
inherited unchanged by children.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .bounds import BoundValue, Points, as_points, sqdist
from .heuristic import CenterSet, fft
from .parallel import SamplePool

logger = logging.getLogger(__name__)

UNASSIGNED = -1

# Relative slack on the 4*alpha separation tests. The triangle inequality
# behind them holds for exact distances; the slack absorbs rounding in the
# computed ones so a borderline pair is never separated by mistake.
SEPARATION_SLACK = 1e-9


def separation_threshold(alpha: BoundValue) -> float:
    """Squared distance beyond which two samples cannot share a cluster."""
    return 4.0 * alpha * (1.0 + SEPARATION_SLACK)


@dataclass
class AssignmentState:
    """Per-sample cluster knowledge.

    Attributes:
        assigned: (n,) cluster id per sample, ``UNASSIGNED`` when unknown.
        excluded: (n, K) mask of clusters proven unable to serve the sample.
    """

    assigned: np.ndarray
    excluded: np.ndarray

    @classmethod
    def empty(cls, n: int, k: int) -> "AssignmentState":
        return cls(np.full(n, UNASSIGNED, dtype=np.int64), np.zeros((n, k), dtype=bool))

    @classmethod
    def from_seeds(cls, n: int, k: int, seeds: Sequence[int]) -> "AssignmentState":
        """Seed ``i`` is assigned to cluster ``i``."""
        state = cls.empty(n, k)
        for cluster, s in enumerate(seeds):
            state.assigned[s] = cluster
            state.excluded[s, :] = True
            state.excluded[s, cluster] = False
        return state

    @property
    def k(self) -> int:
        return int(self.excluded.shape[1])

    def copy(self) -> "AssignmentState":
        return AssignmentState(self.assigned.copy(), self.excluded.copy())

    def members(self, cluster: int) -> np.ndarray:
        """Indices of samples assigned to ``cluster``, ascending."""
        return np.flatnonzero(self.assigned == cluster)

    def assigned_counts(self) -> np.ndarray:
        counts = np.bincount(self.assigned[self.assigned >= 0], minlength=self.k)
        return counts[: self.k]

    def all_clusters_populated(self) -> bool:
        return bool(np.all(self.assigned_counts() > 0))

    def remap(self, keep: np.ndarray) -> "AssignmentState":
        """Drop the samples where ``keep`` is False."""
        return AssignmentState(self.assigned[keep], self.excluded[keep])

    def settle(self) -> bool:
        """Assign samples with a single remaining cluster.

        Returns:
            True if some sample has every cluster excluded.
        """
        open_rows = self.assigned == UNASSIGNED
        remaining = self.k - self.excluded.sum(axis=1)
        forced = open_rows & (remaining == 1)
        if forced.any():
            self.assigned[forced] = np.argmin(self.excluded[forced], axis=1)
        return self.orphaned()

    def orphaned(self) -> bool:
        """True if some unassigned sample has every cluster excluded."""
        open_rows = self.assigned == UNASSIGNED
        return bool(np.any(self.excluded[open_rows].all(axis=1)))


@dataclass(frozen=True)
class RepresentativeScan:
    """Distances from every sample to a capped set of assigned samples per cluster.

    Built once per node and shared by sample-based assignment (4*alpha test)
    and upper-bound redundancy (alpha test).
    """

    rep_indices: np.ndarray
    rep_clusters: np.ndarray
    dist: np.ndarray
    k: int

    @classmethod
    def build(
        cls,
        d: Points,
        st: AssignmentState,
        max_reps: int,
        pool: Optional[SamplePool] = None,
    ) -> "RepresentativeScan":
        """Take up to ``max_reps`` assigned samples per cluster, in index order."""
        points = as_points(d)
        reps = [st.members(cluster)[:max_reps] for cluster in range(st.k)]
        rep_indices = np.concatenate(reps) if reps else np.empty(0, dtype=np.int64)
        rep_clusters = np.concatenate(
            [np.full(len(r), cluster, dtype=np.int64) for cluster, r in enumerate(reps)]
        )
        rep_points = points[rep_indices]
        pool = pool or SamplePool(1)
        if rep_indices.size:
            dist = pool.map_rows(
                lambda rows: sqdist(rows[:, None, :], rep_points[None, :, :]), points
            )
        else:
            dist = np.empty((points.shape[0], 0))
        return cls(rep_indices, rep_clusters, dist, st.k)

    def beyond(self, threshold: float) -> np.ndarray:
        """(n, K) mask: some representative of cluster k is farther than ``threshold``."""
        far = self.dist > threshold
        out = np.zeros((self.dist.shape[0], self.k), dtype=bool)
        for cluster in range(self.k):
            cols = self.rep_clusters == cluster
            if cols.any():
                out[:, cluster] = far[:, cols].any(axis=1)
        return out


def find_initial_seeds(
    d: Points,
    k: int,
    alpha: BoundValue,
    traversals: Optional[Sequence[CenterSet]] = None,
    pool: Optional[SamplePool] = None,
) -> Optional[np.ndarray]:
    """K samples pairwise farther apart than 4*alpha, or None.

    Such samples must sit in K distinct clusters, so seed ``i`` can be
    labelled cluster ``i``. Each traversal in ``traversals`` is tried in
    order and the first one that qualifies is returned; without any, FFT
    started at sample 0 supplies the only candidate.
    """
    points = as_points(d)
    if not traversals:
        traversals = [fft(points, k, 0, pool)]
    threshold = separation_threshold(alpha)
    off_diagonal = ~np.eye(k, dtype=bool)
    for traversal in traversals:
        seeds = np.asarray(traversal.indices, dtype=np.int64)
        seed_points = points[seeds]
        pair = sqdist(seed_points[:, None, :], seed_points[None, :, :])
        if np.all(pair[off_diagonal] > threshold):
            return seeds
    return None


def center_based_assign(
    st: AssignmentState, betas: np.ndarray, alpha: BoundValue
) -> Tuple[AssignmentState, bool]:
    """Exclude clusters whose box lies farther than alpha from the sample.

    Args:
        st: Current state (not modified).
        betas: (n, K) per-cluster lower bounds for the node's region.
        alpha: Incumbent upper bound.

    Returns:
        (updated state, prune) where prune means some sample can be served
        by no cluster, so the node holds no solution better than alpha.
    """
    out = st.copy()
    too_far = betas > alpha
    open_rows = out.assigned == UNASSIGNED
    out.excluded[open_rows] |= too_far[open_rows]

    fixed = np.flatnonzero(~open_rows)
    if fixed.size and np.any(too_far[fixed, out.assigned[fixed]]):
        return out, True
    return out, out.settle()


def sample_based_assign(
    st: AssignmentState,
    d: Points,
    alpha: BoundValue,
    max_reps: int = 10,
    scan: Optional[RepresentativeScan] = None,
) -> AssignmentState:
    """Exclude cluster k for samples farther than 4*alpha from one of k's members.

    Runs only when every cluster has an assigned sample; otherwise the state
    is returned unchanged.
    """
    if not st.all_clusters_populated():
        return st
    if scan is None:
        scan = RepresentativeScan.build(d, st, max_reps)

    out = st.copy()
    open_rows = out.assigned == UNASSIGNED
    out.excluded[open_rows] |= scan.beyond(separation_threshold(alpha))[open_rows]
    out.settle()
    return out
