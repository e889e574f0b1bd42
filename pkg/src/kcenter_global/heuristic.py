"""Farthest First Traversal and its multi-start wrapper."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bounds import BoundValue, Points, as_points, evaluate_assignment, sqdist
from .exceptions import InfeasibleProblemError
from .parallel import SamplePool

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CenterSet:
    """K sample indices used as cluster centers, in selection order."""

    indices: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.indices)

    def centers(self, d: Points) -> np.ndarray:
        """The (K, A) coordinates of the centers."""
        return as_points(d)[list(self.indices)]


def fft(
    d: Points, k: int, start: int, pool: Optional[SamplePool] = None
) -> CenterSet:
    """Farthest First Traversal from ``start``.

    Each step adds the sample farthest from the chosen set; ties go to the
    lowest index. Chosen samples are never picked twice, so the result has
    no duplicates whenever there are at least ``k`` samples.

    Raises:
        InfeasibleProblemError: If ``k`` is out of range or ``start`` invalid.
    """
    points = as_points(d)
    n = points.shape[0]
    if k < 1 or k > n:
        raise InfeasibleProblemError(f"Cannot pick {k} centers from {n} samples")
    if not 0 <= start < n:
        raise InfeasibleProblemError(f"Start index {start} out of range [0, {n})")

    pool = pool or SamplePool(1)
    chosen = [start]
    dist = pool.map_rows(lambda rows: sqdist(rows, points[start]), points)
    dist[start] = -np.inf
    while len(chosen) < k:
        nxt = int(np.argmax(dist))
        chosen.append(nxt)
        dist = np.minimum(
            dist, pool.map_rows(lambda rows: sqdist(rows, points[nxt]), points)
        )
        dist[chosen] = -np.inf
    return CenterSet(tuple(chosen))


def fft_multistart(
    d: Points, k: int, trials: int, seed: int, pool: Optional[SamplePool] = None
) -> Tuple[CenterSet, BoundValue]:
    """Best of ``trials`` FFT runs from seeded random starts.

    Starts are drawn one at a time from ``numpy.random.default_rng(seed)``,
    so the first ``t`` starts are the same for any ``trials >= t``.
    """
    if trials < 1:
        raise InfeasibleProblemError(f"Need at least one FFT trial, got {trials}")
    points = as_points(d)
    rng = np.random.default_rng(seed)

    best_set: Optional[CenterSet] = None
    best_value = np.inf
    for trial in range(trials):
        start = int(rng.integers(points.shape[0]))
        candidate = fft(points, k, start, pool)
        value = evaluate_assignment(points, candidate.centers(points))
        if value < best_value:
            best_set, best_value = candidate, value
            logger.debug(f"FFT trial {trial} (start {start}) improved to {value:.6g}")

    assert best_set is not None
    return best_set, float(best_value)


def fft_starts(n: int, count: int, seed: int) -> np.ndarray:
    """Start indices for a wide FFT sweep.

    Every sample when ``n <= count``; otherwise ``count`` distinct samples
    drawn with ``default_rng(seed)``, in index order.
    """
    if count < 1:
        raise InfeasibleProblemError(f"Need at least one FFT start, got {count}")
    if n <= count:
        return np.arange(n)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=count, replace=False))


def fft_traversals(
    d: Points, k: int, starts: Sequence[int], pool: Optional[SamplePool] = None
) -> List[Tuple[CenterSet, BoundValue]]:
    """FFT from each start with its objective, in start order."""
    points = as_points(d)
    out = []
    for start in starts:
        candidate = fft(points, k, int(start), pool)
        out.append((candidate, evaluate_assignment(points, candidate.centers(points))))
    return out
