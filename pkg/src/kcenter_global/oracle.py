"""Brute-force K-center solver used as ground truth on small instances."""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounds import BoundValue, sqdist
from .config import get_config
from .dataset import Dataset
from .exceptions import BudgetExceededError, InfeasibleProblemError
from .heuristic import CenterSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    """Optimal objective and the lexicographically smallest optimal center set."""

    opt_value: BoundValue
    opt_centers: CenterSet


def brute_force(
    d: Dataset,
    k: int,
    limit: Optional[int] = None,
    batch_size: Optional[int] = None,
) -> OracleResult:
    """Evaluate every k-subset of samples as a center set.

    Subsets are enumerated in lexicographic order and only a strictly
    better value replaces the best so far, so ties resolve to the
    lexicographically smallest subset.

    Args:
        d: Dataset to cluster.
        k: Number of centers.
        limit: Maximum number of subsets; ``oracle.limit`` from config if None.
        batch_size: Subsets evaluated per vectorized batch.

    Returns:
        OracleResult: The optimum.

    Raises:
        InfeasibleProblemError: If k is not in ``[1, S]``.
        BudgetExceededError: If ``C(S, k)`` exceeds ``limit``.
    """
    config = get_config()
    limit = config.get("oracle.limit", 5_000_000) if limit is None else limit
    batch_size = batch_size or config.get("oracle.batch_size", 20_000)

    n = d.n_samples
    if not 1 <= k <= n:
        raise InfeasibleProblemError(f"Cannot pick {k} centers from {n} samples")
    total = math.comb(n, k)
    if total > limit:
        raise BudgetExceededError(
            f"C({n}, {k}) = {total} subsets exceeds the oracle limit of {limit}"
        )

    points = d.samples
    # dist[s, c]: squared distance from sample s to candidate center c.
    dist = sqdist(points[:, None, :], points[None, :, :])

    subsets = itertools.combinations(range(n), k)
    best_value = np.inf
    best_subset: Optional[np.ndarray] = None
    evaluated = 0
    while evaluated < total:
        chunk = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(subsets, batch_size)),
            dtype=np.int64,
        ).reshape(-1, k)
        evaluated += chunk.shape[0]
        values = dist[:, chunk].min(axis=2).max(axis=0)
        pos = int(np.argmin(values))
        if values[pos] < best_value:
            best_value = float(values[pos])
            best_subset = chunk[pos]

    assert best_subset is not None
    logger.debug(f"Oracle evaluated {total} subsets, optimum {best_value:.6g}")
    return OracleResult(best_value, CenterSet(tuple(int(i) for i in best_subset)))
