"""Sample-level worker pool with deterministic reductions.

Rows are split into static contiguous partitions; per-partition results are
combined in partition order, never in completion order. Combined with the
attribute-ordered kernels in :mod:`bounds`, results do not depend on the
worker count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np

from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

# Smallest partition handed to a thread.
MIN_ROWS_PER_WORKER = 16


class SamplePool:
    """Fixed pool of threads farming per-sample work over row partitions."""

    def __init__(self, workers: int = 1, min_rows: int = MIN_ROWS_PER_WORKER):
        """Initialize the pool.

        Args:
            workers: Number of worker threads; 1 runs everything inline.
            min_rows: Smallest partition worth handing to a thread.
        """
        if workers < 1:
            raise ConfigurationError(f"workers must be at least 1, got {workers}")
        self.workers = workers
        self.min_rows = min_rows
        self._executor: Optional[ThreadPoolExecutor] = None
        if workers > 1:
            self._executor = ThreadPoolExecutor(
                max_workers=workers, thread_name_prefix="kcenter"
            )
            logger.debug(f"Started sample pool with {workers} workers")

    def partitions(self, n: int) -> List[Tuple[int, int]]:
        """Contiguous ``(start, stop)`` slices covering ``range(n)``."""
        parts = max(1, min(self.workers, n // max(1, self.min_rows)))
        bounds = np.linspace(0, n, parts + 1).astype(int)
        return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]

    def _run(self, fn: Callable[[np.ndarray], np.ndarray], rows: np.ndarray) -> list:
        parts = self.partitions(rows.shape[0])
        if self._executor is None or len(parts) == 1:
            return [fn(rows[a:b]) for a, b in parts]
        futures = [self._executor.submit(fn, rows[a:b]) for a, b in parts]
        return [future.result() for future in futures]

    def map_rows(
        self, fn: Callable[[np.ndarray], np.ndarray], rows: np.ndarray
    ) -> np.ndarray:
        """Apply ``fn`` to each row partition and concatenate in order."""
        results = self._run(fn, rows)
        if len(results) == 1:
            return results[0]
        return np.concatenate(results, axis=0)

    def reduce_max(
        self, fn: Callable[[np.ndarray], np.ndarray], rows: np.ndarray
    ) -> float:
        """Max of ``fn`` over all rows, combined from per-partition maxima."""
        partial = [float(np.max(r)) for r in self._run(fn, rows)]
        return max(partial)

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> "SamplePool":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()
