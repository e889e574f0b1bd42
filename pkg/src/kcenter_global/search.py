"""Reduced-space branch and bound over the K cluster center boxes.

The engine only branches on center regions. Each selected node goes through
cluster assignment, bounds tightening, periodic sample reduction and
branching; children are bounded with the closed-form lower bound and a
midpoint-nearest candidate solution.
"""

import heapq
import logging
import time
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .assign import (
    AssignmentState,
    RepresentativeScan,
    center_based_assign,
    find_initial_seeds,
    sample_based_assign,
)
from .bounds import (
    BoundValue,
    candidate_centers,
    cluster_lower_bounds,
    evaluate_assignment,
    nearest_center_sqdist,
)
from .config import Config, get_config
from .dataset import CenterRegion, Dataset, root_region
from .exceptions import (
    ConfigurationError,
    InfeasibleProblemError,
    KCenterError,
    NodeLimitError,
    TerminalNodeError,
)
from .heuristic import CenterSet, fft_multistart, fft_starts, fft_traversals
from .parallel import SamplePool
from .reduce import (
    RedundancyFlags,
    WorkingSet,
    lb_redundant_mask,
    sample_reduction,
    ub_redundant_mask,
)
from .tighten import centers_on_samples_bt, tighten_node

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Typed solver settings; defaults mirror the ``solver`` config section."""

    epsilon_rel: float = 0.001
    time_limit: float = 14400.0
    i_sr: int = 10
    ball_threshold: int = 50
    max_representatives: int = 10
    fft_trials: int = 1
    seed_trials: int = 200
    max_open_nodes: int = 1_000_000
    seed: int = 0
    workers: int = 1
    log_interval: int = 100
    bounds_tightening: bool = True
    assignment: bool = True
    sample_reduction: bool = True
    symmetry_breaking: bool = True

    def __post_init__(self) -> None:
        if self.epsilon_rel < 0:
            raise ConfigurationError(
                f"epsilon_rel must be non-negative, got {self.epsilon_rel}"
            )
        if self.time_limit <= 0:
            raise ConfigurationError(f"time_limit must be positive, got {self.time_limit}")
        for name in (
            "i_sr",
            "ball_threshold",
            "max_representatives",
            "fft_trials",
            "seed_trials",
            "max_open_nodes",
            "workers",
            "log_interval",
        ):
            value = getattr(self, name)
            if value < 1:
                raise ConfigurationError(f"{name} must be at least 1, got {value}")

    @classmethod
    def from_config(
        cls, config: Optional[Config] = None, **overrides: Any
    ) -> "SolverConfig":
        """Build from the ``solver`` section, then apply non-None overrides."""
        config = config or get_config()
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in config.section("solver").items() if k in known}
        values.update({k: v for k, v in overrides.items() if v is not None})
        unknown = set(values) - known
        if unknown:
            raise ConfigurationError(f"Unknown solver settings: {sorted(unknown)}")
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class Termination(str, Enum):
    """Why a solve stopped."""

    GAP = "gap"
    QUEUE_EMPTY = "queue-empty"
    TIME_LIMIT = "time-limit"


class TraceRecord(NamedTuple):
    """One iteration of the bound sequences."""

    iteration: int
    beta: float
    alpha: float
    open_nodes: int
    samples_active: int


@dataclass
class SolveReport:
    """Outcome of a branch-and-bound solve."""

    ub: BoundValue
    lb: BoundValue
    gap_pct: float
    incumbent: CenterSet
    nodes: int
    wall_time: float
    termination: Termination
    seeds_found: bool = False
    samples_removed: int = 0
    reduction_log: List[Tuple[int, List[int]]] = field(default_factory=list)


@dataclass(eq=False)
class Node:
    """A center region with inherited per-sample knowledge."""

    region: CenterRegion
    lb: BoundValue
    state: AssignmentState
    flags: RedundancyFlags
    depth: int
    id: int


class NodeQueue:
    """Min-heap of open nodes keyed by (lower bound, node id)."""

    def __init__(self, max_open_nodes: int = 1_000_000):
        self._heap: List[Tuple[float, int, Node]] = []
        self.max_open_nodes = max_open_nodes

    def push(self, node: Node) -> None:
        if len(self._heap) >= self.max_open_nodes:
            raise NodeLimitError(
                f"Open node limit of {self.max_open_nodes} reached; "
                "raise solver.max_open_nodes or loosen epsilon_rel"
            )
        heapq.heappush(self._heap, (node.lb, node.id, node))

    def pop(self) -> Node:
        if not self._heap:
            raise KCenterError("Cannot select a node from an empty queue")
        return heapq.heappop(self._heap)[2]

    def min_lb(self) -> float:
        return self._heap[0][0] if self._heap else np.inf

    def prune(self, alpha: BoundValue) -> int:
        """Drop every node whose lower bound reaches ``alpha``."""
        before = len(self._heap)
        self._heap = [entry for entry in self._heap if entry[0] < alpha]
        heapq.heapify(self._heap)
        return before - len(self._heap)

    def nodes(self) -> List[Node]:
        return [entry[2] for entry in self._heap]

    def __len__(self) -> int:
        return len(self._heap)


def select_node(queue: NodeQueue) -> Node:
    """Remove and return the node with the least lower bound (oldest on ties)."""
    return queue.pop()


def branch(n: Node) -> Tuple[CenterRegion, CenterRegion]:
    """Split the widest center coordinate at its midpoint.

    Ties go to the lowest (cluster, attribute) index.

    Raises:
        TerminalNodeError: If every box is already a single point.
    """
    widths = n.region.widths
    flat = int(np.argmax(widths))
    k, a = divmod(flat, n.region.n_attrs)
    lo, hi = n.region.lo[k, a], n.region.hi[k, a]
    if not hi > lo:
        raise TerminalNodeError(f"Node {n.id} has no coordinate left to split")
    mid = lo + (hi - lo) / 2.0

    left_hi = n.region.hi.copy()
    right_lo = n.region.lo.copy()
    # Adjacent floats have no midpoint strictly between them.
    left_hi[k, a] = mid if mid < hi else lo
    right_lo[k, a] = mid if mid > lo else hi
    return (
        CenterRegion(n.region.lo, left_hi),
        CenterRegion(right_lo, n.region.hi),
    )


def _shrink_to_samples(
    points: np.ndarray, m: CenterRegion, eligible: np.ndarray
) -> Optional[CenterRegion]:
    """Shrink each box to its eligible samples; None if one holds none."""
    boxes = []
    for box in m.boxes:
        box, count = centers_on_samples_bt(points, box, eligible)
        if count == 0:
            return None
        boxes.append(box)
    return CenterRegion.from_boxes(boxes)


def relative_gap(ub: BoundValue, lb: BoundValue) -> float:
    """``(ub - lb) / ub``, zero when the upper bound is zero."""
    if ub <= 0.0:
        return 0.0
    return max(0.0, (ub - lb) / ub)


class KCenterSolver:
    """Branch-and-bound solver for one dataset and cluster count."""

    def __init__(
        self,
        d: Dataset,
        k: int,
        cfg: Optional[SolverConfig] = None,
        trace: Optional[Callable[[TraceRecord], None]] = None,
        pool: Optional[SamplePool] = None,
    ):
        """Initialize the solver.

        Args:
            d: Dataset to cluster.
            k: Number of centers.
            cfg: Solver settings; built from the global config if None.
            trace: Called with a TraceRecord after every iteration.
            pool: Worker pool; one is created from ``cfg.workers`` if None.
        """
        if k < 1:
            raise InfeasibleProblemError(f"Number of clusters must be at least 1, got {k}")
        distinct = d.distinct_count()
        if k > distinct:
            raise InfeasibleProblemError(
                f"Cannot place {k} centers on {distinct} distinct samples"
            )
        self.d = d
        self.k = k
        self.cfg = cfg or SolverConfig.from_config()
        self.trace = trace
        self._owns_pool = pool is None
        self.pool = pool or SamplePool(self.cfg.workers)

        self.working = WorkingSet.from_dataset(d)
        self.queue = NodeQueue(self.cfg.max_open_nodes)
        self.alpha: BoundValue = np.inf
        self.incumbent: Optional[Tuple[int, ...]] = None
        self.beta: BoundValue = 0.0
        self.symmetry = False
        self.seeds_found = False
        self.iteration = 0
        self._next_id = 0

    def _new_id(self) -> int:
        node_id = self._next_id
        self._next_id += 1
        return node_id

    def _lower_bound(self, region: CenterRegion, active: np.ndarray) -> float:
        """Max over active samples of the sample lower bound; -inf if none."""
        rows = self.working.points[active]
        if rows.shape[0] == 0:
            return -np.inf
        return self.pool.reduce_max(
            lambda part: cluster_lower_bounds(part, region).min(axis=1), rows
        )

    def _offer(self, value: BoundValue, ids: Sequence[int]) -> bool:
        """Replace the incumbent when ``value`` improves on it."""
        if value >= self.alpha:
            return False
        self.alpha = float(value)
        self.incumbent = tuple(int(i) for i in ids)
        pruned = self.queue.prune(self.alpha)
        logger.debug(
            f"Iteration {self.iteration}: incumbent {self.alpha:.6g}, "
            f"pruned {pruned} open nodes"
        )
        return True

    def _evaluate(self, positions: np.ndarray) -> BoundValue:
        """Objective of the working samples at ``positions`` over the working set."""
        points = self.working.points
        centers = points[positions]
        return self.pool.reduce_max(
            lambda part: nearest_center_sqdist(part, centers), points
        )

    def node_bound_and_prune(
        self, parent: Node, children: Sequence[CenterRegion]
    ) -> List[Node]:
        """Bound child regions, update the incumbent and keep the promising ones.

        Children whose boxes hold no eligible sample are dropped; the others
        get a lower bound (never below the parent's) and a candidate solution
        built from the samples nearest each box midpoint. After the incumbent
        update, children with ``lb >= alpha`` are dropped.
        """
        points = self.working.points
        eligible = ~parent.flags.ub
        active = ~parent.flags.lb
        bounded: List[Tuple[CenterRegion, float]] = []
        for child in children:
            region = _shrink_to_samples(points, child, eligible)
            if region is None:
                continue
            lb = max(parent.lb, self._lower_bound(region, active))
            positions = candidate_centers(points, region, eligible)
            if positions is not None:
                self._offer(self._evaluate(positions), self.working.ids[positions])
            bounded.append((region, lb))

        return [
            Node(region, lb, parent.state, parent.flags, parent.depth + 1, self._new_id())
            for region, lb in bounded
            if lb < self.alpha
        ]

    def _process(self, node: Node) -> None:
        """Assign, tighten, reduce and branch one selected node."""
        points = self.working.points
        region = node.region
        state = node.state
        flags = node.flags.copy()
        cfg = self.cfg

        if cfg.assignment:
            if node.depth > 0:
                betas = self.pool.map_rows(
                    lambda part: cluster_lower_bounds(part, region), points
                )
                state, prune = center_based_assign(state, betas, self.alpha)
                if prune:
                    return
            scan = RepresentativeScan.build(
                points, state, cfg.max_representatives, self.pool
            )
            state = sample_based_assign(state, points, self.alpha, scan=scan)
            if state.orphaned():
                return
            flags.ub |= ub_redundant_mask(points, region, self.alpha, scan)

        outcome = tighten_node(
            points, region, state, self.alpha, cfg, self.symmetry, ~flags.ub
        )
        if outcome.infeasible:
            return
        region = outcome.region
        lb = max(node.lb, self._lower_bound(region, ~flags.lb))
        if lb >= self.alpha:
            return
        flags.lb |= lb_redundant_mask(points, region, self.beta)
        node.region, node.lb, node.state, node.flags = region, lb, state, flags

        if cfg.sample_reduction and self.iteration % cfg.i_sr == 0:
            removed = sample_reduction(
                [node] + self.queue.nodes(), self.working, self.beta, self.iteration
            )
            if removed.size:
                points = self.working.points

        if node.region.is_point:
            # Every box holds one center location: the node is solved exactly.
            positions = candidate_centers(points, node.region, ~node.flags.ub)
            if positions is not None:
                self._offer(self._evaluate(positions), self.working.ids[positions])
            return

        for child in self.node_bound_and_prune(node, branch(node)):
            self.queue.push(child)

    def _emit(self) -> None:
        if self.trace is not None:
            self.trace(
                TraceRecord(
                    self.iteration,
                    float(min(self.queue.min_lb(), self.alpha)),
                    float(self.alpha),
                    len(self.queue),
                    self.working.n_samples,
                )
            )

    def _root(self) -> None:
        """Root bounds, FFT incumbent and initial seeds, in that order."""
        cfg = self.cfg
        points = self.working.points
        region = root_region(self.d, self.k)
        root_lb = self._lower_bound(region, np.ones(points.shape[0], dtype=bool))

        traversal, value = fft_multistart(
            points, self.k, cfg.fft_trials, cfg.seed, self.pool
        )
        self._offer(value, traversal.indices)

        seeds = None
        if cfg.assignment:
            # Seeds need a tight alpha: sweep many starts, keep the best
            # bound, then test every traversal against it.
            starts = fft_starts(points.shape[0], cfg.seed_trials, cfg.seed)
            sweep = fft_traversals(points, self.k, starts, self.pool)
            best_set, best_value = min(sweep, key=lambda item: item[1])
            self._offer(best_value, best_set.indices)
            candidates = [traversal] + [centers for centers, _ in sweep]
            seeds = find_initial_seeds(
                points, self.k, self.alpha, candidates, self.pool
            )
        self.seeds_found = seeds is not None
        self.symmetry = cfg.symmetry_breaking and seeds is None
        if seeds is not None:
            state = AssignmentState.from_seeds(points.shape[0], self.k, seeds)
        else:
            state = AssignmentState.empty(points.shape[0], self.k)

        logger.info(
            f"Root: lower bound {root_lb:.6g}, FFT upper bound {self.alpha:.6g}, "
            f"initial seeds {'found' if self.seeds_found else 'not found'}"
        )
        self.beta = root_lb
        if root_lb < self.alpha:
            root = Node(
                region,
                root_lb,
                state,
                RedundancyFlags.empty(points.shape[0]),
                0,
                self._new_id(),
            )
            self.queue.push(root)

    def solve(self) -> SolveReport:
        """Run branch and bound until the gap, queue or time limit stops it."""
        start = time.perf_counter()
        try:
            self._root()
            self._emit()
            while True:
                if not self.queue:
                    termination = Termination.QUEUE_EMPTY
                    break
                self.beta = min(self.queue.min_lb(), self.alpha)
                if relative_gap(self.alpha, self.beta) <= self.cfg.epsilon_rel:
                    termination = Termination.GAP
                    break
                if time.perf_counter() - start >= self.cfg.time_limit:
                    termination = Termination.TIME_LIMIT
                    break

                node = select_node(self.queue)
                self.iteration += 1
                self._process(node)
                self._emit()

                if self.iteration % self.cfg.log_interval == 0:
                    logger.info(
                        f"Iteration {self.iteration}: LB {self.beta:.6g}, "
                        f"UB {self.alpha:.6g}, open {len(self.queue)}, "
                        f"samples {self.working.n_samples}"
                    )
        finally:
            if self._owns_pool:
                self.pool.close()

        return self._report(termination, time.perf_counter() - start)

    def _report(self, termination: Termination, wall_time: float) -> SolveReport:
        assert self.incumbent is not None
        incumbent = CenterSet(self.incumbent)
        ub = evaluate_assignment(self.d, incumbent.centers(self.d))
        if termination is Termination.QUEUE_EMPTY:
            lb = ub
        else:
            lb = min(self.queue.min_lb(), ub)
        gap_pct = 100.0 * relative_gap(ub, lb)
        logger.info(
            f"Finished ({termination.value}): UB {ub:.6g}, LB {lb:.6g}, "
            f"gap {gap_pct:.4f}%, {max(self.iteration, 1)} nodes, {wall_time:.2f}s"
        )
        return SolveReport(
            ub=ub,
            lb=lb,
            gap_pct=gap_pct,
            incumbent=incumbent,
            nodes=max(self.iteration, 1),
            wall_time=wall_time,
            termination=termination,
            seeds_found=self.seeds_found,
            samples_removed=self.working.removed_count,
            reduction_log=list(self.working.audit),
        )


def solve(
    d: Dataset,
    k: int,
    cfg: Optional[SolverConfig] = None,
    trace: Optional[Callable[[TraceRecord], None]] = None,
) -> SolveReport:
    """Solve the K-center problem on ``d`` to the configured relative gap."""
    return KCenterSolver(d, k, cfg, trace).solve()
