"""Tests for the branch-and-bound search engine."""

import itertools
import unittest
from unittest.mock import patch

import numpy as np

from kcenter_global.assign import AssignmentState
from kcenter_global.bounds import evaluate_assignment
from kcenter_global.dataset import CenterRegion, Dataset, root_region
from kcenter_global.exceptions import (
    InfeasibleProblemError,
    KCenterError,
    NodeLimitError,
    TerminalNodeError,
)
from kcenter_global.heuristic import CenterSet
from kcenter_global.oracle import brute_force
from kcenter_global.parallel import SamplePool
from kcenter_global.reduce import RedundancyFlags
from kcenter_global.search import (
    KCenterSolver,
    Node,
    NodeQueue,
    SolverConfig,
    Termination,
    branch,
    relative_gap,
    select_node,
    solve,
)

EXACT = SolverConfig(epsilon_rel=0.0)


def make_node(region, lb=0.0, node_id=0, n=1):
    return Node(
        region,
        lb,
        AssignmentState.empty(n, region.k),
        RedundancyFlags.empty(n),
        depth=0,
        id=node_id,
    )


def random_instance(rng):
    n = int(rng.integers(8, 26))
    n_attrs = int(rng.integers(1, 5))
    k = int(rng.integers(1, 4))
    return Dataset(rng.uniform(0.0, 10.0, size=(n, n_attrs))), k


def separated_clusters():
    """Three tight groups far apart, ten samples each."""
    rng = np.random.default_rng(12)
    centers = np.array([[0.0, 0.0], [50.0, 0.0], [0.0, 50.0]])
    return Dataset(np.vstack([c + rng.uniform(-1, 1, size=(10, 2)) for c in centers]))


class TestBranch(unittest.TestCase):
    """Test cases for branch."""

    def test_widest_coordinate(self):
        region = CenterRegion(
            np.array([[0.0, 0.0], [0.0, 0.0]]), np.array([[4.0, 1.0], [1.0, 1.0]])
        )
        left, right = branch(make_node(region))
        self.assertEqual(left.hi[0, 0], 2.0)
        self.assertEqual(right.lo[0, 0], 2.0)
        np.testing.assert_array_equal(left.lo, region.lo)
        np.testing.assert_array_equal(right.hi, region.hi)

    def test_tie_goes_to_lowest_index(self):
        region = CenterRegion(np.zeros((2, 2)), np.ones((2, 2)))
        left, right = branch(make_node(region))
        self.assertEqual(left.hi[0, 0], 0.5)
        np.testing.assert_array_equal(left.hi[1], [1.0, 1.0])
        np.testing.assert_array_equal(left.hi[0, 1], 1.0)

    def test_children_cover_parent(self):
        rng = np.random.default_rng(1)
        lo = rng.uniform(-1, 0, size=(3, 2))
        region = CenterRegion(lo, lo + rng.uniform(0.1, 2, size=(3, 2)))
        left, right = branch(make_node(region))
        changed = np.argwhere((left.hi != region.hi) | (right.lo != region.lo))
        self.assertEqual(len(changed), 1)
        k, a = changed[0]
        self.assertEqual(left.hi[k, a], right.lo[k, a])
        self.assertTrue(left.issubset(region))
        self.assertTrue(right.issubset(region))

    def test_adjacent_floats(self):
        lo = 1.0
        hi = np.nextafter(1.0, 2.0)
        region = CenterRegion(np.array([[lo]]), np.array([[hi]]))
        left, right = branch(make_node(region))
        self.assertTrue(left.is_point)
        self.assertTrue(right.is_point)
        self.assertEqual(left.hi[0, 0], lo)
        self.assertEqual(right.lo[0, 0], hi)

    def test_terminal_node(self):
        region = CenterRegion(np.ones((2, 2)), np.ones((2, 2)))
        with self.assertRaises(TerminalNodeError):
            branch(make_node(region))


class TestNodeQueue(unittest.TestCase):
    """Test cases for NodeQueue and select_node."""

    def setUp(self):
        """Set up test fixtures."""
        self.region = CenterRegion(np.zeros((1, 1)), np.ones((1, 1)))

    def test_least_bound_first(self):
        queue = NodeQueue()
        for node_id, lb in enumerate([5.0, 3.0, 7.0]):
            queue.push(make_node(self.region, lb, node_id))
        self.assertEqual(select_node(queue).lb, 3.0)
        self.assertEqual(queue.min_lb(), 5.0)

    def test_ties_by_id(self):
        queue = NodeQueue()
        queue.push(make_node(self.region, 3.0, 9))
        queue.push(make_node(self.region, 3.0, 4))
        self.assertEqual(select_node(queue).id, 4)

    def test_prune(self):
        queue = NodeQueue()
        for node_id, lb in enumerate([1.0, 2.0, 3.0]):
            queue.push(make_node(self.region, lb, node_id))
        self.assertEqual(queue.prune(2.0), 2)
        self.assertEqual(len(queue), 1)
        self.assertEqual(queue.min_lb(), 1.0)

    def test_empty_and_limit(self):
        queue = NodeQueue(max_open_nodes=1)
        with self.assertRaises(KCenterError):
            select_node(queue)
        self.assertEqual(queue.min_lb(), np.inf)
        queue.push(make_node(self.region))
        with self.assertRaises(NodeLimitError):
            queue.push(make_node(self.region, node_id=1))


class TestRelativeGap(unittest.TestCase):
    def test_values(self):
        self.assertEqual(relative_gap(2.0, 1.0), 0.5)
        self.assertEqual(relative_gap(0.0, 0.0), 0.0)
        self.assertEqual(relative_gap(1.0, 1.0), 0.0)


class TestNodeBoundAndPrune(unittest.TestCase):
    """Test cases for KCenterSolver.node_bound_and_prune."""

    def setUp(self):
        """Set up test fixtures."""
        self.d = Dataset(np.array([[0.0], [1.0], [10.0], [11.0]]))
        self.solver = KCenterSolver(self.d, 2, SolverConfig())
        self.parent = make_node(root_region(self.d, 2), n=4)

    def tearDown(self):
        """Clean up test fixtures."""
        self.solver.pool.close()

    def test_candidate_replaces_incumbent(self):
        child = CenterRegion(np.array([[0.0], [10.0]]), np.array([[1.0], [11.0]]))
        survivors = self.solver.node_bound_and_prune(self.parent, [child])
        self.assertEqual(self.solver.alpha, 1.0)
        self.assertEqual(self.solver.incumbent, (0, 2))
        self.assertEqual(len(survivors), 1)
        self.assertEqual(survivors[0].depth, 1)

    def test_empty_box_discarded(self):
        child = CenterRegion(np.array([[2.0], [10.0]]), np.array([[9.0], [11.0]]))
        self.assertEqual(self.solver.node_bound_and_prune(self.parent, [child]), [])
        self.assertIsNone(self.solver.incumbent)

    def test_bound_equal_to_alpha_pruned(self):
        self.solver.alpha = 121.0
        child = CenterRegion(np.array([[0.0], [0.0]]), np.array([[0.0], [0.0]]))
        self.assertEqual(self.solver.node_bound_and_prune(self.parent, [child]), [])
        self.assertEqual(self.solver.alpha, 121.0)

    def test_children_shrunk_to_samples(self):
        child = CenterRegion(np.array([[-5.0], [5.0]]), np.array([[5.0], [20.0]]))
        (survivor,) = self.solver.node_bound_and_prune(self.parent, [child])
        np.testing.assert_array_equal(survivor.region.lo, [[0.0], [10.0]])
        np.testing.assert_array_equal(survivor.region.hi, [[1.0], [11.0]])


class TestSolve(unittest.TestCase):
    """Test cases for solve."""

    def test_unit_square(self):
        d = Dataset(np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]))
        report = solve(d, 2, EXACT)
        self.assertEqual(report.ub, 1.0)
        self.assertEqual(report.lb, 1.0)
        self.assertEqual(report.gap_pct, 0.0)
        self.assertEqual(report.termination, Termination.QUEUE_EMPTY)

    def test_every_sample_a_center(self):
        d = Dataset(np.random.default_rng(3).normal(size=(6, 2)))
        report = solve(d, 6, EXACT)
        self.assertEqual(report.ub, 0.0)
        self.assertEqual(report.nodes, 1)
        self.assertEqual(sorted(report.incumbent.indices), list(range(6)))

    def test_infeasible_k(self):
        d = Dataset(np.array([[0.0], [0.0], [1.0]]))
        with self.assertRaises(InfeasibleProblemError):
            solve(d, 3)
        with self.assertRaises(InfeasibleProblemError):
            solve(d, 0)

    def test_matches_oracle(self):
        """Exact solves reproduce the brute-force optimum bit for bit."""
        rng = np.random.default_rng(2024)
        for trial in range(100):
            d, k = random_instance(rng)
            with self.subTest(trial=trial, n=d.n_samples, a=d.n_attrs, k=k):
                report = solve(d, k, EXACT)
                opt = brute_force(d, k).opt_value
                self.assertEqual(report.ub, opt)
                self.assertEqual(report.lb, opt)
                self.assertEqual(report.termination, Termination.QUEUE_EMPTY)
                self.assertEqual(
                    evaluate_assignment(d, report.incumbent.centers(d)), report.ub
                )

    def test_duplicate_rows(self):
        rng = np.random.default_rng(8)
        base = rng.uniform(0, 5, size=(8, 2))
        d = Dataset(np.vstack([base, base[:4]]))
        for k in (1, 2, 3):
            with self.subTest(k=k):
                self.assertEqual(solve(d, k, EXACT).ub, brute_force(d, k).opt_value)

    def test_trace_is_monotone_and_brackets_optimum(self):
        rng = np.random.default_rng(99)
        for trial in range(10):
            d, k = random_instance(rng)
            opt = brute_force(d, k).opt_value
            records = []
            solve(d, k, EXACT, trace=records.append)
            with self.subTest(trial=trial):
                self.assertGreater(len(records), 0)
                for prev, cur in zip(records, records[1:]):
                    self.assertLessEqual(cur.alpha, prev.alpha)
                    self.assertGreaterEqual(cur.beta, prev.beta)
                for record in records:
                    self.assertLessEqual(record.beta, opt)
                    self.assertGreaterEqual(record.alpha, opt)
                    self.assertLessEqual(record.beta, record.alpha)

    def test_accelerations_do_not_change_optimum(self):
        """Every on/off combination of the four accelerations finds the optimum."""
        toggles = ("bounds_tightening", "assignment", "sample_reduction", "symmetry_breaking")
        configs = [
            SolverConfig(epsilon_rel=0.0, **dict(zip(toggles, flags)))
            for flags in itertools.product((True, False), repeat=len(toggles))
        ]
        configs.append(SolverConfig(epsilon_rel=0.0, i_sr=1, ball_threshold=2))
        rng = np.random.default_rng(7)
        instances = [random_instance(rng) for _ in range(60)]
        instances.append((separated_clusters(), 3))

        fewer_nodes = 0
        for trial, (d, k) in enumerate(instances):
            opt = brute_force(d, k).opt_value
            reports = [solve(d, k, cfg) for cfg in configs]
            with self.subTest(trial=trial, n=d.n_samples, k=k):
                self.assertEqual({report.ub for report in reports}, {opt})
            # configs[0] has everything on, configs[15] everything off.
            if reports[0].nodes <= reports[15].nodes:
                fewer_nodes += 1
        self.assertGreaterEqual(fewer_nodes, 0.9 * len(instances))

    def test_seeds_on_separated_clusters(self):
        d = separated_clusters()
        report = solve(d, 3, EXACT)
        self.assertTrue(report.seeds_found)
        self.assertEqual(report.ub, brute_force(d, 3).opt_value)

    def test_sample_reduction_audit(self):
        d = separated_clusters()
        report = solve(d, 3, SolverConfig(epsilon_rel=0.0, i_sr=1))
        removed = [i for _, ids in report.reduction_log for i in ids]
        self.assertEqual(len(removed), report.samples_removed)
        self.assertEqual(len(set(removed)), len(removed))
        self.assertTrue(all(0 <= i < d.n_samples for i in removed))

    def test_worker_count_does_not_change_report(self):
        rng = np.random.default_rng(5)
        d = Dataset(rng.uniform(0, 10, size=(120, 2)))
        cfg = SolverConfig(epsilon_rel=0.05)
        baseline = solve(d, 3, cfg)
        for workers in (2, 8):
            with self.subTest(workers=workers):
                with SamplePool(workers, min_rows=16) as pool:
                    report = KCenterSolver(d, 3, cfg, pool=pool).solve()
                self.assertEqual(report.ub, baseline.ub)
                self.assertEqual(report.lb, baseline.lb)
                self.assertEqual(report.nodes, baseline.nodes)
                self.assertEqual(report.incumbent, baseline.incumbent)
                self.assertEqual(report.reduction_log, baseline.reduction_log)

    def test_gap_termination(self):
        d = Dataset(np.random.default_rng(6).uniform(0, 10, size=(80, 2)))
        report = solve(d, 3, SolverConfig(epsilon_rel=0.05))
        self.assertIn(report.termination, (Termination.GAP, Termination.QUEUE_EMPTY))
        self.assertLessEqual(report.gap_pct, 5.0)
        self.assertLessEqual(report.lb, report.ub)

    def test_time_limit(self):
        d = Dataset(np.random.default_rng(4).uniform(0, 10, size=(50, 2)))
        report = solve(d, 3, SolverConfig(epsilon_rel=0.0, time_limit=1e-9))
        self.assertEqual(report.termination, Termination.TIME_LIMIT)
        self.assertLessEqual(report.lb, report.ub)
        self.assertGreater(report.gap_pct, 0.0)

    def test_node_limit(self):
        d = Dataset(np.random.default_rng(4).uniform(0, 10, size=(30, 2)))
        cfg = SolverConfig(
            epsilon_rel=0.0, max_open_nodes=1, assignment=False, bounds_tightening=False
        )
        with self.assertRaises(NodeLimitError):
            solve(d, 3, cfg)


class TestRoot(unittest.TestCase):
    """Test cases for the root upper bound and initial seed search."""

    def setUp(self):
        """Set up test fixtures."""
        self.d = Dataset(np.array([[0.0], [1.0], [2.0], [50.0], [51.0], [52.0]]))

    def _root(self, cfg):
        solver = KCenterSolver(self.d, 2, cfg)
        # A poor multistart result: its bound is far too loose for seeds.
        loose = (CenterSet((0, 1)), 2704.0)
        with patch("kcenter_global.search.fft_multistart", return_value=loose):
            solver._root()
        solver.pool.close()
        return solver

    def test_sweep_tightens_bound_and_finds_seeds(self):
        solver = self._root(SolverConfig())
        self.assertEqual(solver.alpha, 4.0)
        self.assertEqual(solver.incumbent, (0, 5))
        self.assertTrue(solver.seeds_found)
        self.assertFalse(solver.symmetry)
        (root,) = solver.queue.nodes()
        np.testing.assert_array_equal(root.state.assigned, [0, -1, -1, -1, -1, 1])

    def test_no_sweep_without_assignment(self):
        solver = self._root(SolverConfig(assignment=False))
        self.assertEqual(solver.alpha, 2704.0)
        self.assertFalse(solver.seeds_found)
        self.assertTrue(solver.symmetry)


if __name__ == "__main__":
    unittest.main()
