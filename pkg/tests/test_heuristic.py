"""Tests for Farthest First Traversal."""

import unittest

import numpy as np

from kcenter_global.bounds import evaluate_assignment
from kcenter_global.dataset import Dataset
from kcenter_global.exceptions import InfeasibleProblemError
from kcenter_global.heuristic import (
    CenterSet,
    fft,
    fft_multistart,
    fft_starts,
    fft_traversals,
)
from kcenter_global.oracle import brute_force
from kcenter_global.parallel import SamplePool

UNIT_SQUARE = Dataset(np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]))


class TestFft(unittest.TestCase):
    """Test cases for fft."""

    def test_line_example(self):
        d = Dataset(np.array([[0.0], [1.0], [10.0]]))
        self.assertEqual(fft(d, 2, 0), CenterSet((0, 2)))

    def test_unit_square_from_corner(self):
        centers = fft(UNIT_SQUARE, 2, 0)
        self.assertEqual(centers.indices, (0, 3))
        self.assertEqual(evaluate_assignment(UNIT_SQUARE, centers.centers(UNIT_SQUARE)), 1.0)

    def test_duplicates_are_not_repeated(self):
        d = Dataset(np.array([[0.0], [0.0], [0.0], [5.0]]))
        centers = fft(d, 3, 0)
        self.assertEqual(len(set(centers.indices)), 3)
        self.assertEqual(centers.indices, (0, 3, 1))

    def test_k_equals_samples(self):
        centers = fft(UNIT_SQUARE, 4, 2)
        self.assertEqual(sorted(centers.indices), [0, 1, 2, 3])

    def test_invalid_arguments(self):
        with self.assertRaises(InfeasibleProblemError):
            fft(UNIT_SQUARE, 5, 0)
        with self.assertRaises(InfeasibleProblemError):
            fft(UNIT_SQUARE, 0, 0)
        with self.assertRaises(InfeasibleProblemError):
            fft(UNIT_SQUARE, 2, 4)

    def test_within_factor_four_of_optimum(self):
        """Every start gives at most 4x the optimal squared objective."""
        rng = np.random.default_rng(21)
        for trial in range(15):
            n = int(rng.integers(8, 16))
            d = Dataset(rng.uniform(-5, 5, size=(n, int(rng.integers(1, 4)))))
            k = int(rng.integers(1, 4))
            opt = brute_force(d, k).opt_value
            for start in range(n):
                with self.subTest(trial=trial, start=start):
                    value = evaluate_assignment(d, fft(d, k, start).centers(d))
                    self.assertLessEqual(value, 4.0 * opt * (1 + 1e-12))

    def test_pool_does_not_change_result(self):
        d = Dataset(np.random.default_rng(1).normal(size=(1500, 3)))
        with SamplePool(3, min_rows=100) as pool:
            self.assertEqual(fft(d, 4, 17, pool), fft(d, 4, 17))


class TestFftMultistart(unittest.TestCase):
    """Test cases for fft_multistart."""

    def test_unit_square(self):
        centers, value = fft_multistart(UNIT_SQUARE, 2, trials=10, seed=0)
        self.assertEqual(value, 1.0)
        self.assertEqual(len(centers), 2)

    def test_deterministic_and_monotone_in_trials(self):
        d = Dataset(np.random.default_rng(4).normal(size=(60, 2)))
        first = fft_multistart(d, 3, trials=5, seed=9)
        self.assertEqual(first, fft_multistart(d, 3, trials=5, seed=9))
        more = fft_multistart(d, 3, trials=20, seed=9)
        self.assertLessEqual(more[1], first[1])

    def test_value_matches_centers(self):
        d = Dataset(np.random.default_rng(6).normal(size=(40, 3)))
        centers, value = fft_multistart(d, 4, trials=3, seed=2)
        self.assertEqual(value, evaluate_assignment(d, centers.centers(d)))

    def test_needs_a_trial(self):
        with self.assertRaises(InfeasibleProblemError):
            fft_multistart(UNIT_SQUARE, 2, trials=0, seed=0)


class TestFftSweep(unittest.TestCase):
    """Test cases for fft_starts and fft_traversals."""

    def test_every_sample_when_few(self):
        np.testing.assert_array_equal(fft_starts(4, 200, seed=0), [0, 1, 2, 3])

    def test_distinct_sorted_subset(self):
        starts = fft_starts(1000, 50, seed=3)
        self.assertEqual(len(set(starts.tolist())), 50)
        self.assertEqual(starts.tolist(), sorted(starts.tolist()))
        np.testing.assert_array_equal(starts, fft_starts(1000, 50, seed=3))

    def test_needs_a_start(self):
        with self.assertRaises(InfeasibleProblemError):
            fft_starts(10, 0, seed=0)

    def test_traversals_in_start_order(self):
        sweep = fft_traversals(UNIT_SQUARE, 2, [3, 0])
        self.assertEqual([centers for centers, _ in sweep], [fft(UNIT_SQUARE, 2, 3), fft(UNIT_SQUARE, 2, 0)])
        self.assertEqual([value for _, value in sweep], [1.0, 1.0])


if __name__ == "__main__":
    unittest.main()
