#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

import unittest as ut

import numpy as np

import valueline.bipartite as bp
from valueline.core import Dataset, selection_curve
from valueline.dp import brute_force_opt_k
from valueline.errors import InvalidInputError
from valueline.utilities import BipartiteGraph, CallableUtility, CoverageUtility

CLUSTER = np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]])
VALID_CLUSTER = np.array([[0.25, 0.25], [0.1, 0.4], [0.4, 0.1], [0.3, 0.3]])


def two_clusters():
    train = Dataset(np.vstack([CLUSTER, CLUSTER + 10.0]), [0] * 4 + [1] * 4)
    valid = Dataset(np.vstack([VALID_CLUSTER, VALID_CLUSTER + 10.0]), [0] * 4 + [1] * 4,
                    split_tag='valid')
    return train, valid


def random_graph(rng, n_train, n_valid, weighted):
    adjacency = rng.random((n_train, n_valid)) < 0.3
    rows, cols = np.nonzero(adjacency)
    if weighted:
        edges = [(i, j, float(rng.integers(1, 4))) for i, j in zip(rows, cols)]
        capacities = rng.integers(1, 5, size=n_valid).astype(float)
    else:
        edges = [(i, j, 1.0) for i, j in zip(rows, cols)]
        capacities = None
    return BipartiteGraph(n_train, n_valid, edges, capacities)


class TestDistances(ut.TestCase):
    def test_distances(self):
        train = Dataset([[0.0, 0.0], [1.0, 1.0]], [0, 1])
        valid = Dataset([[3.0, 4.0]], [0], split_tag='valid')
        distances = bp.pairwise_distances(train, valid)
        self.assertEqual(distances.shape, (2, 1))
        self.assertAlmostEqual(distances[0, 0], 5.0)

        symmetric = bp.pairwise_distances(train, train)
        self.assertTrue(np.allclose(symmetric, symmetric.T))
        self.assertTrue(np.allclose(np.diag(symmetric), 0.0))

        with self.assertRaises(InvalidInputError):
            bp.pairwise_distances(train, Dataset([[0.0]], [0]))

    def test_edges(self):
        distances = np.array([[1.0, 2.0], [3.0, 0.5]])
        adjacency = bp.edges_at(distances, [0, 1], [0, 0], threshold=2.0)
        self.assertTrue(np.array_equal(adjacency, [[True, True], [False, False]]))


class TestCoverageRatio(ut.TestCase):
    def test_ratio(self):
        graph = BipartiteGraph.from_coverage_sets([[0, 1, 2], [3], []], n_valid=5)
        self.assertEqual(bp.coverage_ratio(graph, []), 0.0)
        self.assertAlmostEqual(bp.coverage_ratio(graph, [0]), 0.6)
        self.assertAlmostEqual(bp.coverage_ratio(graph, 0b011), 0.8)

        complete = BipartiteGraph.from_adjacency(np.ones((2, 3), dtype=bool))
        self.assertEqual(bp.coverage_ratio(complete, [0, 1]), 1.0)


class TestGreedy(ut.TestCase):
    def test_example(self):
        graph = BipartiteGraph.from_coverage_sets([[0, 1, 2], [2, 3], [1]], n_valid=4)
        for lazy in (True, False):
            selection = bp.greedy_select(graph, lazy=lazy)
            self.assertTrue(np.array_equal(selection.perm, [0, 1, 2]))
            self.assertTrue(np.array_equal(selection.gains, [3.0, 1.0, 0.0]))
            self.assertTrue(np.array_equal(selection.values.values, [2.0, 1.0, 0.0]))

    def test_duplicates(self):
        graph = BipartiteGraph.from_coverage_sets([[0, 1], [0, 1], [2]], n_valid=3)
        selection = bp.greedy_select(graph)
        self.assertTrue(np.array_equal(selection.perm, [0, 2, 1]))
        self.assertTrue(np.array_equal(selection.gains, [2.0, 1.0, 0.0]))

    def test_no_edges(self):
        selection = bp.greedy_select(BipartiteGraph(4, 2, []))
        self.assertTrue(np.array_equal(selection.perm, np.arange(4)))
        self.assertTrue(np.all(selection.gains == 0.0))

    def test_lazy_is_naive(self):
        rng = np.random.default_rng(123)
        for trial in range(200):
            graph = random_graph(rng, int(rng.integers(1, 12)), int(rng.integers(1, 15)),
                                 weighted=bool(trial % 2))
            lazy = bp.greedy_select(graph, lazy=True)
            naive = bp.greedy_select(graph, lazy=False)
            self.assertTrue(np.array_equal(lazy.perm, naive.perm))
            self.assertTrue(np.array_equal(lazy.gains, naive.gains))

    def test_prefix_sums(self):
        rng = np.random.default_rng(8)
        graph = random_graph(rng, 9, 12, weighted=True)
        utility = CoverageUtility(graph)
        selection = bp.greedy_select(graph)
        curve = selection_curve(selection.perm, utility)
        self.assertTrue(np.allclose(np.cumsum(selection.gains), curve.utilities))

    def test_approximation(self):
        rng = np.random.default_rng(2718)
        factor = 1.0 - 1.0 / np.e
        for _ in range(100):
            graph = random_graph(rng, 8, 10, weighted=False)
            utility = CoverageUtility(graph)
            curve = selection_curve(bp.greedy_select(graph).perm, utility)
            for k in range(1, 9):
                best = brute_force_opt_k(utility, k).value
                self.assertGreaterEqual(curve.utilities[k - 1], factor * best - 1e-9)

    def test_optimality_report(self):
        graph = BipartiteGraph.from_coverage_sets([[0, 1, 2], [2, 3], [1]], n_valid=4)
        report = bp.check_greedy_optimality(graph)
        self.assertTrue(report.optimal)
        self.assertAlmostEqual(report.greedy_objective, 11.0 / 3.0)
        self.assertAlmostEqual(report.best_objective, 11.0 / 3.0)

        # Same instances as test_approximation; greedy may lose to the best
        # sequence, only the report is checked
        rng = np.random.default_rng(2718)
        for _ in range(100):
            report = bp.check_greedy_optimality(random_graph(rng, 8, 10, weighted=False))
            self.assertLessEqual(report.greedy_objective, report.best_objective + 1e-9)
            self.assertEqual(report.optimal,
                             report.greedy_objective >= report.best_objective - 1e-9)
            if not report.optimal:
                self.assertEqual(sorted(report.best_perm), list(range(8)))


class TestLearnGraph(ut.TestCase):
    def test_two_clusters(self):
        train, valid = two_clusters()
        graph, report = bp.learn_graph(train, valid, num_of_subsets=20, seed=3)
        self.assertEqual(report.thresholds.size, bp.DEFAULT_NUM_OF_THRESHOLDS)
        self.assertLess(report.chosen, 10.0)
        self.assertEqual(graph.threshold, report.chosen)
        self.assertAlmostEqual(bp.coverage_ratio(graph, list(range(8))), 1.0)

        # Points of different classes are never linked
        weights = graph.weight_matrix()
        self.assertTrue(np.all(weights[:4, 4:] == 0.0))
        self.assertTrue(np.all(weights[4:, :4] == 0.0))

    def test_extreme_utilities(self):
        train, valid = two_clusters()
        train = Dataset(train.features, np.zeros(8, dtype=int))
        valid = Dataset(valid.features, np.zeros(8, dtype=int), split_tag='valid')

        _, report = bp.learn_graph(train, valid, CallableUtility(8, lambda idx: 0.0),
                                   num_of_subsets=10, seed=1)
        self.assertEqual(report.chosen, report.thresholds[0])

        _, report = bp.learn_graph(train, valid, CallableUtility(8, lambda idx: 1.0),
                                   num_of_subsets=10, seed=1)
        self.assertEqual(report.errors[-1], 0.0)
        self.assertEqual(report.errors[list(report.thresholds).index(report.chosen)], 0.0)

    def test_equal_distances(self):
        train = Dataset([[0.0]], [0])
        valid = Dataset([[1.0], [-1.0]], [0, 0], split_tag='valid')
        graph, report = bp.learn_graph(train, valid, CallableUtility(1, lambda idx: 1.0),
                                       num_of_subsets=3)
        self.assertEqual(report.thresholds.size, 1)
        self.assertEqual(report.chosen, 1.0)
        self.assertEqual(graph.coverage_sets(), [[0, 1]])

    def test_deterministic(self):
        train, valid = two_clusters()
        first = bp.learn_graph(train, valid, num_of_subsets=10, seed=5)
        second = bp.learn_graph(train, valid, num_of_subsets=10, seed=5, threads=2)
        self.assertEqual(first[0].to_dict(), second[0].to_dict())
        self.assertTrue(np.array_equal(first[1].errors, second[1].errors))

    def test_invalid(self):
        train, valid = two_clusters()
        with self.assertRaises(InvalidInputError):
            bp.learn_graph(train, valid, num_of_thresholds=1)
        with self.assertRaises(InvalidInputError):
            bp.learn_graph(train, valid, subset_size=9)
        with self.assertRaises(InvalidInputError):
            bp.learn_graph(train, valid, num_of_subsets=0)


if __name__ == '__main__':
    ut.main()
