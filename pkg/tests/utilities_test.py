#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

import unittest as ut

import numpy as np

import valueline.utilities as ut_mod
from valueline.core import Dataset, SubsetMask, memoize
from valueline.errors import CurvatureUndefinedError, InvalidInputError

COVERAGE_SETS = [[1, 2, 3], [3, 4], [4]]


def glove_game():
    'U(S) = min(#{0} ∩ S, #{1, 2} ∩ S)'
    return ut_mod.CallableUtility(
        3, lambda idx: min(int(0 in idx), sum(1 for i in idx if i in (1, 2))))


def random_graph(rng, n_train, n_valid, weighted=False):
    adjacency = rng.random((n_train, n_valid)) < 0.4
    edges = []
    for i, j in zip(*np.nonzero(adjacency)):
        weight = float(rng.integers(1, 4)) if weighted else 1.0
        edges.append((int(i), int(j), weight))
    capacities = rng.integers(1, 4, size=n_valid).astype(float) if weighted else None
    return ut_mod.BipartiteGraph(n_train, n_valid, edges, capacities)


class TestLinearUtility(ut.TestCase):
    def test_evaluate(self):
        utility = ut_mod.LinearUtility([3.0, 1.0, 2.0])
        self.assertEqual(utility(SubsetMask.from_indices([0, 2], 3)), 5.0)
        self.assertEqual(utility(0), 0.0)
        self.assertEqual(utility.empty_value, 0.0)
        self.assertTrue(np.allclose(utility.evaluate_many([1, 2, 7]), [3.0, 1.0, 6.0]))

    def test_invalid(self):
        with self.assertRaises(InvalidInputError):
            ut_mod.LinearUtility([1.0, np.nan])
        with self.assertRaises(InvalidInputError):
            ut_mod.LinearUtility([])


class TestCoverageUtility(ut.TestCase):
    def test_unit(self):
        graph = ut_mod.BipartiteGraph.from_coverage_sets(COVERAGE_SETS, n_valid=5)
        utility = ut_mod.CoverageUtility(graph)
        self.assertEqual(utility([0, 1]), 4.0)
        self.assertEqual(utility([0, 1, 2]), 4.0)
        self.assertEqual(utility([2]), 1.0)
        self.assertEqual(utility([]), 0.0)

    def test_capacities(self):
        graph = ut_mod.BipartiteGraph(2, 1, [(0, 0, 2.0), (1, 0, 2.0)], capacities=[3.0])
        utility = ut_mod.CoverageUtility(graph)
        self.assertEqual(utility([0]), 2.0)
        self.assertEqual(utility([0, 1]), 3.0)

    def test_invalid_graph(self):
        with self.assertRaises(InvalidInputError):
            ut_mod.BipartiteGraph(2, 2, [(0, 2, 1.0)])
        with self.assertRaises(InvalidInputError):
            ut_mod.BipartiteGraph(2, 2, [(0, 1, 0.0)])
        with self.assertRaises(InvalidInputError):
            ut_mod.BipartiteGraph(2, 2, [], capacities=[1.0, -1.0])

    def test_dict(self):
        graph = random_graph(np.random.default_rng(3), 5, 7, weighted=True)
        copy = ut_mod.BipartiteGraph.from_dict(graph.to_dict())
        self.assertTrue(np.array_equal(graph.weight_matrix(), copy.weight_matrix()))
        self.assertTrue(np.array_equal(graph.capacities, copy.capacities))

        with self.assertRaises(InvalidInputError):
            ut_mod.BipartiteGraph.from_dict({'n_train': 2})

    def test_monotone_submodular(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            n_train = int(rng.integers(1, 7))
            graph = random_graph(rng, n_train, int(rng.integers(1, 6)), weighted=True)
            report = ut_mod.check_monotone_submodular(ut_mod.CoverageUtility(graph))
            self.assertTrue(report.monotone and report.submodular,
                            'witness: {0}'.format(report.witness))
            self.assertIsNone(report.witness)


class TestPropertyCheck(ut.TestCase):
    def test_supermodular(self):
        utility = ut_mod.CallableUtility(3, lambda idx: float(len(idx) ** 2))
        report = ut_mod.check_monotone_submodular(utility)
        self.assertTrue(report.monotone)
        self.assertFalse(report.submodular)
        self.assertEqual(report.witness.property, 'submodular')

        # The witness must really violate diminishing returns
        small = SubsetMask.from_indices(report.witness.small, 3).bits
        large = SubsetMask.from_indices(report.witness.large, 3).bits
        bit = 1 << report.witness.element
        self.assertEqual(small & ~large, 0)
        self.assertGreater(utility(large | bit) - utility(large),
                           utility(small | bit) - utility(small))

    def test_not_monotone(self):
        utility = ut_mod.LinearUtility([1.0, -1.0, 2.0])
        report = ut_mod.check_monotone_submodular(utility)
        self.assertFalse(report.monotone)
        self.assertTrue(report.submodular)
        self.assertEqual(report.witness.element, 1)


class TestCurvature(ut.TestCase):
    def test_linear(self):
        report = ut_mod.curvature(ut_mod.LinearUtility([3.0, 1.0, 2.0]))
        self.assertAlmostEqual(report.c, 0.0)

    def test_offset(self):
        table = np.array([5.0, 6.0, 7.0, 7.5])
        report = ut_mod.curvature(ut_mod.TabularUtility(table))
        # ratios are 0.5 / 1 and 1.5 / 2
        self.assertAlmostEqual(report.c, 0.5)
        self.assertEqual(report.argmin_index, 0)

    def test_coverage(self):
        graph = ut_mod.BipartiteGraph.from_coverage_sets(COVERAGE_SETS, n_valid=5)
        report = ut_mod.curvature(ut_mod.CoverageUtility(graph))
        # Points 1 and 2 add nothing once the others are in, point 0 adds
        # {1, 2} to the full set against {1, 2, 3} on its own
        self.assertAlmostEqual(report.c, 1.0)
        self.assertEqual(report.argmin_index, 1)
        self.assertAlmostEqual(report.ratios[0], 2.0 / 3.0)
        self.assertTrue(np.allclose(report.ratios, [2.0 / 3.0, 0.0, 0.0]))

    def test_undefined(self):
        graph = ut_mod.BipartiteGraph.from_coverage_sets([[0], []], n_valid=1)
        with self.assertRaises(CurvatureUndefinedError) as context:
            ut_mod.curvature(ut_mod.CoverageUtility(graph))
        self.assertEqual(context.exception.index, 1)

        report = ut_mod.curvature(ut_mod.CoverageUtility(graph), skip_null=True)
        self.assertEqual(report.skipped, [1])
        self.assertAlmostEqual(report.c, 0.0)
        self.assertTrue(np.isnan(report.ratios[1]))


class TestModelUtility(ut.TestCase):
    def setUp(self):
        rng = np.random.default_rng(5)
        labels = np.array([0] * 10 + [1] * 10)
        features = rng.standard_normal((20, 2)) * 0.3 + np.where(labels[:, None] == 1, 3.0, -3.0)
        self.train = Dataset(features[::2], labels[::2])
        self.valid = Dataset(features[1::2], labels[1::2], split_tag='valid')

    def test_values(self):
        utility = ut_mod.ModelUtility(self.train, self.valid)
        self.assertEqual(utility.empty_convention, 'majority-baseline')
        self.assertAlmostEqual(utility(0), 0.5)
        self.assertAlmostEqual(utility(utility.full_bits), 1.0)

        # Training on one class predicts that class everywhere
        first = int(np.flatnonzero(self.train.labels == 0)[0])
        self.assertAlmostEqual(utility([first]), 0.5)

    def test_deterministic(self):
        utility = ut_mod.ModelUtility(self.train, self.valid)
        masks = list(range(1, 64))
        self.assertTrue(np.array_equal(utility.evaluate_many(masks),
                                       memoize(utility).evaluate_many(masks, threads=4)))

    def test_invalid(self):
        with self.assertRaises(InvalidInputError):
            ut_mod.ModelUtility(self.train, self.valid.subset([]))

        single = Dataset(self.train.features, np.zeros(len(self.train), dtype=int))
        with self.assertRaises(InvalidInputError):
            ut_mod.ModelUtility(single, single.subset([0, 1], split_tag='valid'))


class TestTabularUtility(ut.TestCase):
    def test_table(self):
        utility = ut_mod.TabularUtility([0.0, 1.0, 2.0, 4.0])
        self.assertEqual(utility.n, 2)
        self.assertEqual(utility([0, 1]), 4.0)

        with self.assertRaises(InvalidInputError):
            ut_mod.TabularUtility([0.0, 1.0, 2.0])

    def test_glove(self):
        utility = glove_game()
        self.assertEqual(utility([0, 1]), 1.0)
        self.assertEqual(utility([1, 2]), 0.0)


if __name__ == '__main__':
    ut.main()
