#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

import unittest as ut

import numpy as np

from valueline.classifier import Standardizer, TrainerConfig, train_classifier
from valueline.core import Dataset
from valueline.datasets import generate_gmm, gmm_means, message_passing, split_dataset
from valueline.errors import InvalidInputError


class TestGmm(ut.TestCase):
    def test_means(self):
        means = gmm_means(classes=3, d=4, separation=2.0)
        self.assertEqual(means.shape, (3, 4))
        for i in range(3):
            for j in range(i + 1, 3):
                self.assertAlmostEqual(np.linalg.norm(means[i] - means[j]), 2.0)

        # fewer dimensions than classes
        for d in (1, 2):
            means = gmm_means(classes=5, d=d, separation=1.5)
            self.assertEqual(means.shape, (5, d))
            distances = [np.linalg.norm(means[i] - means[j])
                         for i in range(5) for j in range(i + 1, 5)]
            self.assertAlmostEqual(min(distances), 1.5)

        dataset = generate_gmm(n_per_class=4, classes=3, d=2, separation=3.0, seed=1)
        self.assertEqual(dataset.features.shape, (12, 2))

    def test_generate(self):
        dataset = generate_gmm(n_per_class=20, classes=3, d=3, separation=3.0, seed=42)
        self.assertEqual(len(dataset), 60)
        self.assertEqual(dataset.num_of_classes, 3)
        self.assertTrue(np.array_equal(np.bincount(dataset.labels), [20, 20, 20]))

        again = generate_gmm(n_per_class=20, classes=3, d=3, separation=3.0, seed=42)
        self.assertTrue(np.array_equal(dataset.features, again.features))
        self.assertTrue(np.array_equal(dataset.labels, again.labels))

        other = generate_gmm(n_per_class=20, classes=3, d=3, separation=3.0, seed=43)
        self.assertFalse(np.array_equal(dataset.features, other.features))


class TestMessagePassing(ut.TestCase):
    def setUp(self):
        self.dataset = Dataset([[0.0, 0.0], [2.0, 0.0], [10.0, 10.0]], [0, 0, 1])

    def test_proportions(self):
        unchanged = message_passing(self.dataset, 0.0)
        self.assertTrue(np.array_equal(unchanged.features, self.dataset.features))

        half = message_passing(self.dataset, 0.5)
        self.assertTrue(np.allclose(half.features, [[0.5, 0.0], [1.5, 0.0], [10.0, 10.0]]))
        self.assertTrue(np.array_equal(half.labels, self.dataset.labels))

        collapsed = message_passing(self.dataset, 1.0)
        self.assertTrue(np.allclose(collapsed.features[:2], [[1.0, 0.0], [1.0, 0.0]]))

    def test_invalid(self):
        with self.assertRaises(InvalidInputError):
            message_passing(self.dataset, 1.5)


class TestSplit(ut.TestCase):
    def test_split(self):
        dataset = generate_gmm(n_per_class=10, classes=2, d=2, separation=2.0, seed=1)
        train, valid, test = split_dataset(dataset, 5, 6, 7, seed=3)
        self.assertEqual((len(train), len(valid), len(test)), (5, 6, 7))
        self.assertEqual((train.split_tag, valid.split_tag, test.split_tag),
                         ('train', 'valid', 'test'))

        # No row is used twice
        rows = np.vstack([train.features, valid.features, test.features])
        self.assertEqual(np.unique(rows, axis=0).shape[0], 18)

        again = split_dataset(dataset, 5, 6, 7, seed=3)[0]
        self.assertTrue(np.array_equal(train.features, again.features))

        with self.assertRaises(InvalidInputError):
            split_dataset(dataset, 10, 10, 1, seed=3)
        with self.assertRaises(InvalidInputError):
            split_dataset(dataset, 0, 10, 1, seed=3)


class TestClassifier(ut.TestCase):
    def test_separable(self):
        dataset = generate_gmm(n_per_class=30, classes=2, d=2, separation=8.0,
                               seed=7, sigma=0.5)
        classifier = train_classifier(dataset, standardizer=Standardizer.fit(dataset.features))
        self.assertGreater(classifier.accuracy(dataset), 0.95)

        # Training is deterministic
        again = train_classifier(dataset, standardizer=Standardizer.fit(dataset.features))
        self.assertTrue(np.array_equal(classifier.weights, again.weights))

    def test_single_label(self):
        dataset = Dataset([[0.0], [1.0]], [1, 1], num_of_classes=3)
        classifier = train_classifier(dataset, TrainerConfig(iterations=10))
        self.assertTrue(np.array_equal(classifier.predict([[-5.0], [5.0]]), [1, 1]))

    def test_standardizer(self):
        standardizer = Standardizer.fit([[1.0, 5.0], [3.0, 5.0]])
        self.assertTrue(np.allclose(standardizer.transform([[1.0, 5.0], [3.0, 6.0]]),
                                    [[-1.0, 0.0], [1.0, 1.0]]))


if __name__ == '__main__':
    ut.main()
