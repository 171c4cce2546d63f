#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Synthetic datasets and dataset transformations.

:func:`generate_gmm` samples a classification problem from a mixture of
isotropic Gaussians, and :func:`message_passing` pulls each point towards
the mean of its class. Increasing the proportion used by the latter makes
points of the same class more and more interchangeable, which raises the
curvature of the utility functions built on the dataset::

    import valueline.datasets as ds

    pool = ds.generate_gmm(n_per_class=50, classes=3, d=3, separation=3.0, seed=7)
    smoothed = ds.message_passing(pool, proportion=0.5)
    train, valid, test = ds.split_dataset(smoothed, 50, 50, 50, seed=10)
'''

from typing import Tuple

import numpy as np

from valueline.core import Dataset
from valueline.errors import InvalidInputError


def gmm_means(classes: int, d: int, separation: float):
    '''Return the centres of the mixture components, one per row.

    If there are at least as many dimensions as classes, the centres lie on
    the coordinate axes and any two of them are `separation` apart. Otherwise
    they are evenly spaced on a circle in the first two coordinates (on a
    line if `d` is 1), with neighbours `separation` apart.'''

    means = np.zeros((classes, d))
    if d >= classes:
        means[np.arange(classes), np.arange(classes)] = separation / np.sqrt(2.0)
    elif d == 1:
        means[:, 0] = separation * np.arange(classes)
    else:
        angles = 2.0 * np.pi * np.arange(classes) / classes
        radius = separation / (2.0 * np.sin(np.pi / classes))
        means[:, 0] = radius * np.cos(angles)
        means[:, 1] = radius * np.sin(angles)
    return means


def generate_gmm(n_per_class: int, classes: int, d: int, separation: float,
                 seed: int, sigma=1.0) -> Dataset:
    '''Sample `n_per_class` points from each of `classes` Gaussian components.

    Each component has covariance ``sigma² I``; see :func:`gmm_means` for the
    position of the centres. Rows are shuffled, and the same `seed` always
    produces the same dataset.'''

    if n_per_class < 1 or classes < 1 or d < 1:
        raise InvalidInputError('counts and dimensions must be positive')
    if separation < 0.0:
        raise InvalidInputError('separation must not be negative')

    rng = np.random.default_rng(seed)
    means = gmm_means(classes, d, separation)

    labels = np.repeat(np.arange(classes), n_per_class)
    features = means[labels] + sigma * rng.standard_normal((labels.size, d))

    order = rng.permutation(labels.size)
    return Dataset(features[order], labels[order], split_tag='train',
                   num_of_classes=classes)


def message_passing(dataset: Dataset, proportion: float) -> Dataset:
    '''Move each point towards the mean of its class.

    Row ``x_i`` becomes ``(1 - proportion) x_i + proportion m_c``, where
    ``m_c`` is the mean of the rows with the same label. Labels are not
    changed. A proportion of zero returns an identical copy, and a class with
    one member is left untouched.'''

    if not 0.0 <= proportion <= 1.0:
        raise InvalidInputError('proportion must lie in [0, 1] (got {0})'
                                .format(proportion))

    features = dataset.features.copy()
    if proportion == 0.0:
        return dataset.with_features(features)

    for cur_class in np.unique(dataset.labels):
        rows = dataset.labels == cur_class
        class_mean = dataset.features[rows].mean(axis=0)
        features[rows] = (1.0 - proportion) * dataset.features[rows] + \
            proportion * class_mean

    return dataset.with_features(features)


def split_dataset(dataset: Dataset, train: int, valid: int, test: int,
                  seed: int) -> Tuple[Dataset, Dataset, Dataset]:
    '''Split `dataset` into training, validation and test sets.

    Rows are shuffled with a generator seeded by `seed`; the first `train`
    rows go to the training set, the next `valid` to the validation set and
    the following `test` to the test set.'''

    if train < 1 or valid < 1 or test < 0:
        raise InvalidInputError('invalid split sizes ({0}, {1}, {2})'
                                .format(train, valid, test))
    if train + valid + test > len(dataset):
        raise InvalidInputError(
            'split sizes add up to {0}, but the dataset has {1} rows'
            .format(train + valid + test, len(dataset)))

    order = np.random.default_rng(seed).permutation(len(dataset))
    return (dataset.subset(order[:train], split_tag='train'),
            dataset.subset(order[train:train + valid], split_tag='valid'),
            dataset.subset(order[train + valid:train + valid + test], split_tag='test'))
