#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Multinomial logistic regression used inside model-based utilities.

The classifier is trained by full-batch gradient descent starting from
all-zero parameters. The objective is convex, so no random initialization is
needed and training is fully deterministic: the same rows always produce the
same parameters.'''

from typing import Any, NamedTuple

import numpy as np

from valueline.core import Dataset
from valueline.errors import InvalidInputError


class TrainerConfig(NamedTuple):
    'Parameters of the gradient-descent trainer'

    iterations: int = 500
    step_size: float = 0.1
    l2: float = 1e-4


class Standardizer(NamedTuple):
    '''Shift and scale features to zero mean and unit variance.

    Columns with zero variance are only shifted.'''

    mean: Any
    scale: Any

    @classmethod
    def fit(cls, features) -> 'Standardizer':
        features = np.asarray(features, dtype=np.float64)
        mean = features.mean(axis=0)
        scale = features.std(axis=0)
        scale[scale == 0.0] = 1.0
        return cls(mean=mean, scale=scale)

    @classmethod
    def identity(cls, num_of_features: int) -> 'Standardizer':
        return cls(mean=np.zeros(num_of_features), scale=np.ones(num_of_features))

    def transform(self, features) -> Any:
        return (np.asarray(features, dtype=np.float64) - self.mean) / self.scale


class LogisticClassifier(NamedTuple):
    '''Parameters of a trained classifier.

    `weights` is a d×C matrix and `bias` a vector with C elements. Features
    passed to :meth:`predict` are standardized with `standardizer` first.'''

    weights: Any
    bias: Any
    standardizer: Standardizer

    def decision_function(self, features) -> Any:
        return self.standardizer.transform(features) @ self.weights + self.bias

    def predict(self, features) -> Any:
        # np.argmax returns the first maximum, so ties go to the lowest class
        return np.argmax(self.decision_function(features), axis=1)

    def accuracy(self, dataset: Dataset) -> float:
        return float(np.mean(self.predict(dataset.features) == dataset.labels))


def fit_parameters(features, labels, num_of_classes: int, config=TrainerConfig()):
    '''Fit the weights and the bias on already-standardized features.

    Return a pair ``(weights, bias)``. If all labels are equal, the result
    predicts that label for any input.'''

    num_of_rows, num_of_features = features.shape
    if num_of_rows < 1:
        raise InvalidInputError('cannot train a classifier without rows')

    weights = np.zeros((num_of_features, num_of_classes))
    bias = np.zeros(num_of_classes)

    present = np.unique(labels)
    if present.size == 1:
        bias[present[0]] = 1.0
        return weights, bias

    onehot = np.zeros((num_of_rows, num_of_classes))
    onehot[np.arange(num_of_rows), labels] = 1.0

    for _ in range(config.iterations):
        logits = features @ weights + bias
        logits -= logits.max(axis=1, keepdims=True)
        prob = np.exp(logits)
        prob /= prob.sum(axis=1, keepdims=True)

        residual = (prob - onehot) / num_of_rows
        weights -= config.step_size * (features.T @ residual + config.l2 * weights)
        bias -= config.step_size * residual.sum(axis=0)

    return weights, bias


def train_classifier(train_rows: Dataset, config=TrainerConfig(),
                     standardizer=None) -> LogisticClassifier:
    '''Train a multinomial logistic regression on the rows of `train_rows`.

    If `standardizer` is ``None``, features are used as they are. Model
    utilities pass the statistics of the *whole* training split, so that the
    preprocessing does not depend on which rows have been selected.'''

    if standardizer is None:
        standardizer = Standardizer.identity(train_rows.num_of_features)

    weights, bias = fit_parameters(standardizer.transform(train_rows.features),
                                   train_rows.labels,
                                   train_rows.num_of_classes,
                                   config)
    return LogisticClassifier(weights=weights, bias=bias, standardizer=standardizer)
