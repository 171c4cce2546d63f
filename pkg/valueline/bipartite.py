#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Bipartite coverage graphs and greedy selection.

Here the utility of a set of training points is approximated by the number
of validation points they "cover". A training point covers a validation
point when the two have the same label and lie within a distance threshold
τ. The threshold is chosen by :func:`learn_graph`, which compares the
coverage ratio of random subsets with the accuracy a model trained on them
reaches on the validation set, and keeps the τ where the two agree best.

Once the graph is known, :func:`greedy_select` orders the training points
by repeatedly taking the one that covers the most validation points not
covered yet::

    from valueline.bipartite import greedy_select, learn_graph

    graph, report = learn_graph(train, valid, seed=42)
    print('chosen threshold:', report.chosen)
    selection = greedy_select(graph)
    print(selection.perm, selection.gains)
'''

import heapq
import logging as log
from typing import Any, NamedTuple, Optional

import numpy as np
from scipy.spatial.distance import cdist

from valueline.core import (Dataset, SubsetMask, UtilityFunction, ValueAssignment,
                            mask_matrix, selection_curve, values_from_sequence)
from valueline.dp import brute_force_best_sequence
from valueline.errors import InvalidInputError
from valueline.utilities import BipartiteGraph, CoverageUtility, ModelUtility

DEFAULT_NUM_OF_SUBSETS = 50
DEFAULT_NUM_OF_THRESHOLDS = 20


def default_subset_size(n_train: int) -> int:
    return (n_train + 1) // 2


def pairwise_distances(train: Dataset, valid: Dataset) -> Any:
    '''Return the matrix of Euclidean distances between training and validation points.'''

    if train.num_of_features != valid.num_of_features:
        raise InvalidInputError(
            'training points have {0} features, validation points have {1}'
            .format(train.num_of_features, valid.num_of_features))
    return cdist(train.features, valid.features, metric='euclidean')


def edges_at(distances, train_labels, valid_labels, threshold: float) -> Any:
    '''Return the boolean adjacency matrix of the graph at `threshold`.

    Training point i is linked to validation point j if their distance is
    not larger than `threshold` and their labels are the same.'''

    same_label = np.asarray(train_labels)[:, None] == np.asarray(valid_labels)[None, :]
    return (np.asarray(distances) <= threshold) & same_label


def _covered_fraction(adjacency, rows) -> float:
    if not len(rows):
        return 0.0
    return float(np.mean(adjacency[rows].any(axis=0)))


def coverage_ratio(graph: BipartiteGraph, subset) -> float:
    '''Fraction of validation points linked to at least one point of `subset`.

    `subset` can be a :class:`SubsetMask`, an integer mask or a list of
    training indices.'''

    if isinstance(subset, SubsetMask):
        subset.validate()
        bits = subset.bits
    elif isinstance(subset, (int, np.integer)):
        bits = int(subset)
    else:
        bits = SubsetMask.from_indices(subset, graph.n_train).bits

    rows = np.flatnonzero(mask_matrix([bits], graph.n_train)[0])
    return _covered_fraction(graph.weight_matrix() > 0.0, rows)


class ThresholdSweepReport(NamedTuple):
    '''Result of the threshold search in :func:`learn_graph`.

    `errors[t]` is the mean absolute difference between coverage ratio and
    accuracy at `thresholds[t]`; `chosen` is the threshold with the smallest
    error (the smallest one, in case of ties).'''

    thresholds: Any
    errors: Any
    chosen: float


def learn_graph(train: Dataset, valid: Dataset,
                utility: Optional[UtilityFunction] = None,
                num_of_subsets=DEFAULT_NUM_OF_SUBSETS,
                num_of_thresholds=DEFAULT_NUM_OF_THRESHOLDS,
                subset_size=None, seed=0, threads=1):
    '''Learn the coverage graph linking `train` to `valid`.

    Parameters:

    - `utility`: accuracy of a model trained on a subset of `train`; by
      default a :class:`valueline.utilities.ModelUtility` on `valid`;
    - `num_of_subsets`: number K of random subsets used to score thresholds;
    - `num_of_thresholds`: number of thresholds, evenly spaced between the
      smallest and the largest distance;
    - `subset_size`: size of the random subsets (half the training set if
      ``None``);
    - `seed`: seed for drawing the subsets.

    Return a pair ``(graph, report)``, where `graph` is a
    :class:`BipartiteGraph` with unit weights and capacities and `report` a
    :class:`ThresholdSweepReport`.'''

    n = len(train)
    if subset_size is None:
        subset_size = default_subset_size(n)
    if num_of_subsets < 1:
        raise InvalidInputError('at least one random subset is needed')
    if num_of_thresholds < 2:
        raise InvalidInputError('at least two thresholds are needed')
    if not 1 <= subset_size <= n:
        raise InvalidInputError('subset size must lie in [1, {0}] (got {1})'
                                .format(n, subset_size))
    if utility is None:
        utility = ModelUtility(train, valid)

    distances = pairwise_distances(train, valid)
    min_dist, max_dist = float(distances.min()), float(distances.max())
    if min_dist == max_dist:
        thresholds = np.array([min_dist])
    else:
        thresholds = np.linspace(min_dist, max_dist, num_of_thresholds)

    rng = np.random.default_rng(seed)
    subsets = [np.sort(rng.choice(n, size=subset_size, replace=False))
               for _ in range(num_of_subsets)]
    masks = [sum(1 << int(i) for i in rows) for rows in subsets]
    accuracies = np.asarray(utility.evaluate_many(masks, threads=threads), dtype=np.float64)

    errors = np.empty(thresholds.size)
    for idx, cur_threshold in enumerate(thresholds):
        adjacency = edges_at(distances, train.labels, valid.labels, cur_threshold)
        ratios = np.array([_covered_fraction(adjacency, rows) for rows in subsets])
        errors[idx] = np.mean(np.abs(ratios - accuracies))
        log.debug('threshold %g: error %g', cur_threshold, errors[idx])

    # np.argmin returns the first minimum, i.e., the smallest threshold
    best = int(np.argmin(errors))
    chosen = float(thresholds[best])
    log.info('chosen threshold %g (error %g)', chosen, errors[best])

    graph = BipartiteGraph.from_adjacency(
        edges_at(distances, train.labels, valid.labels, chosen), threshold=chosen)
    return graph, ThresholdSweepReport(thresholds=thresholds, errors=errors, chosen=chosen)


class GreedySelection(NamedTuple):
    '''Result of :func:`greedy_select`.

    `gains[t]` is the coverage gained when `perm[t]` was selected, and
    `values` gives v(i) = n − step(i).'''

    perm: Any
    gains: Any
    values: ValueAssignment


class _CoverageState:
    'Residual coverage of the validation points during a greedy run'

    def __init__(self, graph: BipartiteGraph):
        self.weights = graph.weight_matrix()
        self.capacities = graph.capacities
        self.load = np.zeros(graph.n_valid)

    def gain(self, idx: int) -> float:
        return float(np.sum(np.minimum(self.capacities, self.load + self.weights[idx]) -
                            np.minimum(self.capacities, self.load)))

    def add(self, idx: int):
        self.load += self.weights[idx]


def _naive_greedy(graph: BipartiteGraph):
    state = _CoverageState(graph)
    remaining = list(range(graph.n_train))
    perm, gains = [], []
    while remaining:
        cur_gains = [state.gain(idx) for idx in remaining]
        best = int(np.argmax(cur_gains))
        idx = remaining.pop(best)
        perm.append(idx)
        gains.append(cur_gains[best])
        state.add(idx)

    return perm, gains


def _lazy_greedy(graph: BipartiteGraph):
    state = _CoverageState(graph)
    # Entries are (-upper bound on the gain, index, step of the last update)
    upper_bounds = [(-state.gain(idx), idx, 0) for idx in range(graph.n_train)]
    heapq.heapify(upper_bounds)

    perm, gains = [], []
    step = 0
    while upper_bounds:
        neg_gain, idx, updated_at = heapq.heappop(upper_bounds)
        if updated_at == step:
            perm.append(idx)
            gains.append(-neg_gain)
            state.add(idx)
            step += 1
        else:
            heapq.heappush(upper_bounds, (-state.gain(idx), idx, step))

    return perm, gains


def greedy_select(graph: BipartiteGraph, lazy=True) -> GreedySelection:
    '''Order training points by decreasing marginal coverage.

    At each step the point with the largest coverage gain is selected, ties
    going to the smallest index; once no point adds coverage, the remaining
    ones follow in ascending index order. With `lazy` set, gains are kept in
    a priority queue and recomputed only when they reach its top, which
    returns the same sequence as the plain algorithm since coverage gains can
    only shrink.'''

    perm, gains = _lazy_greedy(graph) if lazy else _naive_greedy(graph)
    perm = np.array(perm, dtype=np.int64)
    return GreedySelection(perm=perm,
                           gains=np.array(gains),
                           values=values_from_sequence(perm, method_id='bipartite'))


class GreedyOptimalityReport(NamedTuple):
    greedy_objective: float
    best_objective: float
    optimal: bool
    greedy_perm: Any
    best_perm: Any


def check_greedy_optimality(graph: BipartiteGraph, tolerance=1e-9) -> GreedyOptimalityReport:
    '''Compare the greedy sequence with the best sequence found by brute force.

    The objective is the mean coverage over all prefixes. When greedy falls
    short, the report holds the better permutation as a counterexample.'''

    utility = CoverageUtility(graph)
    selection = greedy_select(graph)
    greedy_objective = selection_curve(selection.perm, utility).objective
    best = brute_force_best_sequence(utility)

    optimal = greedy_objective >= best.objective - tolerance
    if not optimal:
        log.warning('greedy is not optimal: objective %g < %g (best sequence %s)',
                    greedy_objective, best.objective, best.perm.tolist())

    return GreedyOptimalityReport(greedy_objective=greedy_objective,
                                  best_objective=best.objective,
                                  optimal=bool(optimal),
                                  greedy_perm=selection.perm,
                                  best_perm=best.perm)
