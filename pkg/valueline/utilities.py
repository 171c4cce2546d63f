#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Concrete utility functions and their properties.

The following utilities are implemented:

- :class:`LinearUtility`: U(S) is the sum of fixed per-point weights;
- :class:`CoverageUtility`: U(S) is the capacitated coverage of a bipartite
  graph linking training points to validation points;
- :class:`ModelUtility`: U(S) is the validation accuracy of a logistic
  regression trained on the rows in S;
- :class:`TabularUtility` and :class:`CallableUtility`, which wrap an
  explicit table of values or a Python function.

Two functions measure how far a utility is from being linear:
:func:`curvature` computes the total curvature c (zero for linear
utilities, one at maximal diminishing returns), while
:func:`check_monotone_submodular` verifies monotonicity and submodularity by
enumerating all subsets.
'''

import logging as log
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from valueline.classifier import Standardizer, TrainerConfig, fit_parameters
from valueline.core import (Dataset, UtilityFunction, check_exact_cap,
                            evaluate_all, mask_matrix)
from valueline.errors import CurvatureUndefinedError, InvalidInputError

MONOTONE_SUBMODULAR_CAP = 12


class LinearUtility(UtilityFunction):
    '''Modular utility U(S) = Σ_{i∈S} w_i.'''

    empty_convention = 'zero'

    def __init__(self, weights: Sequence[float]):
        self.weights = np.array(weights, dtype=np.float64).ravel()
        super().__init__(self.weights.size)
        if not np.all(np.isfinite(self.weights)):
            raise InvalidInputError('linear weights must be finite')

    def evaluate(self, bits: int) -> float:
        return float(self.evaluate_many([bits])[0])

    def evaluate_many(self, masks: Iterable[int], threads=1) -> Any:
        selected = mask_matrix(list(masks), self.n)
        # Accumulate in index order, so that every code path adds the same
        # numbers in the same sequence
        result = np.zeros(selected.shape[0])
        for idx in range(self.n):
            result += np.where(selected[:, idx], self.weights[idx], 0.0)
        return result


class BipartiteGraph:
    '''Weighted bipartite graph from training points to validation points.

    Parameters:

    - `n_train`, `n_valid`: number of vertices on each side;
    - `edges`: iterable of ``(i, j, w)`` triples, linking training point
      ``i`` to validation point ``j`` with weight ``w > 0``;
    - `capacities`: one positive number per validation point (all ones if
      ``None``);
    - `threshold`: distance threshold used to build the graph, if it was
      learned from data.'''

    def __init__(self, n_train: int, n_valid: int, edges=(), capacities=None,
                 threshold=None):
        self.n_train = int(n_train)
        self.n_valid = int(n_valid)
        self.edges = {}  # Type: Dict[Tuple[int, int], float]
        for i, j, weight in edges:
            self.edges[(int(i), int(j))] = float(weight)
        if capacities is None:
            capacities = np.ones(self.n_valid)
        self.capacities = np.array(capacities, dtype=np.float64).ravel()
        self.threshold = None if threshold is None else float(threshold)
        self.validate()

    def validate(self):
        '''Raise an InvalidInputError if the graph is inconsistent.'''

        if self.n_train < 1 or self.n_valid < 1:
            raise InvalidInputError('both sides of the graph must be non-empty')

        if self.capacities.size != self.n_valid:
            raise InvalidInputError('expected {0} capacities, got {1}'
                                    .format(self.n_valid, self.capacities.size))

        if not np.all(self.capacities > 0.0):
            raise InvalidInputError('capacities must be positive')

        for (i, j), weight in self.edges.items():
            if not (0 <= i < self.n_train and 0 <= j < self.n_valid):
                raise InvalidInputError('edge ({0}, {1}) is out of range'.format(i, j))
            if not weight > 0.0:
                raise InvalidInputError('edge ({0}, {1}) has non-positive weight'
                                        .format(i, j))

    @classmethod
    def from_coverage_sets(cls, coverage_sets: Sequence[Iterable[int]],
                           n_valid: int) -> 'BipartiteGraph':
        '''Build a graph with unit weights and capacities.

        Element ``i`` of `coverage_sets` lists the validation points linked to
        training point ``i``.'''

        edges = [(i, j, 1.0) for i, cur_set in enumerate(coverage_sets) for j in cur_set]
        return cls(len(coverage_sets), n_valid, edges)

    @classmethod
    def from_adjacency(cls, adjacency, threshold=None) -> 'BipartiteGraph':
        'Build a graph with unit weights from a boolean n_train×n_valid matrix'
        adjacency = np.asarray(adjacency, dtype=bool)
        rows, cols = np.nonzero(adjacency)
        return cls(adjacency.shape[0], adjacency.shape[1],
                   [(i, j, 1.0) for i, j in zip(rows.tolist(), cols.tolist())],
                   threshold=threshold)

    def weight_matrix(self) -> Any:
        'Return the dense n_train×n_valid matrix of edge weights'
        result = np.zeros((self.n_train, self.n_valid))
        for (i, j), weight in self.edges.items():
            result[i, j] = weight
        return result

    def coverage_sets(self) -> List[List[int]]:
        result = [[] for _ in range(self.n_train)]
        for i, j in sorted(self.edges.keys()):
            result[i].append(j)
        return result

    def to_dict(self) -> Dict[str, Any]:
        return {'n_train': self.n_train,
                'n_valid': self.n_valid,
                'threshold': self.threshold,
                'edges': [[i, j, w] for (i, j), w in sorted(self.edges.items())],
                'capacities': self.capacities.tolist()}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> 'BipartiteGraph':
        try:
            return cls(n_train=d['n_train'], n_valid=d['n_valid'],
                       edges=[tuple(x) for x in d['edges']],
                       capacities=d['capacities'],
                       threshold=d.get('threshold'))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError('malformed bipartite graph: {0}'.format(exc))


class CoverageUtility(UtilityFunction):
    '''Capacitated coverage U(S) = Σ_v min(c_v, Σ_{u∈S} w_uv).

    With unit weights and capacities this is the number of validation points
    linked to at least one point in S.'''

    empty_convention = 'zero'

    def __init__(self, graph: BipartiteGraph):
        super().__init__(graph.n_train)
        self.graph = graph
        self.weights = graph.weight_matrix()
        self.capacities = graph.capacities

    def evaluate(self, bits: int) -> float:
        return float(self.evaluate_many([bits])[0])

    def evaluate_many(self, masks: Iterable[int], threads=1) -> Any:
        selected = mask_matrix(list(masks), self.n)
        load = np.zeros((selected.shape[0], self.graph.n_valid))
        for idx in range(self.n):
            load += selected[:, idx, None] * self.weights[idx]
        return np.minimum(self.capacities, load).sum(axis=1)


class ModelUtility(UtilityFunction):
    '''Validation accuracy of a logistic regression trained on a subset.

    Features of both splits are standardized with the statistics of the whole
    training split, so that U(S) only depends on the rows in S. The empty set
    gets the frequency of the most common label in the validation split
    (majority baseline).'''

    empty_convention = 'majority-baseline'

    def __init__(self, train: Dataset, valid: Dataset, config=TrainerConfig()):
        super().__init__(len(train))
        if len(valid) == 0:
            raise InvalidInputError('the validation split of a model utility is empty')
        if train.num_of_features != valid.num_of_features:
            raise InvalidInputError('training and validation features differ in size')

        self.train = train
        self.valid = valid
        self.config = TrainerConfig(*config)
        self.num_of_classes = max(train.num_of_classes, valid.num_of_classes)
        if self.num_of_classes < 2:
            raise InvalidInputError('model utilities need at least two classes')

        self.standardizer = Standardizer.fit(train.features)
        self._train_x = self.standardizer.transform(train.features)
        self._valid_x = self.standardizer.transform(valid.features)
        counts = np.bincount(valid.labels, minlength=self.num_of_classes)
        self._baseline = float(counts.max() / len(valid))

    def evaluate(self, bits: int) -> float:
        if bits == 0:
            return self._baseline

        rows = mask_matrix([bits], self.n)[0]
        weights, bias = fit_parameters(self._train_x[rows],
                                       self.train.labels[rows],
                                       self.num_of_classes,
                                       self.config)
        predictions = np.argmax(self._valid_x @ weights + bias, axis=1)
        return float(np.mean(predictions == self.valid.labels))


class TabularUtility(UtilityFunction):
    '''Utility defined by an explicit table with 2^n entries.

    Element ``s`` of `table` is the value of the subset whose elements are
    the bits of ``s``.'''

    def __init__(self, table: Sequence[float]):
        self.table = np.array(table, dtype=np.float64).ravel()
        n = int(np.log2(self.table.size)) if self.table.size else 0
        if self.table.size < 2 or (1 << n) != self.table.size:
            raise InvalidInputError('a utility table must have 2^n entries with n ≥ 1')
        super().__init__(n)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> 'TabularUtility':
        'Return a utility whose values are i.i.d. uniform in [0, 1)'
        return cls(rng.random(1 << n))

    def evaluate(self, bits: int) -> float:
        return float(self.table[bits])

    def evaluate_many(self, masks: Iterable[int], threads=1) -> Any:
        return self.table[np.asarray(list(masks), dtype=np.int64)]


class CallableUtility(UtilityFunction):
    '''Utility computed by a Python function.

    The function receives the sorted tuple of indices in the subset and must
    return a number.'''

    def __init__(self, n: int, func: Callable[[Tuple[int, ...]], float]):
        super().__init__(n)
        self.func = func

    def evaluate(self, bits: int) -> float:
        return float(self.func(tuple(i for i in range(self.n) if (bits >> i) & 1)))


class CurvatureReport(NamedTuple):
    '''Result of :func:`curvature`.

    `ratios` contains Δ_i U(D∖{i}) / Δ_i U(∅) for each point (NaN for the
    points listed in `skipped`), `argmin_index` the point with the smallest
    ratio, and `c` the curvature 1 − min ratio.'''

    c: float
    argmin_index: int
    ratios: Any
    skipped: List[int]


def curvature(utility: UtilityFunction, skip_null=False, null_tolerance=1e-12) -> CurvatureReport:
    '''Compute the total curvature of `utility`.

    The curvature is c = 1 − min_i [U(D) − U(D∖{i})] / [U({i}) − U(∅)].
    Subtracting U(∅) makes the result independent of constant offsets. The
    denominator must be positive for every point: if it is not, a
    :class:`CurvatureUndefinedError` naming the point is raised, unless
    `skip_null` is true, in which case points with zero singleton gain are
    ignored and listed in the `skipped` field of the result.'''

    n = utility.n
    full = utility.full_bits
    masks = [0, full] + [1 << i for i in range(n)] + [full & ~(1 << i) for i in range(n)]
    values = np.asarray(utility.evaluate_many(masks), dtype=np.float64)

    empty_value, full_value = values[0], values[1]
    singleton_gains = values[2:2 + n] - empty_value
    last_gains = full_value - values[2 + n:]

    ratios = np.full(n, np.nan)
    skipped = []
    for idx in range(n):
        if singleton_gains[idx] > null_tolerance:
            ratios[idx] = last_gains[idx] / singleton_gains[idx]
        elif skip_null and abs(singleton_gains[idx]) <= null_tolerance:
            skipped.append(idx)
        else:
            raise CurvatureUndefinedError(idx, float(singleton_gains[idx]))

    if len(skipped) == n:
        raise CurvatureUndefinedError(0, float(singleton_gains[0]))
    if skipped:
        log.debug('curvature: %d null points skipped', len(skipped))

    argmin_index = int(np.nanargmin(ratios))
    return CurvatureReport(c=float(1.0 - ratios[argmin_index]),
                           argmin_index=argmin_index,
                           ratios=ratios,
                           skipped=skipped)


class PropertyWitness(NamedTuple):
    '''A violation of monotonicity or submodularity.

    For monotonicity, `small` ⊂ `large` = `small` ∪ {`element`} and
    U(large) < U(small). For submodularity, `small` ⊂ `large`, `element` is
    in neither, and the gain of `element` on `large` exceeds its gain on
    `small`.'''

    property: str
    small: List[int]
    large: List[int]
    element: int


class PropertyReport(NamedTuple):
    monotone: bool
    submodular: bool
    witness: Optional[PropertyWitness]


def _indices(bits: int, n: int) -> List[int]:
    return [i for i in range(n) if (bits >> i) & 1]


def check_monotone_submodular(utility: UtilityFunction, tolerance=1e-9,
                              cap=MONOTONE_SUBMODULAR_CAP) -> PropertyReport:
    '''Verify that `utility` is monotone and submodular, enumerating all subsets.

    Submodularity is checked through the equivalent pairwise condition
    U(S+i) + U(S+j) ≥ U(S+i+j) + U(S) for every S and i, j ∉ S. The first
    violation found (monotonicity first) is returned as a witness.'''

    check_exact_cap(utility.n, cap, 'monotone/submodular check')
    n = utility.n
    table = evaluate_all(utility, cap=cap)
    masks = np.arange(1 << n, dtype=np.int64)

    witnesses = []

    monotone = True
    for i in range(n):
        bit_i = 1 << i
        base = masks[(masks & bit_i) == 0]
        bad = np.flatnonzero(table[base | bit_i] < table[base] - tolerance)
        if bad.size:
            monotone = False
            small = int(base[bad[0]])
            witnesses.append(PropertyWitness('monotone', _indices(small, n),
                                             _indices(small | bit_i, n), i))
            break

    submodular = True
    for i in range(n):
        if not submodular:
            break
        for j in range(n):
            if i == j:
                continue
            bit_i, bit_j = 1 << i, 1 << j
            base = masks[(masks & (bit_i | bit_j)) == 0]
            gain_small = table[base | bit_i] - table[base]
            gain_large = table[base | bit_i | bit_j] - table[base | bit_j]
            bad = np.flatnonzero(gain_large > gain_small + tolerance)
            if bad.size:
                submodular = False
                small = int(base[bad[0]])
                witnesses.append(PropertyWitness('submodular', _indices(small, n),
                                                 _indices(small | bit_j, n), i))
                break

    return PropertyReport(monotone=monotone,
                          submodular=submodular,
                          witness=witnesses[0] if witnesses else None)
