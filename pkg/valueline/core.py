#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Foundational types and operations.

This module defines the objects shared by all the other modules:

- :class:`SubsetMask`, the encoding of a subset of the training points as the
  bits of an integer;
- :class:`Dataset`, a feature matrix with integer labels;
- :class:`ValueAssignment`, a vector of data values together with the name of
  the method that produced it;
- :class:`SelectionCurve`, the utility of the nested prefixes of a ranking;
- :class:`UtilityFunction`, the interface of every set function U: 2^D → R.

The two central operations are :func:`rank_by_value`, which sorts points in
descending order of value, and :func:`selection_curve`, which evaluates a
utility on the prefixes of a ranking and computes the sequential objective
(the mean utility over all selection sizes)::

    import valueline.core as core
    from valueline.utilities import LinearUtility

    utility = LinearUtility([3.0, 1.0, 2.0])
    perm = core.rank_by_value([3.0, 1.0, 2.0])   # [0, 2, 1]
    curve = core.selection_curve(perm, utility)
    print(curve.utilities, curve.objective)      # [3. 5. 6.] 4.666...

Utility functions can be expensive (e.g., they may train a model), so they
are usually wrapped with :func:`memoize` before being passed to exact
algorithms, which touch every subset.
'''

import logging as log
import threading
from typing import Any, Iterable, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from valueline.errors import (BudgetExceededError, InvalidInputError,
                              ResourceCapError, UtilityEvaluationError)
from valueline.parallel import map_ordered

# Exact algorithms store one real number per subset: 2^24 doubles are 128 MB
DEFAULT_EXACT_CAP = 20
HARD_EXACT_CAP = 24

SPLIT_TAGS = ('train', 'valid', 'test')


class SubsetMask(NamedTuple):
    '''A subset S of the population [0, n), encoded in the bits of an integer.

    Bit ``i`` of `bits` is set if point ``i`` belongs to the subset. Masks
    are ordered by the integer value of `bits`, which gives a deterministic
    iteration order over subsets.'''

    bits: int
    n: int

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> 'SubsetMask':
        bits = 0
        for idx in indices:
            idx = int(idx)
            if idx < 0 or idx >= n:
                raise InvalidInputError(
                    'index {0} out of range for a population of {1} points'
                    .format(idx, n))
            bits |= 1 << idx
        return cls(bits=bits, n=n)

    @classmethod
    def empty(cls, n: int) -> 'SubsetMask':
        return cls(bits=0, n=n)

    @classmethod
    def full(cls, n: int) -> 'SubsetMask':
        return cls(bits=(1 << n) - 1, n=n)

    def validate(self):
        '''Raise an InvalidInputError if bits above ``n`` are set.'''

        if self.n < 0 or self.bits < 0 or (self.bits >> self.n) != 0:
            raise InvalidInputError('mask {0:#x} is not a subset of [0, {1})'
                                    .format(self.bits, self.n))

    def cardinality(self) -> int:
        return bin(self.bits).count('1')

    def has(self, idx: int) -> bool:
        return (self.bits >> idx) & 1 == 1

    def indices(self) -> List[int]:
        return [i for i in range(self.n) if (self.bits >> i) & 1]


def mask_from_indices(indices: Iterable[int]) -> int:
    'Return the integer whose bits are the elements of `indices`'
    bits = 0
    for idx in indices:
        bits |= 1 << int(idx)
    return bits


def popcounts(n: int) -> Any:
    'Return an array with the number of set bits of each integer in [0, 2^n)'
    masks = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for bit in range(n):
        counts += (masks >> bit) & 1
    return counts


def mask_matrix(masks: Any, n: int) -> Any:
    '''Expand integer masks into a boolean matrix.

    Row ``r`` of the result has ``True`` in column ``i`` if bit ``i`` of
    ``masks[r]`` is set.'''
    if n < 63:
        masks = np.asarray(masks, dtype=np.int64).ravel()
        return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)

    # Too wide for int64: fall back to Python integers
    return np.array([[(int(x) >> i) & 1 for i in range(n)] for x in masks],
                    dtype=bool).reshape(-1, n)


class Dataset:
    '''A feature matrix paired with integer class labels.

    Parameters:

    - `features`: matrix with one row per point and at least one column;
    - `labels`: one integer label per row, in ``[0, num_of_classes)``;
    - `split_tag`: one of ``train``, ``valid``, ``test``;
    - `num_of_classes`: number of classes C; when not given, it is set to one
      plus the largest label.

    Objects are not meant to be changed after they have been created.'''

    def __init__(self, features, labels, split_tag='train', num_of_classes=None):
        self.features = np.array(features, dtype=np.float64, ndmin=2)
        self.labels = np.array(labels, dtype=np.int64).ravel()
        self.split_tag = split_tag
        if num_of_classes is None:
            num_of_classes = int(self.labels.max()) + 1 if self.labels.size else 0
        self.num_of_classes = int(num_of_classes)
        self.validate()
        self.features.setflags(write=False)
        self.labels.setflags(write=False)

    def validate(self):
        '''Raise an InvalidInputError if the dataset is malformed.'''

        if self.features.ndim != 2 or self.features.shape[1] < 1:
            raise InvalidInputError('features must be a matrix with at least one column')

        if self.features.shape[0] != self.labels.size:
            raise InvalidInputError(
                'features have {0} rows but there are {1} labels'
                .format(self.features.shape[0], self.labels.size))

        if not np.all(np.isfinite(self.features)):
            raise InvalidInputError('features contain non-finite values')

        if self.labels.size and (self.labels.min() < 0 or
                                 self.labels.max() >= self.num_of_classes):
            raise InvalidInputError('labels must lie in [0, {0})'
                                    .format(self.num_of_classes))

        if self.split_tag not in SPLIT_TAGS:
            raise InvalidInputError('invalid split tag "{0}"'.format(self.split_tag))

    def __len__(self):
        return self.labels.size

    @property
    def num_of_features(self) -> int:
        return self.features.shape[1]

    def subset(self, rows: Sequence[int], split_tag=None) -> 'Dataset':
        'Return a new dataset containing only the rows in `rows`'
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.features[rows], self.labels[rows],
                       split_tag=split_tag or self.split_tag,
                       num_of_classes=self.num_of_classes)

    def with_features(self, features) -> 'Dataset':
        'Return a copy of the dataset with the same labels and new features'
        return Dataset(features, self.labels, split_tag=self.split_tag,
                       num_of_classes=self.num_of_classes)


class ValueAssignment:
    '''Data values v(i), one for each point, and the method that produced them.

    The optional field `stderr` holds the standard error of each value when
    the values come from a Monte Carlo estimator.'''

    def __init__(self, values, method_id: str, stderr=None):
        self.values = np.array(values, dtype=np.float64).ravel()
        self.method_id = method_id
        self.stderr = None if stderr is None else np.array(stderr, dtype=np.float64).ravel()

        if self.values.size < 1:
            raise InvalidInputError('a value assignment needs at least one point')
        if not np.all(np.isfinite(self.values)):
            bad = int(np.flatnonzero(~np.isfinite(self.values))[0])
            raise InvalidInputError('value of point {0} is not finite'.format(bad))
        self.values.setflags(write=False)

    def __len__(self):
        return self.values.size

    def ranking(self) -> Any:
        'Return the permutation induced by the values (see :func:`rank_by_value`)'
        return rank_by_value(self)


class SelectionCurve:
    '''Utility of the nested prefixes S_1 ⊂ S_2 ⊂ ... ⊂ S_n of a ranking.

    `sizes` contains the prefix sizes 1, 2, ..., n and `utilities` the
    corresponding values U(S_k). The field `objective` is the mean of
    `utilities`, i.e., the sequential selection objective.'''

    def __init__(self, utilities):
        self.utilities = np.array(utilities, dtype=np.float64).ravel()
        self.sizes = np.arange(1, self.utilities.size + 1, dtype=np.int64)
        self.objective = float(np.mean(self.utilities))

    def __len__(self):
        return self.utilities.size

    @property
    def points(self):
        return list(zip(self.sizes.tolist(), self.utilities.tolist()))


class UtilityFunction:
    '''A set function U: 2^D → R over a population of `n` points.

    .. note:: This is an abstract base class, and it should not be instantiated.
              Derived classes must implement :meth:`evaluate`.

    Utilities must be deterministic: evaluating the same mask twice, possibly
    from two threads at the same time, must return the same number. The
    class attribute `empty_convention` documents how U(∅) is defined.'''

    empty_convention = 'evaluated'

    def __init__(self, n: int):
        if n < 1:
            raise InvalidInputError('a utility needs at least one point')
        self.n = n

    @property
    def full_bits(self) -> int:
        return (1 << self.n) - 1

    @property
    def empty_value(self) -> float:
        'Value of U(∅)'
        return self.evaluate(0)

    def evaluate(self, bits: int) -> float:
        '''Return U(S), where S is encoded in the bits of the integer `bits`.'''
        raise NotImplementedError()

    def evaluate_many(self, masks: Iterable[int], threads=1) -> Any:
        '''Evaluate the utility on many subsets and return a NumPy array.

        Derived classes can override this method with a vectorized
        implementation.'''
        return np.array(map_ordered(self.evaluate, [int(x) for x in masks], threads),
                        dtype=np.float64)

    def __call__(self, subset: Union[SubsetMask, int, Iterable[int]]) -> float:
        if isinstance(subset, SubsetMask):
            subset.validate()
            if subset.n != self.n:
                raise InvalidInputError(
                    'mask has width {0}, but the utility has {1} points'
                    .format(subset.n, self.n))
            return self.evaluate(subset.bits)

        if isinstance(subset, (int, np.integer)):
            bits = int(subset)
        else:
            bits = SubsetMask.from_indices(subset, self.n).bits

        if bits < 0 or (bits >> self.n) != 0:
            raise InvalidInputError('mask {0:#x} is not a subset of [0, {1})'
                                    .format(bits, self.n))
        return self.evaluate(bits)


class MemoizedUtility(UtilityFunction):
    '''Cache the values of a utility function.

    Each distinct mask is evaluated at most once, even when many threads ask
    for it at the same time: the first thread computes the value while the
    others wait for it. Threads asking for different masks never wait for
    each other.

    If `max_entries` is not ``None``, a request that would make the cache
    grow beyond this size raises a :class:`ResourceCapError`; entries are
    never evicted.

    The field `evaluations` counts how many times the wrapped utility has
    been called.'''

    def __init__(self, utility: UtilityFunction, max_entries=None):
        super().__init__(utility.n)
        self.utility = utility
        self.max_entries = max_entries
        self.empty_convention = utility.empty_convention
        self.evaluations = 0
        self._cache = {}
        self._pending = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._cache)

    def _reserve(self, count: int):
        # Must be called with self._lock held
        if self.max_entries is None:
            return
        if len(self._cache) + len(self._pending) + count > self.max_entries:
            raise ResourceCapError(
                'memoization cache is full ({0} entries)'.format(self.max_entries))

    def _release(self, masks, event):
        with self._lock:
            for cur_mask in masks:
                self._pending.pop(cur_mask, None)
        event.set()

    def evaluate(self, bits: int) -> float:
        while True:
            with self._lock:
                if bits in self._cache:
                    return self._cache[bits]

                event = self._pending.get(bits)
                owner = event is None
                if owner:
                    self._reserve(1)
                    event = threading.Event()
                    self._pending[bits] = event

            if not owner:
                event.wait()
                # Either the value is now cached, or the owner failed and
                # we must try again
                continue

            try:
                value = float(self.utility.evaluate(bits))
            except BaseException:
                self._release([bits], event)
                raise

            with self._lock:
                self._cache[bits] = value
                self.evaluations += 1
            self._release([bits], event)
            return value

    def evaluate_many(self, masks: Iterable[int], threads=1) -> Any:
        masks = [int(x) for x in masks]

        with self._lock:
            missing = sorted({x for x in masks
                              if x not in self._cache and x not in self._pending})
            self._reserve(len(missing))
            event = threading.Event()
            for cur_mask in missing:
                self._pending[cur_mask] = event

        if missing:
            try:
                values = self.utility.evaluate_many(missing, threads=threads)
            except BaseException:
                self._release(missing, event)
                raise

            with self._lock:
                for cur_mask, cur_value in zip(missing, values):
                    self._cache[cur_mask] = float(cur_value)
                self.evaluations += len(missing)
            self._release(missing, event)
            log.debug('memoized %d new subsets (%d in cache)',
                      len(missing), len(self._cache))

        result = np.empty(len(masks), dtype=np.float64)
        for idx, cur_mask in enumerate(masks):
            value = self._cache.get(cur_mask)
            result[idx] = self.evaluate(cur_mask) if value is None else value
        return result


def memoize(utility: UtilityFunction, max_entries=None) -> MemoizedUtility:
    '''Wrap `utility` so that each subset is evaluated at most once.

    See :class:`MemoizedUtility`. Wrapping an object that is already memoized
    returns it unchanged.'''

    if isinstance(utility, MemoizedUtility) and max_entries is None:
        return utility
    return MemoizedUtility(utility, max_entries=max_entries)


class BudgetedUtility(UtilityFunction):
    '''Count the evaluations of a utility and stop at a fixed budget.

    When the number of evaluations would exceed `budget`, a
    :class:`BudgetExceededError` is raised. Put this object *inside* a
    :class:`MemoizedUtility`, so that only distinct subsets are counted.'''

    def __init__(self, utility: UtilityFunction, budget: int):
        super().__init__(utility.n)
        self.utility = utility
        self.budget = budget
        self.empty_convention = utility.empty_convention
        self.used = 0
        self._lock = threading.Lock()

    def _consume(self, count: int):
        with self._lock:
            if self.used + count > self.budget:
                raise BudgetExceededError(
                    'utility budget of {0} evaluations exceeded'.format(self.budget))
            self.used += count

    def evaluate(self, bits: int) -> float:
        self._consume(1)
        return self.utility.evaluate(bits)

    def evaluate_many(self, masks: Iterable[int], threads=1) -> Any:
        masks = list(masks)
        self._consume(len(masks))
        return self.utility.evaluate_many(masks, threads=threads)


class RestrictedUtility(UtilityFunction):
    '''The utility induced by `utility` on the points listed in `indices`.

    Bit ``j`` of a mask passed to this object stands for point
    ``indices[j]`` of the original population.'''

    def __init__(self, utility: UtilityFunction, indices: Sequence[int]):
        super().__init__(len(indices))
        self.utility = utility
        self.indices = [int(x) for x in indices]
        self.empty_convention = utility.empty_convention
        if len(set(self.indices)) != len(self.indices) or \
                min(self.indices) < 0 or max(self.indices) >= utility.n:
            raise InvalidInputError('invalid ground set for a restricted utility')

    def to_global(self, bits: int) -> int:
        result = 0
        for local_idx, global_idx in enumerate(self.indices):
            if (bits >> local_idx) & 1:
                result |= 1 << global_idx
        return result

    def evaluate(self, bits: int) -> float:
        return self.utility.evaluate(self.to_global(bits))

    def evaluate_many(self, masks: Iterable[int], threads=1) -> Any:
        return self.utility.evaluate_many([self.to_global(int(x)) for x in masks],
                                          threads=threads)


def check_exact_cap(n: int, cap: int, what='exact computation'):
    '''Raise a ResourceCapError if `n` points are too many for `what`.'''

    if cap > HARD_EXACT_CAP:
        raise InvalidInputError('the cap for exact algorithms cannot exceed {0}'
                                .format(HARD_EXACT_CAP))
    if n > cap:
        raise ResourceCapError('{0} refuses {1} points (cap is {2})'
                               .format(what, n, cap))


def evaluate_all(utility: UtilityFunction, cap=DEFAULT_EXACT_CAP, threads=1) -> Any:
    '''Return an array with the value of `utility` on every subset.

    Element ``s`` of the result is U(S), where S is the set of bits of
    ``s``. Non-finite values raise a :class:`UtilityEvaluationError` naming the
    first offending mask.'''

    check_exact_cap(utility.n, cap)
    table = np.asarray(utility.evaluate_many(range(1 << utility.n), threads=threads),
                       dtype=np.float64)

    bad = np.flatnonzero(~np.isfinite(table))
    if bad.size:
        raise UtilityEvaluationError(
            'utility is not finite on mask {0:#x}'.format(int(bad[0])),
            mask=int(bad[0]))

    return table


def as_value_array(values: Union[ValueAssignment, Sequence[float]]) -> Any:
    if isinstance(values, ValueAssignment):
        return values.values
    return np.array(values, dtype=np.float64).ravel()


def rank_by_value(values: Union[ValueAssignment, Sequence[float]]) -> Any:
    '''Sort points in descending order of value.

    Return an array `perm` such that ``values[perm[0]] >= values[perm[1]] >=
    ...``. Ties are broken by ascending index, so only the relative order of
    the values matters: any strictly increasing transformation of the values
    gives the same permutation.'''

    values = as_value_array(values)
    if values.size < 1:
        raise InvalidInputError('cannot rank an empty set of values')
    if not np.all(np.isfinite(values)):
        raise InvalidInputError('cannot rank non-finite values')

    # A stable sort of the negated values keeps equal values in index order
    return np.argsort(-values, kind='stable')


def check_permutation(perm: Sequence[int], n: int) -> Any:
    perm = np.asarray(perm, dtype=np.int64).ravel()
    if perm.size != n or not np.array_equal(np.sort(perm), np.arange(n)):
        raise InvalidInputError('sequence is not a permutation of [0, {0})'.format(n))
    return perm


def prefix_masks(perm: Sequence[int]) -> List[int]:
    'Return the masks of the prefixes S_1, ..., S_n of `perm`'
    result = []
    bits = 0
    for idx in perm:
        bits |= 1 << int(idx)
        result.append(bits)
    return result


def selection_curve(perm: Sequence[int], utility: UtilityFunction,
                    threads=1) -> SelectionCurve:
    '''Evaluate `utility` on the nested prefixes of the permutation `perm`.

    Point ``k`` of the curve contains U(S_k), where S_k holds the first `k`
    elements of `perm`. A failure in the utility is re-raised as a
    :class:`UtilityEvaluationError` carrying the prefix size ``k``.'''

    perm = check_permutation(perm, utility.n)
    masks = prefix_masks(perm)

    def evaluate_prefix(k: int) -> float:
        try:
            return utility.evaluate(masks[k - 1])
        except UtilityEvaluationError as exc:
            exc.k = k
            raise
        except Exception as exc:
            raise UtilityEvaluationError(
                'utility failed on the prefix of size {0}: {1}'.format(k, exc),
                k=k, mask=masks[k - 1]) from exc

    utilities = map_ordered(evaluate_prefix, range(1, utility.n + 1), threads)
    return SelectionCurve(utilities)


def values_from_sequence(perm: Sequence[int], method_id: str,
                         stderr: Optional[Sequence[float]] = None) -> ValueAssignment:
    '''Assign value ``n - t`` to the point selected at step ``t`` (1-based).

    The point chosen first gets the highest value ``n - 1`` and the last one
    gets zero.'''

    perm = np.asarray(perm, dtype=np.int64)
    n = perm.size
    values = np.empty(n, dtype=np.float64)
    values[perm] = n - np.arange(1, n + 1)
    return ValueAssignment(values, method_id=method_id, stderr=stderr)
