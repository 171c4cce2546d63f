#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Optimal sequential selection by dynamic programming.

Selecting training points one at a time is a deterministic decision process
whose states are the subsets already selected. :func:`solve_dp` solves it
exactly with a backward pass over the subset lattice,

    V(D) = U(D),    V(s) = U(s) + max_{a ∉ s} V(s ∪ {a}),

followed by a forward pass that walks the optimal policy from the empty set
and gives value ``n - t`` to the point selected at step ``t``::

    from valueline.dp import solve_dp
    from valueline.utilities import LinearUtility

    solution = solve_dp(LinearUtility([3.0, 1.0, 2.0]))
    print(solution.optimal_perm)              # [0 2 1]
    print(solution.optimal_values.values)     # [2. 0. 1.]

The cost is 2^n evaluations of the utility and 2^n numbers in memory, so
populations are capped (see :data:`valueline.core.DEFAULT_EXACT_CAP`).

The two functions :func:`brute_force_best_sequence` and
:func:`brute_force_opt_k` enumerate permutations and fixed-size subsets
respectively. They are meant to check the other algorithms on very small
problems.'''

import itertools
import logging as log
from typing import Any, Dict, List, NamedTuple, Optional

import numpy as np
from scipy.special import comb

from valueline.core import (DEFAULT_EXACT_CAP, UtilityFunction, ValueAssignment,
                            check_exact_cap, evaluate_all, popcounts,
                            values_from_sequence)
from valueline.errors import BudgetExceededError, InvalidInputError, ResourceCapError

BRUTE_FORCE_PERMUTATION_CAP = 9
BRUTE_FORCE_SUBSET_BUDGET = 1000000


class DpSolution(NamedTuple):
    '''Result of :func:`solve_dp`.

    - `optimal_perm`: the order in which the optimal policy selects points;
    - `value_table_root`: V(∅), which includes U(∅);
    - `optimal_values`: v*(i) = n − t*(i), where t*(i) is the (1-based)
      step at which point i is selected;
    - `objective`: mean utility of the prefixes of `optimal_perm`.'''

    optimal_perm: Any
    value_table_root: float
    optimal_values: ValueAssignment
    objective: float

    def to_dict(self) -> Dict[str, Any]:
        return {'perm': self.optimal_perm.tolist(),
                'optimal_values': self.optimal_values.values.tolist(),
                'objective': self.objective,
                'value_table_root': self.value_table_root}


def sequence_objective(table, perm) -> float:
    '''Mean of ``table[S_k]`` over the prefixes S_1, ..., S_n of `perm`.

    Terms are added in prefix order.'''

    total = 0.0
    bits = 0
    for idx in perm:
        bits |= 1 << int(idx)
        total += float(table[bits])
    return total / len(perm)


def backward_pass(table) -> Any:
    '''Return the optimal value function V over all the subsets.

    `table` holds U(S) for every mask S. States are processed in layers of
    decreasing cardinality; within a layer every state is independent, so
    each layer is a handful of vectorized operations.'''

    num_of_masks = table.size
    n = num_of_masks.bit_length() - 1
    counts = popcounts(n)
    order = np.argsort(counts, kind='stable')
    layer_bounds = np.searchsorted(counts[order], np.arange(n + 2))

    values = np.array(table, dtype=np.float64)
    for layer in range(n - 1, -1, -1):
        states = order[layer_bounds[layer]:layer_bounds[layer + 1]]
        best = np.full(states.size, -np.inf)
        for action in range(n):
            bit = np.int64(1) << action
            free = (states & bit) == 0
            candidate = np.where(free, values[states | bit], -np.inf)
            # Strict comparison: the smallest action wins ties
            np.copyto(best, candidate, where=candidate > best)

        values[states] = table[states] + best
        log.debug('DP layer %d done (%d states)', layer, states.size)

    return values


def forward_pass(values) -> Any:
    '''Follow the greedy policy on `values` starting from the empty set.'''

    n = values.size.bit_length() - 1
    perm = []
    state = 0
    for _ in range(n):
        free = [a for a in range(n) if not (state >> a) & 1]
        candidates = values[[state | (1 << a) for a in free]]
        # np.argmax returns the first maximum, i.e., the smallest action
        action = free[int(np.argmax(candidates))]
        perm.append(action)
        state |= 1 << action

    return np.array(perm, dtype=np.int64)


def solve_dp(utility: UtilityFunction, cap=DEFAULT_EXACT_CAP, threads=1) -> DpSolution:
    '''Compute the optimal selection sequence of `utility` and the DP values.

    Every subset is evaluated once (in parallel if `threads` > 1); wrap
    expensive utilities with :func:`valueline.core.memoize` if they are shared
    with other algorithms. Ties between actions go to the smallest index, so
    e.g. a symmetric utility produces the identity permutation.'''

    check_exact_cap(utility.n, cap, 'dynamic programming')
    log.info('solving the selection problem exactly for %d points', utility.n)

    table = evaluate_all(utility, cap=cap, threads=threads)
    values = backward_pass(table)
    perm = forward_pass(values)

    return DpSolution(optimal_perm=perm,
                      value_table_root=float(values[0]),
                      optimal_values=values_from_sequence(perm, method_id='dp'),
                      objective=sequence_objective(table, perm))


class BestSequence(NamedTuple):
    perm: Any
    objective: float


def brute_force_best_sequence(utility: UtilityFunction,
                              cap=BRUTE_FORCE_PERMUTATION_CAP) -> BestSequence:
    '''Find the permutation with the highest mean prefix utility by trying them all.

    Permutations are enumerated in lexicographic order and the first one
    attaining the maximum is returned.'''

    n = utility.n
    if n > cap:
        raise ResourceCapError('brute-force search refuses {0} points (cap is {1})'
                               .format(n, cap))

    table = evaluate_all(utility, cap=n)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    prefixes = np.cumsum(np.int64(1) << perms, axis=1)

    totals = np.zeros(perms.shape[0])
    for k in range(n):
        totals += table[prefixes[:, k]]

    best = int(np.argmax(totals))
    return BestSequence(perm=perms[best], objective=float(totals[best]) / n)


class OptimalSubset(NamedTuple):
    indices: List[int]
    bits: int
    value: float


def brute_force_opt_k(utility: UtilityFunction, k: int,
                      budget=BRUTE_FORCE_SUBSET_BUDGET,
                      table: Optional[Any] = None) -> OptimalSubset:
    '''Return the subset of size `k` with the highest utility.

    Ties go to the subset with the smallest mask. If `table` is given, it must
    contain U on every mask (see :func:`valueline.core.evaluate_all`) and no
    further evaluations are made.'''

    n = utility.n
    if not 0 <= k <= n:
        raise InvalidInputError('subset size {0} out of range [0, {1}]'.format(k, n))
    check_exact_cap(n, DEFAULT_EXACT_CAP, 'subset enumeration')

    num_of_subsets = int(comb(n, k, exact=True))
    if num_of_subsets > budget:
        raise BudgetExceededError('{0} subsets of size {1} exceed the budget of {2}'
                                  .format(num_of_subsets, k, budget))

    masks = np.flatnonzero(popcounts(n) == k)
    if table is None:
        values = np.asarray(utility.evaluate_many(masks.tolist()), dtype=np.float64)
    else:
        values = np.asarray(table)[masks]

    best = int(np.argmax(values))
    bits = int(masks[best])
    return OptimalSubset(indices=[i for i in range(n) if (bits >> i) & 1],
                         bits=bits,
                         value=float(values[best]))
