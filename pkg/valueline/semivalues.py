#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Semi-value data values.

A semi-value assigns to point i the weighted sum of its marginal
contributions,

    v(i) = Σ_{S ⊆ D∖{i}} β_{|S|} [U(S ∪ {i}) − U(S)],

where the weights only depend on the size of S and satisfy
Σ_s C(n−1, s) β_s = 1. Four schemes are supported, identified by a short
string (see :func:`parse_scheme`):

- ``shapley``: β_s = s! (n−s−1)! / n!;
- ``beta:α,β``: Beta Shapley, β_s = B(s+β, n−1−s+α) / B(α, β); ``beta:1,1``
  is the same as ``shapley``;
- ``banzhaf``: β_s = 2^{−(n−1)};
- ``loo``: leave-one-out, v(i) = U(D) − U(D∖{i}).

Values can be computed exactly (:func:`exact_semivalue`, which enumerates
all the subsets) or estimated by Monte Carlo sampling
(:func:`mc_semivalue`)::

    from valueline.semivalues import exact_semivalue, mc_semivalue, parse_scheme

    scheme = parse_scheme('beta:16,1')
    exact = exact_semivalue(utility, scheme)
    approx = mc_semivalue(utility, scheme, num_of_samples=1000, seed=42)
    print(approx.values, approx.stderr)
'''

import logging as log
import re
from typing import Any, NamedTuple

import numpy as np
from scipy.special import betaln, comb

from valueline.core import (UtilityFunction, ValueAssignment, check_exact_cap,
                            evaluate_all, popcounts, prefix_masks,
                            rank_by_value)
from valueline.dp import brute_force_opt_k
from valueline.errors import InvalidInputError
from valueline.parallel import block_rngs, block_sizes, map_ordered

EXACT_SEMIVALUE_CAP = 14
SAMPLES_PER_BLOCK = 64

SCHEME_KINDS = ('shapley', 'beta', 'banzhaf', 'loo')


class SemiValueScheme(NamedTuple):
    '''Kind of semi-value, with the two parameters of Beta Shapley.

    The parameters `alpha` and `beta` are ignored unless `kind` is
    ``beta``.'''

    kind: str
    alpha: float = 1.0
    beta: float = 1.0

    @property
    def id(self) -> str:
        if self.kind == 'beta':
            return 'beta:{0:g},{1:g}'.format(self.alpha, self.beta)
        return self.kind

    def validate(self):
        if self.kind not in SCHEME_KINDS:
            raise InvalidInputError('unknown semi-value "{0}"'.format(self.kind))
        if self.kind == 'beta' and not (self.alpha > 0.0 and self.beta > 0.0):
            raise InvalidInputError('Beta Shapley parameters must be positive')


SCHEME_RE = re.compile(r'^beta:\s*([^,\s]+)\s*,\s*([^,\s]+)\s*$')


def parse_scheme(text: str) -> SemiValueScheme:
    '''Parse strings like ``shapley``, ``banzhaf``, ``loo`` or ``beta:16,1``.'''

    text = text.strip().lower()
    if text in ('shapley', 'banzhaf', 'loo'):
        return SemiValueScheme(text)

    match = SCHEME_RE.match(text)
    if not match:
        raise InvalidInputError('invalid semi-value "{0}"'.format(text))

    try:
        scheme = SemiValueScheme('beta', float(match.group(1)), float(match.group(2)))
    except ValueError:
        raise InvalidInputError('invalid Beta Shapley parameters in "{0}"'.format(text))

    scheme.validate()
    return scheme


def scheme_weight(scheme: SemiValueScheme, s: int, n: int) -> float:
    '''Return the weight β_s given to subsets of size `s` in a population of `n`.'''

    scheme.validate()
    if n < 1 or not 0 <= s <= n - 1:
        raise InvalidInputError('subset size {0} out of range for n = {1}'.format(s, n))

    if scheme.kind == 'shapley':
        return 1.0 / (n * comb(n - 1, s, exact=True))
    elif scheme.kind == 'beta':
        return float(np.exp(betaln(s + scheme.beta, n - 1 - s + scheme.alpha) -
                            betaln(scheme.alpha, scheme.beta)))
    elif scheme.kind == 'banzhaf':
        return 2.0 ** (-(n - 1))
    else:
        return 1.0 if s == n - 1 else 0.0


def scheme_weights(scheme: SemiValueScheme, n: int) -> Any:
    'Return the array of weights β_0, ..., β_{n-1}'
    return np.array([scheme_weight(scheme, s, n) for s in range(n)])


def marginal_weights(scheme: SemiValueScheme, n: int) -> Any:
    '''Weights n·β_s·C(n−1, s) that turn a marginal measured at position s of a
    uniformly random permutation into an unbiased estimate.'''

    sizes = np.arange(n)
    return n * scheme_weights(scheme, n) * comb(n - 1, sizes)


def loo(utility: UtilityFunction, threads=1) -> ValueAssignment:
    '''Leave-one-out values v(i) = U(D) − U(D∖{i}), using n + 1 evaluations.'''

    full = utility.full_bits
    masks = [full] + [full & ~(1 << i) for i in range(utility.n)]
    values = np.asarray(utility.evaluate_many(masks, threads=threads), dtype=np.float64)
    return ValueAssignment(values[0] - values[1:], method_id='loo')


def exact_semivalue(utility: UtilityFunction, scheme: SemiValueScheme,
                    cap=EXACT_SEMIVALUE_CAP, threads=1) -> ValueAssignment:
    '''Compute a semi-value by enumerating all the subsets.

    The utility is evaluated on all 2^n subsets once, then the n·2^{n−1}
    marginal contributions are combined with the weights of `scheme`.'''

    scheme.validate()
    if scheme.kind == 'loo':
        return loo(utility, threads=threads)

    n = utility.n
    check_exact_cap(n, cap, 'exact semi-value')
    table = evaluate_all(utility, cap=cap, threads=threads)

    masks = np.arange(1 << n, dtype=np.int64)
    # the full set has no marginal, its weight is never read
    weights = np.append(scheme_weights(scheme, n), 0.0)[popcounts(n)]

    values = np.empty(n)
    for idx in range(n):
        bit = np.int64(1) << idx
        without = masks[(masks & bit) == 0]
        values[idx] = np.sum(weights[without] * (table[without | bit] - table[without]))

    return ValueAssignment(values, method_id=scheme.id)


def _permutation_block(utility: UtilityFunction, scheme_factors, num_of_samples: int,
                       rng: np.random.Generator):
    n = utility.n
    perms = [rng.permutation(n) for _ in range(num_of_samples)]
    masks = []
    for cur_perm in perms:
        masks.append(0)
        masks.extend(prefix_masks(cur_perm))

    utilities = np.asarray(utility.evaluate_many(masks), dtype=np.float64)
    utilities = utilities.reshape(num_of_samples, n + 1)

    sums = np.zeros(n)
    squares = np.zeros(n)
    for cur_perm, cur_utilities in zip(perms, utilities):
        samples = scheme_factors * np.diff(cur_utilities)
        sums[cur_perm] += samples
        squares[cur_perm] += samples ** 2

    return sums, squares


def _subset_block(utility: UtilityFunction, num_of_samples: int,
                  rng: np.random.Generator):
    n = utility.n
    membership = rng.random((num_of_samples, n)) < 0.5
    masks = []
    for row in membership:
        base = sum(1 << int(i) for i in np.flatnonzero(row))
        masks.append(base)
        masks.extend(base ^ (1 << i) for i in range(n))

    utilities = np.asarray(utility.evaluate_many(masks), dtype=np.float64)
    utilities = utilities.reshape(num_of_samples, n + 1)

    # For each point, the marginal is U(S ∪ {i}) − U(S ∖ {i}), whichever of the
    # two sets was drawn
    sign = np.where(membership, 1.0, -1.0)
    samples = sign * (utilities[:, :1] - utilities[:, 1:])

    sums = np.zeros(n)
    squares = np.zeros(n)
    for row in samples:
        sums += row
        squares += row ** 2

    return sums, squares


def mc_semivalue(utility: UtilityFunction, scheme: SemiValueScheme,
                 num_of_samples: int, seed: int, threads=1,
                 block_size=SAMPLES_PER_BLOCK) -> ValueAssignment:
    '''Estimate a semi-value by Monte Carlo sampling.

    Shapley and Beta Shapley values are estimated from `num_of_samples`
    random permutations: every permutation gives one marginal contribution
    for each point, weighted by n·β_s·C(n−1, s). Banzhaf values are
    estimated from `num_of_samples` uniformly random subsets S: each of them
    gives U(S ∪ {i}) − U(S ∖ {i}) for every i. Leave-one-out values are
    always computed exactly.

    Samples are drawn in blocks of `block_size`, each with its own random
    stream derived from `seed`, and the blocks are combined in a fixed
    order: the result only depends on `seed`, not on `threads`. The field
    `stderr` of the result contains the standard error of each estimate.'''

    scheme.validate()
    if scheme.kind == 'loo':
        return loo(utility, threads=threads)

    if num_of_samples < 1:
        raise InvalidInputError('the number of samples must be positive')

    n = utility.n
    sizes = block_sizes(num_of_samples, block_size)
    rngs = block_rngs(seed, len(sizes))

    if scheme.kind == 'banzhaf':
        def run_block(block_idx):
            return _subset_block(utility, sizes[block_idx], rngs[block_idx])
    else:
        factors = marginal_weights(scheme, n)

        def run_block(block_idx):
            return _permutation_block(utility, factors, sizes[block_idx], rngs[block_idx])

    log.info('estimating %s values for %d points with %d samples',
             scheme.id, n, num_of_samples)

    sums = np.zeros(n)
    squares = np.zeros(n)
    for block_sums, block_squares in map_ordered(run_block, range(len(sizes)), threads):
        sums += block_sums
        squares += block_squares

    mean = sums / num_of_samples
    if num_of_samples > 1:
        variance = np.maximum(squares - num_of_samples * mean ** 2, 0.0) / (num_of_samples - 1)
        stderr = np.sqrt(variance / num_of_samples)
    else:
        stderr = np.zeros(n)

    return ValueAssignment(mean, method_id=scheme.id, stderr=stderr)


class CurvatureBoundReport(NamedTuple):
    '''Comparison between a value-based ranking and the optimal subsets.

    - `factor` is (1 − c)²;
    - `selected[k-1]` is U(G_k), the utility of the first `k` points of the
      ranking, and `optimal[k-1]` is U(OPT_k);
    - `per_k` tells whether U(G_k) ≥ factor·U(OPT_k) − tolerance for each k,
      and `summed` whether the same holds for the sums over k;
    - `per_point` tells whether v(i) ≥ (1 − c)·[U({i}) − U(∅)] − tolerance.'''

    c: float
    factor: float
    selected: Any
    optimal: Any
    per_k: Any
    summed: bool
    per_point: Any

    @property
    def holds(self) -> bool:
        return bool(np.all(self.per_k) and self.summed)


def curvature_bound_report(utility: UtilityFunction, values: ValueAssignment,
                           c: float, tolerance=1e-9) -> CurvatureBoundReport:
    '''Check how close the ranking induced by `values` gets to the best subsets.

    For monotone submodular utilities with curvature `c`, selecting points in
    order of semi-value guarantees U(G_k) ≥ (1 − c)²·U(OPT_k) for every k.
    OPT_k is found by enumeration, so this only works on small populations.'''

    n = utility.n
    table = evaluate_all(utility)
    factor = (1.0 - c) ** 2

    perm = rank_by_value(values)
    selected = table[prefix_masks(perm)]
    optimal = np.array([brute_force_opt_k(utility, k, table=table).value
                        for k in range(1, n + 1)])

    singleton_gains = table[[1 << i for i in range(n)]] - table[0]
    return CurvatureBoundReport(
        c=c,
        factor=factor,
        selected=selected,
        optimal=optimal,
        per_k=selected >= factor * optimal - tolerance,
        summed=bool(np.sum(selected) >= factor * np.sum(optimal) - tolerance),
        per_point=np.asarray(values.values) >= (1.0 - c) * singleton_gains - tolerance)
