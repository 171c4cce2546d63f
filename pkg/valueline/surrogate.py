#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Linear surrogates of a utility and the myopic selection policy.

A linear surrogate approximates U with the modular function
Û(S) = U(∅) + Σ_{i∈S} θ_i. The coefficients are fitted by weighted least
squares over the proper non-empty subsets, subject to the constraint
Σθ = U(D) − U(∅). The weight of a subset only depends on its size and is
given by a *kernel*:

- ``shapley``: (n−1) / (C(n,s)·s·(n−s)); with this kernel θ is exactly the
  vector of Shapley values;
- ``binomial``: 1 / C(n−1, s−1);
- ``banzhaf``: 2^{−s};
- ``beta:α,β``: the Beta Shapley weight of subsets of size s.

Under a linear surrogate, the greedy (myopic) choice at every step is the
point with the largest θ, so the whole selection sequence is the ranking of
the points by θ::

    from valueline.surrogate import fit_wls, myopic_sequence

    surrogate = fit_wls(utility, kernel='shapley')
    perm = myopic_sequence(surrogate)
'''

import logging as log
from typing import Any, Dict, NamedTuple

import numpy as np
import scipy.linalg
from scipy.special import comb

from valueline.core import (UtilityFunction, ValueAssignment, as_value_array,
                            check_exact_cap, evaluate_all, mask_matrix,
                            rank_by_value)
from valueline.errors import InvalidInputError, NumericalError
from valueline.semivalues import parse_scheme, scheme_weight

EXHAUSTIVE_FIT_CAP = 14
RIDGE = 1e-10
SURROGATE_MODES = ('exhaustive', 'sampled')


def kernel_weights(kernel: str, n: int) -> Any:
    '''Return the weight of subsets of each size 0, 1, ..., n.

    Only the weights of sizes 1 to n−1 are meaningful; the other two are
    zero.'''

    result = np.zeros(n + 1)
    if n < 2:
        return result

    sizes = np.arange(1, n)
    if kernel == 'shapley':
        result[sizes] = (n - 1) / (comb(n, sizes) * sizes * (n - sizes))
    elif kernel == 'binomial':
        result[sizes] = 1.0 / comb(n - 1, sizes - 1)
    elif kernel == 'banzhaf':
        result[sizes] = 2.0 ** (-sizes)
    elif kernel.startswith('beta:'):
        scheme = parse_scheme(kernel)
        result[sizes] = [scheme_weight(scheme, int(s), n) for s in sizes]
    else:
        raise InvalidInputError('unknown surrogate kernel "{0}"'.format(kernel))

    return result


class LinearSurrogate(NamedTuple):
    '''Coefficients θ of a fitted linear surrogate.

    `residual` is the weighted sum of squared errors reached by the fit
    (in sampled mode, the plain sum over the sampled subsets).'''

    theta: Any
    kernel_id: str
    residual: float
    empty_value: float = 0.0

    def predict(self, bits: int) -> float:
        'Return Û(S) for the subset encoded in `bits`'
        selected = mask_matrix([bits], self.theta.size)[0]
        return self.empty_value + float(np.sum(self.theta[selected]))

    def gain(self, bits: int, action: int) -> float:
        'Return Û(S ∪ {a}) − Û(S), which is θ_a unless `action` is already in S'
        if (bits >> action) & 1:
            return 0.0
        return float(self.theta[action])

    def values(self) -> ValueAssignment:
        return ValueAssignment(self.theta, method_id='wls:' + self.kernel_id)

    def to_dict(self) -> Dict[str, Any]:
        return {'theta': self.theta.tolist(),
                'kernel': self.kernel_id,
                'residual': self.residual}


def constrained_lstsq(design, targets, weights, total: float):
    '''Solve min Σ_r w_r (y_r − x_r·θ)² subject to Σθ = total.

    The constraint is removed by writing θ = total/n·1 + Nφ, where the columns
    of N span the vectors orthogonal to 1. The reduced normal equations get a
    ridge of :data:`RIDGE` on the diagonal.'''

    num_of_rows, n = design.shape
    offset = np.full(n, total / n)
    if n == 1:
        return offset

    basis = scipy.linalg.null_space(np.ones((1, n)))
    reduced = design @ basis
    rhs = targets - design @ offset

    weighted = reduced * weights[:, None]
    matrix = reduced.T @ weighted + RIDGE * np.eye(n - 1)
    vector = weighted.T @ rhs

    try:
        phi = scipy.linalg.solve(matrix, vector, assume_a='sym')
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(
            'singular least-squares system (condition number {0:.3g}): {1}'
            .format(np.linalg.cond(matrix), exc))

    theta = offset + basis @ phi
    if not np.all(np.isfinite(theta)):
        raise NumericalError('least-squares fit produced non-finite coefficients '
                             '(condition number {0:.3g})'.format(np.linalg.cond(matrix)))
    return theta


def _sample_masks(kernel_masses, n: int, num_of_samples: int, seed: int):
    rng = np.random.default_rng(seed)
    probabilities = kernel_masses[1:n] / np.sum(kernel_masses[1:n])
    sizes = rng.choice(np.arange(1, n), size=num_of_samples, p=probabilities)

    masks = []
    for cur_size in sizes:
        members = rng.choice(n, size=int(cur_size), replace=False)
        masks.append(sum(1 << int(i) for i in members))
    return masks


def fit_wls(utility: UtilityFunction, kernel='shapley', mode='exhaustive',
            num_of_samples=None, seed=None, cap=EXHAUSTIVE_FIT_CAP,
            threads=1) -> LinearSurrogate:
    '''Fit a linear surrogate to `utility`.

    In ``exhaustive`` mode all the 2^n − 2 proper non-empty subsets enter the
    fit with their kernel weight. In ``sampled`` mode, `num_of_samples`
    subsets are drawn (using `seed`) with sizes distributed proportionally to
    the total kernel mass C(n, s)·w(s), and they enter an unweighted fit.
    In both cases the targets are U(S) − U(∅) and the coefficients satisfy
    Σθ = U(D) − U(∅).'''

    if mode not in SURROGATE_MODES:
        raise InvalidInputError('unknown fit mode "{0}"'.format(mode))

    n = utility.n
    weights_by_size = kernel_weights(kernel, n)
    empty_value, full_value = utility.evaluate_many([0, utility.full_bits], threads=threads)
    total = float(full_value - empty_value)

    if n == 1:
        return LinearSurrogate(theta=np.array([total]), kernel_id=kernel,
                               residual=0.0, empty_value=float(empty_value))

    if mode == 'exhaustive':
        check_exact_cap(n, cap, 'exhaustive surrogate fit')
        table = evaluate_all(utility, cap=cap, threads=threads)
        masks = np.arange(1, (1 << n) - 1, dtype=np.int64)
        design = mask_matrix(masks, n).astype(np.float64)
        targets = table[masks] - table[0]
        weights = weights_by_size[design.sum(axis=1).astype(np.int64)]
    else:
        if num_of_samples is None or num_of_samples < 1:
            raise InvalidInputError('sampled fits need a positive number of samples')
        if seed is None:
            raise InvalidInputError('sampled fits need a seed')

        masses = weights_by_size * comb(n, np.arange(n + 1))
        masks = _sample_masks(masses, n, num_of_samples, seed)
        design = mask_matrix(masks, n).astype(np.float64)
        targets = np.asarray(utility.evaluate_many(masks, threads=threads)) - empty_value
        weights = np.ones(len(masks))

    theta = constrained_lstsq(design, targets, weights, total)
    residual = float(np.sum(weights * (targets - design @ theta) ** 2))
    log.info('surrogate fitted with kernel "%s" (%s mode, residual %.3g)',
             kernel, mode, residual)

    return LinearSurrogate(theta=theta, kernel_id=kernel, residual=residual,
                           empty_value=float(empty_value))


def myopic_sequence(surrogate: LinearSurrogate) -> Any:
    '''Return the order in which the myopic policy picks points under `surrogate`.

    The marginal gain of point ``a`` under a linear surrogate is θ_a whatever
    has been selected before, so this is the ranking by θ.'''

    return rank_by_value(surrogate.theta)


def myopic_rollout(surrogate: LinearSurrogate) -> Any:
    '''Run the myopic policy step by step.

    At each step, pick the unselected point with the largest gain
    Û(s ∪ {a}) − Û(s) (see :meth:`LinearSurrogate.gain`); ties go to the
    smallest index. The result always matches :func:`myopic_sequence`.'''

    n = surrogate.theta.size
    state = 0
    perm = []
    for _ in range(n):
        best_gain, best_action = -np.inf, None
        for action in range(n):
            if (state >> action) & 1:
                continue
            gain = surrogate.gain(state, action)
            if gain > best_gain:
                best_gain, best_action = gain, action

        perm.append(best_action)
        state |= 1 << best_action

    return np.array(perm, dtype=np.int64)


def surrogate_gap(surrogate: LinearSurrogate, values) -> float:
    'Largest absolute difference between θ and another vector of values'
    values = as_value_array(values)
    if values.size != surrogate.theta.size:
        raise InvalidInputError('cannot compare {0} coefficients with {1} values'
                                .format(surrogate.theta.size, values.size))
    return float(np.max(np.abs(surrogate.theta - values)))
