#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Exceptions raised by Valueline.

All of them derive from :class:`ValuelineError`, so that callers can catch
everything coming from the library with one ``except`` clause. The command
line interface maps each family to a different exit code (see
:mod:`valueline.cli`).'''


class ValuelineError(Exception):
    'Base class for all the errors raised by Valueline'


class InvalidInputError(ValuelineError, ValueError):
    'Raised when an input or a configuration parameter is not acceptable'


class ResourceCapError(ValuelineError, RuntimeError):
    '''Raised when an exact algorithm would need more resources than allowed.

    Exact algorithms enumerate the whole subset lattice, so they refuse to run
    on populations larger than a configurable cap.'''


class BudgetExceededError(ResourceCapError):
    'Raised when the number of utility evaluations exceeds the budget'


class NumericalError(ValuelineError, ArithmeticError):
    'Raised when a computation produces non-finite or ill-conditioned results'


class CurvatureUndefinedError(NumericalError):
    '''Raised when the curvature ratio of some point has a non-positive
    denominator.

    The index of the offending point is stored in the field ``index``.'''

    def __init__(self, index: int, gain: float):
        super().__init__(
            'curvature undefined: singleton gain of point {0} is {1}'
            .format(index, gain))
        self.index = index
        self.gain = gain


class UtilityEvaluationError(ValuelineError):
    '''Raised when a utility function fails on some subset.

    Either ``k`` (the size of the prefix in a selection curve) or ``mask``
    (the integer encoding of the subset) identifies where the failure
    happened.'''

    def __init__(self, message: str, k=None, mask=None):
        super().__init__(message)
        self.k = k
        self.mask = mask
