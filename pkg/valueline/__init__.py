#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'Data valuation and sequential selection of training points.'

from valueline.core import (Dataset, SelectionCurve, SubsetMask, UtilityFunction,
                            ValueAssignment, memoize, rank_by_value,
                            selection_curve)
from valueline.errors import (BudgetExceededError, CurvatureUndefinedError,
                              InvalidInputError, NumericalError, ResourceCapError,
                              UtilityEvaluationError, ValuelineError)

__version__ = '0.1'
