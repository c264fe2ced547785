# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Custom exceptions for pyvalagg.
"""

from typing import Optional, Sequence


class ValAggException(Exception):
    """Base exception for all pyvalagg errors."""
    pass


class ValidationError(ValAggException):
    """Raised when a population violates its invariants.

    ``violations`` holds every problem found, not just the first one.
    """

    def __init__(self, violations: Sequence[object], message: Optional[str] = None):
        self.violations = list(violations)
        if message is None:
            lines = "; ".join(str(v) for v in self.violations)
            message = f"{len(self.violations)} validation error(s): {lines}"
        super().__init__(message)


class ShapeError(ValAggException, ValueError):
    """Raised when matrices or vectors of different shapes are combined."""
    pass


class BoundsError(ValAggException):
    """Raised for missing, non-positive or underivable confidence bounds."""
    pass


class MixingError(ValAggException):
    """Raised when a mixing parameter violates the degree bound."""
    pass


class NonFiniteError(ValAggException):
    """Raised when NaN/inf shows up during a run."""

    def __init__(self, message: str, iteration: int):
        self.iteration = iteration
        super().__init__(f"{message} (iteration {iteration})")


class FormatError(ValAggException):
    """Raised on malformed population or result documents."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SynthesisError(ValAggException):
    """Raised when a synthetic population cannot be generated."""
    pass


class OracleError(ValAggException):
    """Raised on invalid oracle input (empty groups, oversized grids)."""
    pass


class BoundaryWeightWarning(Warning):
    """Warning (non-fatal) when an agreed weight vector touches the simplex boundary."""
    pass
