"""
qde_errors.py - Quaternion QDE Lab
One exception tree for the whole toolkit. The CLI maps these onto exit codes
(ProblemFileError -> 2, any other QDEError -> 3).
"""

from typing import Optional, Sequence


class QDEError(Exception):
    """Base class for every failure raised by the toolkit."""


class QuaternionDivisionError(QDEError, ZeroDivisionError):
    pass


class DimensionError(QDEError, ValueError):
    pass


class SingularMatrixError(QDEError):
    pass


class SizeCapError(QDEError, ValueError):
    pass


class ConvergenceError(QDEError):
    """QR iteration ran out of sweeps; `partial` holds what did converge."""

    def __init__(self, message: str, partial: Optional[Sequence[complex]] = None):
        super().__init__(message)
        self.partial = list(partial or [])


class ClusteringError(QDEError):
    pass


class CommutativityError(QDEError, ValueError):
    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class NilpotencyError(QDEError, ValueError):
    pass


class InternalConsistencyError(QDEError):
    pass


class ProblemFileError(QDEError, ValueError):
    pass
