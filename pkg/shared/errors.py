"""
Exception hierarchy for gaussmax.
"""
from typing import Optional


class GaussMaxError(Exception):
    """Base class of every error raised by the package."""


class DimensionMismatchError(GaussMaxError, ValueError):
    """Arrays or selections with incompatible sizes."""


class CovarianceError(GaussMaxError, ValueError):
    """Covariance matrix is asymmetric, has negative variances or is not PSD."""


class PreconditionError(GaussMaxError, ValueError):
    """An operation was called outside its documented domain."""


class InstanceFormatError(GaussMaxError, ValueError):
    """Instance document violates the file schema."""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class ModelError(GaussMaxError, ValueError):
    """Malformed MILP model."""


class EnumerationLimitError(GaussMaxError, RuntimeError):
    """Exhaustive enumeration would exceed its budget."""


class InfeasibleRegionError(GaussMaxError):
    """The feasible region admits no selection."""
