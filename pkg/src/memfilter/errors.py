from __future__ import annotations


class MemFilterError(Exception):
    """Base class for every error raised by memfilter."""


class InvalidParameterError(MemFilterError, ValueError):
    """A sampler or estimator received a parameter outside its support."""


class DomainError(MemFilterError, ValueError):
    """A formula was evaluated outside the set where it is defined."""


class BracketingError(MemFilterError, ValueError):
    """A root search bracket has no sign change."""


class NumericFailureError(MemFilterError, ArithmeticError):
    """An iterative solver hit its iteration cap."""
