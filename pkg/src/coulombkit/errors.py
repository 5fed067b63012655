"""Exception hierarchy shared by every coulombkit module."""

__all__ = [
    "CoulombError",
    "DomainError",
    "ConvergenceError",
    "PoleError",
    "SingularCoefficientError",
    "InsufficientRangeError",
]


class CoulombError(Exception):
    """Base class for all coulombkit errors."""


class DomainError(CoulombError, ValueError):
    """A parameter lies outside the domain where the quantity is defined."""


class ConvergenceError(CoulombError, ArithmeticError):
    """A series or iteration hit its term cap before meeting its tolerance."""


class PoleError(DomainError):
    """Evaluation requested at (or numerically too close to) a zero of F_L."""


class SingularCoefficientError(DomainError):
    """A recurrence coefficient B or C has a vanishing denominator."""


class InsufficientRangeError(CoulombError):
    """Fewer zeros were found than requested within the scanned range."""
