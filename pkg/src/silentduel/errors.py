"""Exception types raised by the solver."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NumericError(ArithmeticError):
    """An iterative method failed to converge."""
