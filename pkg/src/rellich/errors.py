"""Exception types used across the package."""


class ParameterDomainError(ValueError):
    """Parameters outside the domain where a formula is defined."""


class DegenerateParameterError(ParameterDomainError, ZeroDivisionError):
    """A factor that appears in a denominator vanishes."""


class ConvergenceError(ArithmeticError):
    """A series or quadrature did not reach the requested tolerance.

    ``partial`` holds the best available estimate (or partial sums).
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
