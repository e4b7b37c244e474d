"""Exception types shared across the package."""


class CapacityError(Exception):
    """A requested computation exceeds a configured memory or size budget."""


class HypothesisError(ValueError):
    """An exponent function violates the structural hypothesis required of it.

    Carries the first failing exponent in ``exponent`` when known.
    """

    def __init__(self, message, exponent=None):
        super().__init__(message)
        self.exponent = exponent


class BoundViolationError(Exception):
    """A certified growth bound fails; ``witness`` is the offending exponent."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DivergenceError(ArithmeticError):
    """An Euler product hit a non-positive local factor (invalid input function)."""


class PrecisionError(Exception):
    """A numeric routine cannot certify the requested accuracy."""


class DegenerateDataError(ValueError):
    """Input data is too degenerate to fit (clustered grid, zero residuals)."""
