class UsageError(ValueError):
    """Bad arguments: wrong shapes, out-of-range parameters, unknown names."""


class NumericalError(ArithmeticError):
    """A computation produced something that violates a numerical invariant."""
