"""Exception hierarchy shared by all modules.

The CLI maps ``InputError`` to exit code 1 and ``NumericalError`` /
``InvariantError`` to exit code 2.
"""


class UGXError(Exception):
    pass


class InputError(UGXError, ValueError):
    """Malformed or out-of-range input."""


class SizeError(InputError):
    """Instance too large for an exhaustive routine."""


class GenerationError(UGXError):
    """Random generation gave up after its retry budget."""


class NumericalError(UGXError):
    """Iterative solver failed or a matrix was not PSD within tolerance."""

    def __init__(self, message, estimate=None, residual=None):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual


class InvariantError(UGXError):
    """An internal guarantee was violated (indicates a bug or infeasible input)."""
