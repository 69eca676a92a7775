class CitetoyError(Exception):
    """Base class for library errors."""


class ParameterError(CitetoyError, ValueError):
    """Model parameters outside their valid range."""


class DomainError(CitetoyError, ValueError):
    """Argument outside the domain of an operation."""


class NumericalError(CitetoyError, ArithmeticError):
    """Overflow, non-convergence or a negative probability beyond roundoff."""


class InsufficientDataError(CitetoyError, ValueError):
    """Too few (distinct) observations for the requested statistic."""


class FitError(NumericalError):
    """Likelihood maximisation failed; ``diagnostics`` holds per-restart detail."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []
