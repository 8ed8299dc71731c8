"""Error taxonomy shared by every module in the package."""


class PellError(Exception):
    """Base class for all library errors."""


class DomainError(PellError):
    """An argument lies outside the documented domain of an operation."""


class InvalidDomain(PellError):
    """An integration interval is empty or reversed (lo >= hi)."""


class NonConvergence(PellError):
    """An iterative process hit its cap before reaching its target.

    Carries the best value seen so far when one exists, for diagnostics.
    """

    def __init__(self, message, value=None, err_estimate=None):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


class NonFinite(PellError):
    """An integrand returned inf or nan at an interior node."""


class NumericalFailure(PellError):
    """An internal consistency condition failed (e.g. a denominator that
    must stay positive did not)."""
