"""Exception types shared across the package."""


class SparseCertError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SparseCertError):
    """Malformed argument: bad shape, non-finite entries, out-of-range index."""


class UnsupportedSizeError(SparseCertError):
    """Input is outside the size range an operation supports."""


class SingularityError(SparseCertError):
    """A matrix is rank deficient within tolerance where full rank is required."""

    def __init__(self, message, sigma=None):
        super().__init__(message)
        self.sigma = sigma


class BudgetExceededError(SparseCertError):
    """A combinatorial scan would examine more subsets than the configured budget."""

    def __init__(self, message, required=None, budget=None):
        super().__init__(message)
        self.required = required
        self.budget = budget


class PreconditionError(SparseCertError):
    """A documented precondition of a bound or scan does not hold."""


class DomainError(SparseCertError):
    """A scalar argument lies outside the mathematical domain of a formula."""


class ParseError(SparseCertError):
    """A text file could not be parsed."""
