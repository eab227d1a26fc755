"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class IntegrabilityError(DomainError):
    """A radial integral diverges at the origin for the requested powers."""


class ConvergenceError(ArithmeticError):
    """An iterative procedure stopped before reaching its tolerance.

    ``partial`` carries the best estimate available when it gave up and
    ``terms`` the number of terms/iterations spent.
    """

    def __init__(self, message, partial=None, terms=None):
        super().__init__(message)
        self.partial = partial
        self.terms = terms


class ToleranceNotMet(ConvergenceError):
    """Quadrature could not reach the requested tolerance."""

    def __init__(self, message, estimate, error, levels=None):
        super().__init__(message, partial=estimate, terms=levels)
        self.estimate = estimate
        self.error = error


class DegenerateBasisError(ArithmeticError):
    """The overlap matrix has no eigenvalue above the linear-dependence threshold."""
