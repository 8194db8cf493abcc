"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateMeasurementError(DomainError):
    """The measured quadrature has zero variance, so no inference is possible."""


class SingularityError(ArithmeticError):
    """A closed-form expression has a vanishing denominator."""


class BracketError(ValueError):
    """A root-finding bracket does not straddle the bound."""


class FactorizationError(ValueError):
    """A covariance matrix could not be factorized for sampling."""
