"""Exception and warning types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid dimensions, grids, policies or other run configuration."""


class BoundaryRateError(ConfigurationError):
    """The target rate sits exactly on a regime boundary; no regime applies."""


class ApplicabilityError(ConfigurationError):
    """A closed-form prediction was requested outside its validity region."""


class InsufficientDataError(RuntimeError):
    """Not enough eligible points to carry out a fit."""


class NumericalError(ArithmeticError):
    """A matrix factorization or eigensolver failed unexpectedly."""


class NumericalHealthWarning(RuntimeWarning):
    """Roundoff produced values outside the expected numerical slack."""
