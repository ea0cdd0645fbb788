"""Exception types raised across the package."""


class DomainError(ValueError):
    """A parameter or argument lies outside its admissible range."""


class FitError(RuntimeError):
    """Estimation could not be carried out on the supplied data."""


class NoSolutionOnLine(ValueError):
    """The requested level set does not cross a search ray."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance.

    Attributes
    ----------
    indices : numpy.ndarray
        Query indices whose error estimate exceeded the tolerance.
    error_estimates : numpy.ndarray
        The corresponding error estimates.
    """

    def __init__(self, message, indices=None, error_estimates=None):
        super().__init__(message)
        self.indices = indices
        self.error_estimates = error_estimates


class ModelFormatError(ValueError):
    """A serialized model is malformed, invalid, or of an unsupported version."""
