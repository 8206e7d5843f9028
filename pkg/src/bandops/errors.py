"""Exception types shared across the package."""


class BandopsError(Exception):
    """Base class for all package-specific errors."""


class KernelError(BandopsError):
    """A dense linear-algebra kernel failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularMatrixError(BandopsError):
    """A linear solve hit a (numerically) singular matrix."""

    def __init__(self, message, sigma_min):
        super().__init__(message)
        self.sigma_min = sigma_min


class UnsupportedExponentError(BandopsError):
    """Operation not available for the operator's exponent p."""


class UnsupportedSymbolClassError(BandopsError):
    """Operation not available for this diagonal law class (e.g. seeded-random)."""


class SpecFormatError(BandopsError):
    """An operator specification document failed validation.

    ``location`` is a '/'-joined path into the JSON document identifying
    the offending field.
    """

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class NotStableError(BandopsError):
    """Finite sections of the operator are not stable."""


class PreconditionError(BandopsError):
    """A documented precondition was violated; carries the computed value."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class NonConvergenceError(BandopsError):
    """An iterative computation did not reach the requested tolerance."""
