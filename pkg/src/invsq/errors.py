"""Exception types shared across the package."""


class InvsqError(Exception):
    """Base class for all package-specific errors."""


class DomainError(InvsqError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AccuracyError(InvsqError, RuntimeError):
    """An evaluation scheme cannot certify the requested tolerance."""


class ResolutionError(InvsqError, ValueError):
    """A quadrature or time grid is too coarse to resolve the integrand."""


class GridError(InvsqError, ValueError):
    """Grid mismatch, coverage, or coarseness problem."""


class SpectralRangeError(InvsqError, ValueError):
    """Data carries energy outside the resolvable spectral range."""


class DegenerateDataError(InvsqError, ValueError):
    """Input data is degenerate for the requested fit or reduction."""


class TruncationWarning(UserWarning):
    """Significant mass near the domain truncation radius."""


class AliasingWarning(UserWarning):
    """Spectral content beyond the Nyquist rate of a time grid."""
