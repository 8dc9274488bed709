"""Exception types raised by the library."""


class TmsvError(Exception):
    """Base class for all library errors."""


class DegenerateStateError(TmsvError, ValueError):
    """A covariance matrix is singular to working precision."""


class UnsupportedConfigurationError(TmsvError, ValueError):
    """The requested device combination has no implemented model."""


class PhysicalityError(TmsvError, RuntimeError):
    """An internal result violated the uncertainty relation."""


class SeriesConvergenceError(TmsvError, ArithmeticError):
    """A hypergeometric series failed to converge within its iteration cap."""


class DecompositionError(TmsvError, ArithmeticError):
    """The pure-state extraction produced a weight outside [0, 1]."""


class TruncationError(TmsvError, ValueError):
    """State support exceeds the configured photon-number cutoff."""


class NoSolutionError(TmsvError, ValueError):
    """A root-finding problem has no solution for the given inputs."""


class TruncationWarning(UserWarning):
    """The declared truncation tail exceeds the requested tolerance."""


class PrecisionWarning(UserWarning):
    """A reconstructed quantity is limited by the truncation tail."""
