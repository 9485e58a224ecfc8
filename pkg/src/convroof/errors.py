"""Exception types shared across the package."""


class ConvroofError(Exception):
    """Base class for all package errors."""


class InvalidInputError(ConvroofError, ValueError):
    """Malformed argument: wrong shape, non-finite entries, bad flag value."""


class InvalidStateError(ConvroofError, ValueError):
    """A matrix that should be a density matrix is not one."""


class NotPSDError(ConvroofError, ValueError):
    """Eigenvalue below the PSD rejection threshold."""


class RankDeficiencyError(ConvroofError, ValueError):
    """Input is (numerically) rank deficient where full rank is required."""


class SolverFailureError(ConvroofError, RuntimeError):
    """All restarts failed to produce a usable result."""
