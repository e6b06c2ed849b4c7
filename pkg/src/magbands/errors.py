"""Exception types shared across the package."""


class MagbandsError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(MagbandsError, ValueError):
    """A parameter is outside its admissible range."""


class AssumptionError(MagbandsError, ValueError):
    """A geometric or field assumption required by an operation fails."""


class ConfinementError(MagbandsError, ValueError):
    """The truncated computational box is too small for the requested scan.

    Carries a suggested half-length when one could be determined.
    """

    def __init__(self, message, suggested_half_length=None):
        super().__init__(message)
        self.suggested_half_length = suggested_half_length


class SolverError(MagbandsError, RuntimeError):
    """An eigensolver or root bracketing failed to converge."""
