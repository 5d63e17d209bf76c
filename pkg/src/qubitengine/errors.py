"""Exception and warning types shared across the package."""


class QubitEngineError(Exception):
    """Base class for all package errors."""


class DomainError(QubitEngineError, ValueError):
    """A physical argument is outside its admissible range."""


class FrameError(QubitEngineError, ValueError):
    """Unknown frame id or frames mixed inconsistently."""


class InvalidStateError(QubitEngineError, ValueError):
    """Polarization exceeds the Bloch-ball bound."""


class NoFiniteSolutionError(QubitEngineError, ValueError):
    """A closed-form rule has no finite solution for the given input."""


class InvalidRegimeError(QubitEngineError, ValueError):
    """Inputs fall outside the validity range of a closed form."""


class InfeasibleProtocolError(QubitEngineError):
    """Protocol synthesis found no admissible control at some time."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConvergenceError(QubitEngineError):
    """Iteration did not reach the requested tolerance."""

    def __init__(self, message, last_distance=None):
        super().__init__(message)
        self.last_distance = last_distance


class NonContractiveError(QubitEngineError):
    """The affine cycle map has no unique attracting fixed point."""


class SingularOperatingPointError(QubitEngineError, ZeroDivisionError):
    """A closed-form expression has a vanishing denominator."""


class IntegrationError(QubitEngineError):
    """The ODE integrator failed to meet its tolerance."""


class ValidityWarning(UserWarning):
    """An approximation is used outside its stated regime."""


class ValidityError(QubitEngineError):
    """Raised instead of ValidityWarning when strict validity is requested."""


def flag_validity(message, strict=False, stacklevel=3):
    """Warn about a regime breach, or raise when ``strict`` is set."""
    import warnings

    if strict:
        raise ValidityError(message)
    warnings.warn(message, ValidityWarning, stacklevel=stacklevel)
