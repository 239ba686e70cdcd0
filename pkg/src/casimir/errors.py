"""Exception hierarchy shared by every module."""


class CasimirError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CasimirError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(CasimirError, ValueError):
    """Input data parsed correctly but violates a physical or structural invariant."""


class ParseError(CasimirError, ValueError):
    """Malformed text input.

    ``line`` is the 1-based line number of the offending row when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedModel(CasimirError, TypeError):
    """The permittivity model cannot be used with the requested operation."""


class ConvergenceError(CasimirError, RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget above tolerance."""

    def __init__(self, message, value=None, error=None):
        self.value = value
        self.error = error
        super().__init__(message)


class ContourTooClose(CasimirError, ValueError):
    """A zero or pole sits on (or too close to) the integration contour."""


class NonIntegerResult(CasimirError, ArithmeticError):
    """An argument-principle count did not round cleanly to an integer."""


class SymmetryViolation(CasimirError, ValueError):
    """A fixture declared conjugate-symmetric fails f(conj z) == conj f(z)."""
