"""Casimir forces between real-material bodies.

Imaginary-frequency Lifshitz integrals, Kramers-Kronig continuation of
tabulated optical constants, closed-form conductivity and roughness
corrections, the film-on-conductor cavity and a contour-integral
mode-counting oracle.
"""

from casimir.errors import (
    CasimirError,
    ContourTooClose,
    ConvergenceError,
    DomainError,
    NonIntegerResult,
    ParseError,
    SymmetryViolation,
    UnsupportedModel,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "CasimirError",
    "ContourTooClose",
    "ConvergenceError",
    "DomainError",
    "NonIntegerResult",
    "ParseError",
    "SymmetryViolation",
    "UnsupportedModel",
    "ValidationError",
    "__version__",
]
