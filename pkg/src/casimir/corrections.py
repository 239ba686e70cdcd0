"""Closed-form multiplicative corrections to the ideal parallel-plate force."""

from __future__ import annotations

import math
from dataclasses import dataclass

from casimir.errors import DomainError

SERIES_VALIDITY_LIMIT = 0.3

SERIES_OUT_OF_RANGE = "SeriesOutOfRange"
ROUGHNESS_PERIOD_WARNING = "RoughnessPeriodWarning"

FIRST_ORDER_COEFF = 8.0 / (3.0 * math.pi)
# 120/4pi^2; the full Lifshitz integral suggests a much smaller value (README).
SECOND_ORDER_COEFF = 120.0 / (4.0 * math.pi**2)


@dataclass(frozen=True)
class CorrectionReport:
    base_pressure: float
    conductivity_factor: float
    roughness_factor: float
    corrected_pressure: float
    validity_flags: frozenset


def plasma_correction_factor(lambda_p: float, d: float, order: int = 2) -> float:
    """Finite-conductivity factor as a power series in lambda_p / d.

    Only meaningful for lambda_p / d << 1; see :func:`series_out_of_range`.
    """
    if not lambda_p > 0:
        raise DomainError(f"lambda_p must be > 0, got {lambda_p}")
    if not d > 0:
        raise DomainError(f"d must be > 0, got {d}")
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    x = lambda_p / d
    factor = 1.0 - FIRST_ORDER_COEFF * x
    if order == 2:
        factor += SECOND_ORDER_COEFF * x * x
    return factor


def series_out_of_range(lambda_p: float, d: float) -> bool:
    return lambda_p / d > SERIES_VALIDITY_LIMIT


def roughness_factor(A: float, d: float) -> float:
    """Geometric-averaging roughness enhancement 1 + 4 (A/d)^2 for RMS amplitude A."""
    if not d > 0:
        raise DomainError(f"d must be > 0, got {d}")
    if A < 0:
        raise DomainError(f"roughness amplitude must be >= 0, got {A}")
    if A >= d:
        raise DomainError(f"roughness amplitude {A} must be smaller than the separation {d}")
    return 1.0 + 4.0 * (A / d) ** 2


def apply_corrections(base: float, lambda_p: float | None, A: float | None, d: float,
                      order: int = 2) -> CorrectionReport:
    """Compose conductivity and roughness factors; absent parameters give factor 1.

    ``lambda_p = 0`` and ``A = 0`` are treated as absent.
    """
    if not d > 0:
        raise DomainError(f"d must be > 0, got {d}")
    flags = set()
    conductivity = 1.0
    if lambda_p:
        conductivity = plasma_correction_factor(lambda_p, d, order)
        if series_out_of_range(lambda_p, d):
            flags.add(SERIES_OUT_OF_RANGE)
    rough = 1.0
    if A:
        rough = roughness_factor(A, d)
        # averaging holds only for roughness periods longer than d, which is unknown here
        flags.add(ROUGHNESS_PERIOD_WARNING)
    return CorrectionReport(
        base_pressure=base,
        conductivity_factor=conductivity,
        roughness_factor=rough,
        corrected_pressure=base * conductivity * rough,
        validity_flags=frozenset(flags),
    )
