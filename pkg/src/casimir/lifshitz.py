"""Parallel-plate pressures and sphere-plate forces.

All results are magnitudes of attraction (positive numbers).
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from casimir.constants import C, HBAR_C
from casimir.errors import CasimirError, ConvergenceError, DomainError, UnsupportedModel
from casimir.optics import (
    Constant,
    PerfectConductor,
    PermittivityModel,
    Vacuum,
    eps_imag_axis,
)
from casimir.quadrature import QuadResult, QuadratureSpec, gauss_kronrod, imaginary_axis_integral

__all__ = [
    "ForceCurve",
    "ForcePoint",
    "ParallelPlates",
    "QuadratureSpec",
    "SpherePlate",
    "force_curve",
    "ideal_energy",
    "ideal_pressure",
    "ideal_sphere_force",
    "lifshitz_energy",
    "lifshitz_pressure",
    "pft_force",
]

# ideal pressure = PRESSURE_SCALE / d^4 times (integral / IDEAL_INTEGRAL)
IDEAL_INTEGRAL = math.pi**4 / 120.0
ENERGY_TAIL_FACTOR = 50.0


@dataclass(frozen=True)
class ParallelPlates:
    pass


@dataclass(frozen=True)
class SpherePlate:
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"sphere radius must be > 0, got {self.radius}")


Geometry = Union[ParallelPlates, SpherePlate]


@dataclass(frozen=True)
class ForcePoint:
    d: float
    value: float
    err_estimate: float
    integrand_evals: int


@dataclass(frozen=True)
class ForceCurve:
    points: tuple[ForcePoint, ...]
    geometry: Geometry

    def distances(self):
        return np.array([p.d for p in self.points])

    def values(self):
        return np.array([p.value for p in self.points])


def _check_distance(d):
    if not d > 0 or not math.isfinite(d):
        raise DomainError(f"separation must be a finite positive length, got {d}")


def ideal_pressure(d: float) -> float:
    """pi^2 hbar c / (240 d^4): attraction per area between perfect mirrors, Pa."""
    _check_distance(d)
    return math.pi**2 * HBAR_C / (240.0 * d**4)


def ideal_energy(d: float) -> float:
    """Ideal-mirror interaction energy per area, -pi^2 hbar c / (720 d^3), J/m^2."""
    _check_distance(d)
    return -math.pi**2 * HBAR_C / (720.0 * d**3)


def pft_force(energy_per_area: Callable[[float], float], d: float, R: float) -> float:
    """Proximity-force sphere-plate force 2 pi R |E(d)| from a plate energy law.

    The energy is an interaction energy (negative for attraction); the
    returned force is the magnitude of attraction.
    """
    _check_distance(d)
    if not R > 0:
        raise DomainError(f"radius must be > 0, got {R}")
    return 2.0 * math.pi * R * abs(energy_per_area(d))


def ideal_sphere_force(d: float, R: float) -> float:
    """pi^3 hbar c R / (360 d^3), N.  Warns when d/R > 0.01."""
    _check_distance(d)
    if not R > 0:
        raise DomainError(f"radius must be > 0, got {R}")
    if d / R > 0.01:
        warnings.warn(f"proximity-force approximation needs d << R (d/R = {d / R:.3g})",
                      stacklevel=2)
    return math.pi**3 * HBAR_C * R / (360.0 * d**3)


def _lifshitz_kernel(eps: float, zeta: float):
    """Both polarisations of the plate integrand at one reduced frequency.

    In x = 2 p xi d / c the integrand is (x^2/8) sum r^2 e^-x / (1 - r^2 e^-x)
    with r_TE = (S - x)/(S + x), r_TM = (eps x - S)/(eps x + S) and
    S = sqrt(x^2 + 4 (eps - 1) zeta^2).
    """
    delta = 4.0 * (eps - 1.0) * zeta * zeta

    def kernel(x):
        s = np.sqrt(x * x + delta)
        r_te = delta / (s + x) ** 2  # (S - x)/(S + x) without cancellation
        r_tm = (eps * x - s) / (eps * x + s)
        ex = np.exp(-x)
        a = r_te * r_te * ex
        b = r_tm * r_tm * ex
        return 0.125 * x * x * (a / (1.0 - a) + b / (1.0 - b))

    return kernel


def _pressure_integral(d, model, quad) -> QuadResult:
    scale = HBAR_C / (2.0 * math.pi**2 * d**4)

    def factory(zeta):
        eps = eps_imag_axis(model, zeta * C / d, quad).eps
        return _lifshitz_kernel(eps, zeta)

    res = imaginary_axis_integral(factory, quad, majorant_power=2, majorant_coeff=0.25,
                                  abs_tol=quad.abs_tol / scale)
    return QuadResult(scale * res.value, scale * res.error, res.evals, True)


def lifshitz_pressure(d: float, model: PermittivityModel,
                      quad: QuadratureSpec | None = None) -> tuple[float, float, int]:
    """Zero-temperature Lifshitz pressure between identical half-spaces.

    Returns (pressure in Pa, error estimate in Pa, integrand evaluations).
    """
    _check_distance(d)
    quad = quad or QuadratureSpec()
    if isinstance(model, PerfectConductor):
        raise UnsupportedModel("perfect conductors are handled by ideal_pressure")
    if isinstance(model, Vacuum) or (isinstance(model, Constant) and model.eps == 1.0):
        return 0.0, 0.0, 0
    res = _pressure_integral(d, model, quad)
    tol = max(quad.abs_tol, quad.rel_tol * abs(res.value))
    if res.error > tol:
        raise ConvergenceError(
            f"Lifshitz pressure at d={d:.4g} m: error {res.error:.3e} Pa exceeds {tol:.3e} Pa",
            value=res.value, error=res.error,
        )
    return res.value, res.error, res.evals


def lifshitz_energy(d: float, model: PermittivityModel,
                    quad: QuadratureSpec | None = None) -> tuple[float, float, int]:
    """Interaction energy per area, -int_d^inf P(x) dx, in J/m^2.

    The pressure is integrated over ln(x) from d to 50 d; beyond that it is
    extended as P(50 d) (50 d / x)^4, which is exact for the ideal law.
    """
    _check_distance(d)
    quad = quad or QuadratureSpec()
    if isinstance(model, PerfectConductor):
        return ideal_energy(d), 0.0, 0
    if isinstance(model, Vacuum):
        return 0.0, 0.0, 0
    inner = quad.tightened(10.0)
    evals = 0
    worst_rel = 0.0

    def integrand(us):
        nonlocal evals, worst_rel
        out = np.empty_like(us)
        for i, u in enumerate(us):
            x = d * math.exp(u)
            p, err, n = lifshitz_pressure(x, model, inner)
            evals += n
            if p:
                worst_rel = max(worst_rel, err / p)
            out[i] = p * x
        return out

    u_max = math.log(ENERGY_TAIL_FACTOR)
    res = gauss_kronrod(integrand, 0.0, u_max, rel_tol=quad.rel_tol,
                        max_subdivisions=quad.max_subdivisions)
    if not res.converged:
        raise ConvergenceError(f"energy integral at d={d:.4g} m did not converge",
                               value=res.value, error=res.error)
    far = ENERGY_TAIL_FACTOR * d
    p_far, err_far, n_far = lifshitz_pressure(far, model, inner)
    evals += n_far
    tail = p_far * far / 3.0
    value = res.value + tail
    error = res.error + worst_rel * res.value + err_far * far / 3.0
    return -value, error, evals


def _point(args):
    d, geometry, model, quad = args
    if isinstance(geometry, SpherePlate):
        if isinstance(model, PerfectConductor):
            return ForcePoint(d, ideal_sphere_force(d, geometry.radius), 0.0, 0)
        energy, err, evals = lifshitz_energy(d, model, quad)
        factor = 2.0 * math.pi * geometry.radius
        return ForcePoint(d, factor * abs(energy), factor * err, evals)
    if isinstance(model, PerfectConductor):
        return ForcePoint(d, ideal_pressure(d), 0.0, 0)
    value, err, evals = lifshitz_pressure(d, model, quad)
    return ForcePoint(d, value, err, evals)


class ForceCurveError(CasimirError):
    """One or more grid points failed; ``failures`` maps grid index to exception."""

    def __init__(self, failures: dict[int, Exception]):
        self.failures = failures
        detail = "; ".join(f"[{i}] {type(e).__name__}: {e}" for i, e in sorted(failures.items()))
        super().__init__(f"{len(failures)} grid point(s) failed: {detail}")


def _safe_point(args):
    try:
        return _point(args)
    except CasimirError as exc:
        return exc


def force_curve(d_grid: Sequence[float], geometry: Geometry, model: PermittivityModel,
                quad: QuadratureSpec | None = None, *, workers: int = 1) -> ForceCurve:
    """Evaluate pressure (plates) or force (sphere) on a strictly increasing grid.

    With ``workers > 1``, points are computed in separate processes; the
    output is identical to the serial result and keeps the grid order.
    """
    quad = quad or QuadratureSpec()
    grid = [float(d) for d in d_grid]
    if not grid:
        raise DomainError("distance grid is empty")
    for d in grid:
        _check_distance(d)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("distance grid must be strictly increasing")
    if isinstance(geometry, SpherePlate) and grid[-1] / geometry.radius > 0.01:
        warnings.warn("proximity-force approximation needs d << R", stacklevel=2)
    jobs = [(d, geometry, model, quad) for d in grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_safe_point, jobs))
    else:
        results = [_safe_point(j) for j in jobs]
    failures = {i: r for i, r in enumerate(results) if isinstance(r, Exception)}
    if failures:
        raise ForceCurveError(failures)
    return ForceCurve(tuple(results), geometry)
