"""Perfect conductor facing a perfect conductor coated with a film.

Conductors sit at z = 0 and z = d; the film fills d - a <= z <= d and the
vacuum gap is d - a.  On the imaginary frequency axis the mode conditions
for the two polarisations are

    g_y = R_y exp(2 K0 (d - a)) - 1,   g_z = R_z exp(2 K0 (d - a)) - 1

with film "reflection" ratios

    R_y = [(e + 1) K1 + (e - 1) K0] / [(e + 1) K1 - (e - 1) K0]
    R_z = [(e - 1) K1 + eps (e + 1) K0] / [(1 - e) K1 + eps (e + 1) K0]

where e = exp(2 K1 a).  Both ratios are evaluated with exp(-2 K1 a) so a
thick or highly reflecting film never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from casimir.constants import C, HBAR_C
from casimir.errors import ConvergenceError, DomainError
from casimir.optics import PerfectConductor, PermittivityModel, Vacuum, eps_imag_axis
from casimir.quadrature import QuadratureSpec, imaginary_axis_integral


@dataclass(frozen=True)
class LayeredCavity:
    """Conductor separation ``d`` with a film of thickness ``a`` on one conductor."""

    d: float
    a: float
    film: PermittivityModel

    def __post_init__(self):
        if not self.d > 0 or not math.isfinite(self.d):
            raise DomainError(f"conductor separation must be > 0, got {self.d}")
        if not 0 <= self.a < self.d:
            raise DomainError(f"film thickness must satisfy 0 <= a < d, got a={self.a}, d={self.d}")

    @classmethod
    def from_gap(cls, vacuum_gap: float, a: float, film: PermittivityModel) -> "LayeredCavity":
        if not vacuum_gap > 0:
            raise DomainError(f"vacuum gap must be > 0, got {vacuum_gap}")
        if a < 0:
            raise DomainError(f"film thickness must be >= 0, got {a}")
        return cls(vacuum_gap + a, a, film)

    @property
    def gap(self) -> float:
        return self.d - self.a


def wavenumber(k, xi, eps_ixi):
    """Decay constant sqrt(k^2 + eps(i xi) xi^2 / c^2) in rad/m."""
    k = np.asarray(k, dtype=float)
    xi = np.asarray(xi, dtype=float)
    eps_ixi = np.asarray(eps_ixi, dtype=float)
    if np.any(k < 0) or np.any(xi < 0) or np.any(eps_ixi < 1):
        raise DomainError("wavenumber needs k >= 0, xi >= 0 and eps >= 1")
    out = np.sqrt(k * k + eps_ixi * (xi / C) ** 2)
    return float(out) if out.ndim == 0 else out


def _film_eps(cavity, xi, quad):
    if isinstance(cavity.film, PerfectConductor):
        return math.inf
    if isinstance(cavity.film, Vacuum) or cavity.a == 0:
        return 1.0
    return eps_imag_axis(cavity.film, xi, quad).eps


def _inverse_ratios(x0, q, eps, thickness_ratio):
    """(1/R_y, 1/R_z), each in (0, 1], from x0 = 2 K0 g and q = 4 (xi g / c)^2.

    Differences such as x1 - x0 are formed algebraically so neither a thin
    film nor a thick almost-vacuum film suffers cancellation.
    """
    if math.isinf(eps):
        one = np.ones_like(x0)
        return one, one
    delta = (eps - 1.0) * q  # x1^2 - x0^2
    x1 = np.sqrt(x0 * x0 + delta)
    y = x1 * thickness_ratio
    u = np.exp(-y)
    p, m = 1.0 + u, -np.expm1(-y)
    den_y = delta / (x1 + x0) + u * (x1 + x0)
    num_y = p * x1 + m * x0
    # eps x0 - x1 = (eps - 1)((eps + 1) x0^2 - q) / (eps x0 + x1), both factors >= 0
    s = eps * x0 + x1
    den_z = (eps - 1.0) * ((eps + 1.0) * x0 * x0 - q) / s + u * s
    num_z = m * x1 + eps * p * x0
    return den_y / num_y, den_z / num_z


def log_mode_function(xi: float, k: float, cavity: LayeredCavity, polarisation: str,
                      quad: QuadratureSpec | None = None) -> float:
    """log g for polarisation 'y' or 'z', finite for any decay exponent.

    xi = 0 is taken as the limit xi -> 0+ (evaluated at xi = 1e-9 c / d),
    which is model dependent: Plasma keeps eps xi^2 finite, Drude does not.
    """
    if xi < 0 or k < 0:
        raise DomainError("mode functions need xi >= 0 and k >= 0")
    if polarisation not in ("y", "z"):
        raise DomainError(f"polarisation must be 'y' or 'z', got {polarisation!r}")
    if xi == 0:
        xi = 1e-9 * C / cavity.d
    eps = _film_eps(cavity, xi, quad)
    g = cavity.gap
    x0 = 2.0 * g * wavenumber(k, xi, 1.0)
    q = (2.0 * xi * g / C) ** 2
    with np.errstate(under="ignore"):
        rho_y, rho_z = _inverse_ratios(np.float64(x0), q, eps, cavity.a / g)
    rho = float(rho_y if polarisation == "y" else rho_z)
    if rho == 0.0:
        # film ratio beyond float range: vacuum-like film, R = exp(2 K1 a)
        log_r = 2.0 * wavenumber(k, xi, eps) * cavity.a
    else:
        log_r = -math.log(rho)
    return x0 + log_r + math.log1p(-math.exp(-x0 - log_r))


def _mode_function(xi, k, cavity, quad, polarisation):
    log_g = log_mode_function(xi, k, cavity, polarisation, quad)
    return math.exp(log_g) if log_g < 709.0 else math.inf


def dispersion_gy(xi: float, k: float, cavity: LayeredCavity,
                  quad: QuadratureSpec | None = None) -> float:
    """Transverse-electric mode function f_y(i xi, k) of the cavity.

    Values beyond the float range come back as inf; use
    :func:`log_mode_function` when the logarithm is what is needed.
    """
    return _mode_function(xi, k, cavity, quad, "y")


def dispersion_gz(xi: float, k: float, cavity: LayeredCavity,
                  quad: QuadratureSpec | None = None) -> float:
    """Transverse-magnetic mode function f_z(i xi, k) of the cavity."""
    return _mode_function(xi, k, cavity, quad, "z")


def _pressure_kernel(zeta, eps, thickness_ratio):
    q = 4.0 * zeta * zeta

    def kernel(x):
        rho_y, rho_z = _inverse_ratios(x, q, eps, thickness_ratio)
        ey = rho_y * np.exp(-x)
        ez = rho_z * np.exp(-x)
        if np.any(ey >= 1.0) or np.any(ez >= 1.0):
            raise ArithmeticError("mode function has a zero on the imaginary axis")
        return 0.125 * x * x * (ey / (1.0 - ey) + ez / (1.0 - ez))

    return kernel


def _energy_kernel(zeta, eps, thickness_ratio):
    q = 4.0 * zeta * zeta

    def kernel(x):
        rho_y, rho_z = _inverse_ratios(x, q, eps, thickness_ratio)
        ex = np.exp(-x)
        return 0.25 * x * (np.log1p(-rho_y * ex) + np.log1p(-rho_z * ex))

    return kernel


def _integrate(cavity, quad, make_kernel, power, coeff, abs_tol):
    g = cavity.gap
    ratio = cavity.a / g

    def factory(zeta):
        eps = _film_eps(cavity, zeta * C / g, quad)
        return make_kernel(zeta, eps, ratio)

    return imaginary_axis_integral(factory, quad, majorant_power=power, majorant_coeff=coeff,
                                   abs_tol=abs_tol)


def film_pressure(cavity: LayeredCavity,
                  quad: QuadratureSpec | None = None) -> tuple[float, float, int]:
    """Attraction per area between the conductors, in Pa.

    Returns (pressure, error estimate, integrand evaluations).  The
    d-independent vacuum term is dropped, so a = 0 gives the ideal result.
    """
    quad = quad or QuadratureSpec()
    g = cavity.gap
    scale = HBAR_C / (2.0 * math.pi**2 * g**4)
    res = _integrate(cavity, quad, _pressure_kernel, 2, 0.25, quad.abs_tol / scale)
    value, error = scale * res.value, scale * res.error
    tol = max(quad.abs_tol, quad.rel_tol * abs(value))
    if error > tol:
        raise ConvergenceError(f"film pressure error {error:.3e} Pa exceeds {tol:.3e} Pa",
                               value=value, error=error)
    return value, error, res.evals


def film_energy_per_area(cavity: LayeredCavity,
                         quad: QuadratureSpec | None = None) -> tuple[float, float, int]:
    """Interaction energy per area in J/m^2, with (d+const)-linear vacuum terms dropped.

    The discarded pieces are the term linear in the gap (the same one
    omitted from :func:`film_pressure`) and the separation-independent
    log of the film ratios, so -dE/dd at fixed film thickness equals the
    film pressure and the energy vanishes as the gap grows.
    """
    quad = quad or QuadratureSpec()
    g = cavity.gap
    scale = HBAR_C / (4.0 * math.pi**2 * g**3)
    res = _integrate(cavity, quad, _energy_kernel, 1, 2.0, quad.abs_tol / scale)
    value, error = scale * res.value, scale * res.error
    return value, error, res.evals


def fig2_point(vacuum_gap: float, a: float, film: PermittivityModel,
               quad: QuadratureSpec | None = None) -> dict:
    """Bare-conductor, coated and perfectly-coated pressures at one vacuum gap.

    The conductor separation is ``vacuum_gap + a``; the uncoated reference
    keeps that separation and the perfectly conducting film reduces it to
    the vacuum gap.  ``ratio`` is the film effect relative to a perfect film.
    """
    quad = quad or QuadratureSpec()
    d = vacuum_gap + a
    f_nofilm, _, _ = film_pressure(LayeredCavity(d, 0.0, film), quad)
    f_film, err, _ = film_pressure(LayeredCavity(d, a, film), quad)
    f_perfect, _, _ = film_pressure(LayeredCavity(d, a, PerfectConductor()), quad)
    span = f_perfect - f_nofilm
    ratio = (f_film - f_nofilm) / span if span > 0 else float("nan")
    return {"d": d, "gap": vacuum_gap, "f_nofilm": f_nofilm, "f_film": f_film,
            "f_perfect": f_perfect, "ratio": ratio, "err": err}
