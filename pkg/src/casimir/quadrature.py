"""Vectorised adaptive Gauss-Kronrod quadrature and the imaginary-axis double integral.

Every force and energy in this package reduces to

    I = int_0^inf dzeta int_{2 zeta}^inf dx  kernel(zeta, x)

with zeta = xi L / c a reduced imaginary frequency and x = 2 K0 L the
decay exponent of the gap mode, for a length scale L.  The kernel decays
like x**n exp(-x), so both ranges are truncated and the discarded tail is
bounded in closed form and added to the error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from casimir.errors import ConvergenceError, DomainError

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes sit at odd positions of the Kronrod node set.
_GAUSS_INDEX = np.arange(1, 15, 2)
GAUSS_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and truncation limits for every numerical integral.

    ``abs_tol`` is in the units of the quantity being computed (Pa for
    pressures, N for sphere forces, J/m^2 for energies).  The imaginary
    frequency range is cut at ``xi_cutoff_factor * c / L``.  ``p_cutoff``
    truncates the p (or transverse wavenumber) integral where the decay
    exponent 2 (p - 1) xi L / c reaches this value, i.e. where the integrand
    has fallen by exp(-p_cutoff).
    """

    rel_tol: float = 1e-6
    abs_tol: float = 0.0
    max_subdivisions: int = 400
    xi_cutoff_factor: float = 30.0
    p_cutoff: float = 80.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.abs_tol < 0:
            raise DomainError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if self.max_subdivisions < 16:
            raise DomainError(f"max_subdivisions must be >= 16, got {self.max_subdivisions}")
        if self.xi_cutoff_factor < 20:
            raise DomainError(f"xi_cutoff_factor must be >= 20, got {self.xi_cutoff_factor}")
        if self.p_cutoff < 10:
            raise DomainError(f"p_cutoff must be >= 10, got {self.p_cutoff}")

    def tightened(self, factor: float = 10.0) -> "QuadratureSpec":
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evals: int
    converged: bool


def _panels(f, lo, hi):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = center[:, None] + half[:, None] * NODES[None, :]
    y = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise FloatingPointError(f"integrand is not finite at x={bad!r}")
    kronrod = half * (y @ KRONROD_WEIGHTS)
    gauss = half * (y[:, _GAUSS_INDEX] @ GAUSS_WEIGHTS)
    resabs = np.abs(half) * (np.abs(y) @ KRONROD_WEIGHTS)
    err = np.maximum(np.abs(kronrod - gauss), 50.0 * _EPS * resabs)
    return kronrod, err


def gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    rel_tol: float = 1e-8,
    abs_tol: float = 0.0,
    max_subdivisions: int = 400,
    breakpoints: Sequence[float] = (),
) -> QuadResult:
    """Globally adaptive G7-K15 quadrature of a vectorised integrand on [a, b].

    ``f`` receives a 1-D array of abscissae and must return values of the
    same shape.  Interior ``breakpoints`` become initial panel edges.  Panels
    whose error exceeds their width-proportional share of the tolerance are
    bisected together, so each refinement sweep costs one call of ``f``.
    ``max_subdivisions`` bounds the number of bisections, not panels.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if b == a:
        return QuadResult(0.0, 0.0, 0, True)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    inner = sorted({float(p) for p in breakpoints if a < p < b})
    edges = np.array([a, *inner, b])
    lo, hi = edges[:-1], edges[1:]
    val, err = _panels(f, lo, hi)
    evals = 15 * lo.size
    splits = 0
    width = b - a
    while True:
        total = float(np.sum(val))
        etot = float(np.sum(err))
        tol = max(abs_tol, rel_tol * abs(total))
        if etot <= tol:
            return QuadResult(sign * total, etot, evals, True)
        budget = max_subdivisions - splits
        share = tol * (hi - lo) / width
        splittable = (hi - lo) > 64 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        idx = np.nonzero((err > share) & splittable)[0]
        if budget <= 0 or idx.size == 0:
            return QuadResult(sign * total, etot, evals, False)
        if idx.size > budget:
            idx = idx[np.argsort(-err[idx], kind="stable")[:budget]]
            idx.sort()
        mid = 0.5 * (lo[idx] + hi[idx])
        new_lo = np.concatenate([lo[idx], mid])
        new_hi = np.concatenate([mid, hi[idx]])
        new_val, new_err = _panels(f, new_lo, new_hi)
        evals += 15 * new_lo.size
        splits += idx.size
        keep = np.ones(lo.size, dtype=bool)
        keep[idx] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
        order = np.argsort(lo, kind="stable")
        lo, hi, val, err = lo[order], hi[order], val[order], err[order]


def integrate_or_raise(f, a, b, *, what="integral", **kwargs) -> QuadResult:
    res = gauss_kronrod(f, a, b, **kwargs)
    if not res.converged:
        raise ConvergenceError(
            f"{what} did not converge: value={res.value:.6e}, error={res.error:.3e}",
            value=res.value,
            error=res.error,
        )
    return res


def _upper_gamma_int(n: int, y: float) -> float:
    """Gamma(n + 1, y) for integer n >= 0, closed form."""
    term = 1.0
    total = 1.0
    for k in range(1, n + 1):
        term *= y / k
        total += term
    return math.factorial(n) * math.exp(-y) * total


def exp_tail_bound(power: int, coeff: float, x0: float) -> float:
    """Bound on int_{x0}^inf coeff x**power e^-x / (1 - e^-x) dx."""
    return coeff * _upper_gamma_int(power, x0) / (-math.expm1(-x0))


_OUTER_BREAKS = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0)
_INNER_BREAKS = (0.5, 1.5, 4.0, 10.0, 25.0)


def imaginary_axis_integral(
    inner_factory: Callable[[float], Callable[[np.ndarray], np.ndarray]],
    quad: QuadratureSpec,
    *,
    majorant_power: int,
    majorant_coeff: float,
    abs_tol: float = 0.0,
) -> QuadResult:
    """Evaluate int_0^zmax dzeta int_{2zeta}^{2zeta+X} dx kernel(zeta, x).

    ``inner_factory(zeta)`` returns the vectorised kernel in x at one reduced
    frequency (material response is resolved once per zeta).  The kernel
    must be bounded in magnitude by majorant_coeff x**majorant_power
    e^-x / (1 - e^-x); that majorant bounds both truncated tails.
    ``abs_tol`` is in the dimensionless units of the integral.
    """
    zeta_max = quad.xi_cutoff_factor
    span = quad.p_cutoff
    # split the budget: outer quadrature 1/2, inner quadratures 1/20
    inner_rel = quad.rel_tol / 20.0
    inner_abs = abs_tol / (20.0 * zeta_max)
    evals = 0
    worst_inner_rel = 0.0
    inner_abs_err = 0.0

    def outer(zetas):
        nonlocal evals, worst_inner_rel, inner_abs_err
        out = np.empty_like(zetas)
        for i, zeta in enumerate(zetas):
            kernel = inner_factory(float(zeta))
            lo = 2.0 * zeta
            breaks = [lo + t for t in _INNER_BREAKS if t < span]
            res = integrate_or_raise(
                kernel, lo, lo + span,
                what=f"inner integral at zeta={zeta:.6g}",
                rel_tol=inner_rel,
                abs_tol=inner_abs,
                max_subdivisions=quad.max_subdivisions,
                breakpoints=breaks,
            )
            tail = exp_tail_bound(majorant_power, majorant_coeff, lo + span)
            evals += res.evals
            out[i] = res.value
            err = res.error + tail
            if res.value != 0.0:
                worst_inner_rel = max(worst_inner_rel, err / abs(res.value))
            else:
                inner_abs_err = max(inner_abs_err, err)
        return out

    breaks = [z for z in _OUTER_BREAKS if z < zeta_max]
    res = integrate_or_raise(
        outer, 0.0, zeta_max,
        what="frequency integral",
        rel_tol=0.5 * quad.rel_tol,
        abs_tol=0.5 * abs_tol,
        max_subdivisions=quad.max_subdivisions,
        breakpoints=breaks,
    )
    outer_tail = 0.5 * exp_tail_bound(majorant_power + 1, majorant_coeff, 2.0 * zeta_max)
    error = (
        res.error
        + worst_inner_rel * abs(res.value)
        + inner_abs_err * zeta_max
        + outer_tail
    )
    return QuadResult(res.value, error, evals, True)
