"""Permittivity models and Kramers-Kronig continuation to imaginary frequency.

Tabulated optical constants are continued to the imaginary axis with

    eps(i xi) = 1 + (2 / pi) int_0^inf x eps''(x) / (x**2 + xi**2) dx

split into a Drude extension below the table, log-log interpolation of
eps'' across the table, and a power-law tail above it.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Union

import numpy as np

from casimir.constants import C, EV_TO_RAD_S
from casimir.errors import DomainError, ParseError, UnsupportedModel, ValidationError
from casimir.quadrature import QuadratureSpec, gauss_kronrod

TABLE_FORMATS = {
    "omega_rad_s,eps_real,eps_imag": "omega",
    "energy_ev,eps_real,eps_imag": "energy",
    "energy_ev,n,k": "nk",
}

BUNDLED_TABLES = {
    "au": "gold_hagemann.csv",
    "gold": "gold_hagemann.csv",
    "al": "aluminum_hagemann.csv",
    "aluminum": "aluminum_hagemann.csv",
}

SPLICE_TOLERANCE = 0.20


@dataclass(frozen=True)
class OpticalTable:
    """Measured complex permittivity rows (omega in rad/s, eps', eps'')."""

    omega: np.ndarray
    eps_real: np.ndarray
    eps_imag: np.ndarray

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        eps_real = np.array(self.eps_real, dtype=float)
        eps_imag = np.array(self.eps_imag, dtype=float)
        if not (omega.ndim == eps_real.ndim == eps_imag.ndim == 1):
            raise ValidationError("table columns must be one-dimensional")
        if not (omega.size == eps_real.size == eps_imag.size):
            raise ValidationError("table columns differ in length")
        if omega.size < 2:
            raise ValidationError(f"an optical table needs at least 2 rows, got {omega.size}")
        if not np.all(np.isfinite(omega) & np.isfinite(eps_real) & np.isfinite(eps_imag)):
            raise ValidationError("table contains non-finite values")
        if np.any(omega <= 0):
            raise ValidationError("all frequencies must be > 0")
        if np.any(np.diff(omega) <= 0):
            raise ValidationError("frequencies must be strictly increasing")
        if np.any(eps_imag < 0):
            i = int(np.argmax(eps_imag < 0))
            raise ValidationError(
                f"eps_imag must be >= 0 (passive medium); row {i} has {eps_imag[i]}"
            )
        for name, arr in (("omega", omega), ("eps_real", eps_real), ("eps_imag", eps_imag)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.omega.size

    @property
    def omega_min(self) -> float:
        return float(self.omega[0])

    @property
    def omega_max(self) -> float:
        return float(self.omega[-1])

    def rows(self):
        return list(zip(self.omega.tolist(), self.eps_real.tolist(), self.eps_imag.tolist()))

    def __eq__(self, other):
        if not isinstance(other, OpticalTable):
            return NotImplemented
        return (
            np.array_equal(self.omega, other.omega)
            and np.array_equal(self.eps_real, other.eps_real)
            and np.array_equal(self.eps_imag, other.eps_imag)
        )

    def __hash__(self):
        return hash((self.omega.tobytes(), self.eps_real.tobytes(), self.eps_imag.tobytes()))


def load_table(source: Union[str, bytes, io.IOBase], format: str | None = None) -> OpticalTable:
    """Parse an optical-constant table.

    ``source`` may be text, bytes or a binary/text stream.  The first
    non-comment line is the column header and selects the format (see
    ``TABLE_FORMATS``); an explicit ``format`` must agree with it.  Rows are
    sorted by frequency after unit conversion.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    header = None
    header_line = None
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if header is None and not _looks_numeric(stripped):
            header = ",".join(c.strip().lower() for c in stripped.split(","))
            header_line = lineno
            continue
        cells = [c.strip() for c in stripped.split(",")]
        if len(cells) != 3:
            raise ParseError(f"expected 3 comma-separated values, got {len(cells)}", line=lineno)
        try:
            row = tuple(float(c) for c in cells)
        except ValueError:
            raise ParseError(f"could not parse {stripped!r} as numbers", line=lineno) from None
        values.append((lineno, row))

    if header is None:
        if format is None:
            raise ParseError("table has no header line and no format was given")
        header = format
    if header not in TABLE_FORMATS:
        raise ParseError(
            f"unknown table header {header!r}; expected one of {sorted(TABLE_FORMATS)}",
            line=header_line,
        )
    if format is not None and format != header:
        raise ParseError(f"header {header!r} does not match declared format {format!r}",
                         line=header_line)
    if not values:
        raise ParseError("table contains no data rows")

    kind = TABLE_FORMATS[header]
    data = np.array([row for _, row in values], dtype=float)
    lines = np.array([ln for ln, _ in values])
    if kind == "omega":
        omega, eps_real, eps_imag = data.T
    elif kind == "energy":
        omega = data[:, 0] * EV_TO_RAD_S
        eps_real, eps_imag = data[:, 1], data[:, 2]
    else:
        omega = data[:, 0] * EV_TO_RAD_S
        eps = (data[:, 1] + 1j * data[:, 2]) ** 2
        eps_real, eps_imag = eps.real, eps.imag

    bad = np.nonzero(eps_imag < 0)[0]
    if bad.size:
        raise ValidationError(
            f"line {lines[bad[0]]}: eps_imag = {eps_imag[bad[0]]} < 0 violates passivity"
        )
    order = np.argsort(omega, kind="stable")
    return OpticalTable(omega[order], eps_real[order], eps_imag[order])


def _looks_numeric(line):
    try:
        float(line.split(",")[0])
    except ValueError:
        return False
    return True


def load_bundled_table(name: str) -> OpticalTable:
    """Load one of the optical tables shipped with the package ('au', 'al')."""
    try:
        filename = BUNDLED_TABLES[name.lower()]
    except KeyError:
        raise DomainError(f"no bundled table {name!r}; available: {sorted(BUNDLED_TABLES)}") from None
    text = resources.files("casimir.data").joinpath(filename).read_text(encoding="utf-8")
    return load_table(text)


# -- models -----------------------------------------------------------------


@dataclass(frozen=True)
class PerfectConductor:
    """Ideal mirror; handled by closed-form limits, never through eps."""


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Constant:
    """Nondispersive medium with eps(i xi) = eps for every xi."""

    eps: float

    def __post_init__(self):
        if not self.eps >= 1:
            raise DomainError(f"a passive constant permittivity must be >= 1, got {self.eps}")


@dataclass(frozen=True)
class Plasma:
    """eps(omega) = 1 - omega_p**2 / omega**2."""

    omega_p: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise DomainError(f"omega_p must be > 0, got {self.omega_p}")


@dataclass(frozen=True)
class Drude:
    """eps(omega) = 1 - omega_p**2 / (omega (omega + i gamma))."""

    omega_p: float
    gamma: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise DomainError(f"omega_p must be > 0, got {self.omega_p}")
        if not self.gamma > 0:
            raise DomainError(f"gamma must be > 0, got {self.gamma}")

    def eps_imag_real_axis(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.omega_p**2 * self.gamma / (omega * (omega**2 + self.gamma**2))


DrudeTail = Drude


@dataclass(frozen=True)
class PowerTail:
    """eps''(omega) = eps''(omega_max) (omega / omega_max)**(-exponent) above the table."""

    exponent: float = 3.0

    def __post_init__(self):
        if not self.exponent >= 2:
            raise DomainError(f"high-frequency tail exponent must be >= 2, got {self.exponent}")


def fit_drude_tail(table: OpticalTable, rows: int = 2) -> Drude:
    """Least-squares Drude parameters from the lowest-frequency rows.

    For a Drude metal 1 / (1 - eps) = (omega**2 + i gamma omega) / omega_p**2,
    so the real part is linear in omega**2 and the imaginary part linear in
    omega, both through the origin.
    """
    w = table.omega[:rows]
    eps = table.eps_real[:rows] + 1j * table.eps_imag[:rows]
    inv = 1.0 / (1.0 - eps)
    if np.any(inv.real <= 0) or np.any(inv.imag <= 0):
        raise ValidationError(
            "lowest table rows are not Drude-like (need eps' < 1 and eps'' > 0); "
            "supply low_tail explicitly"
        )
    inv_wp2 = np.sum(inv.real * w**2) / np.sum(w**4)
    gamma_over_wp2 = np.sum(inv.imag * w) / np.sum(w**2)
    omega_p = 1.0 / math.sqrt(inv_wp2)
    gamma = gamma_over_wp2 / inv_wp2
    return Drude(omega_p, gamma)


def matching_drude_tail(omega: float, eps_imag: float, gamma: float) -> Drude:
    """Drude tail with the given damping whose eps'' equals ``eps_imag`` at ``omega``."""
    return Drude(math.sqrt(eps_imag * omega * (omega**2 + gamma**2) / gamma), gamma)


@dataclass(frozen=True)
class Tabulated:
    """Measured eps'' with Drude extension below and power-law extension above."""

    table: OpticalTable
    low_tail: Drude = None
    high_tail: PowerTail = field(default_factory=PowerTail)

    def __post_init__(self):
        if self.low_tail is None:
            object.__setattr__(self, "low_tail", fit_drude_tail(self.table))
        if not isinstance(self.low_tail, Drude):
            raise ValidationError("low_tail must be a Drude tail")
        w0 = self.table.omega_min
        measured = self.table.eps_imag[0]
        tail = float(self.low_tail.eps_imag_real_axis(w0))
        if measured <= 0 or abs(tail - measured) > SPLICE_TOLERANCE * measured:
            raise ValidationError(
                f"Drude low tail gives eps''={tail:.4g} at {w0:.4g} rad/s but the table has "
                f"{measured:.4g} (mismatch above {SPLICE_TOLERANCE:.0%})"
            )


PermittivityModel = Union[PerfectConductor, Vacuum, Constant, Plasma, Drude, Tabulated]


@dataclass(frozen=True)
class KkResult:
    xi: float
    eps: float
    err_estimate: float


# -- Kramers-Kronig ------------------------------------------------------------


def _drude_kk_segment(tail: Drude, xi: float, upper: float) -> float:
    """int_0^upper x eps''_Drude(x) / (x^2 + xi^2) dx in closed form."""
    g = tail.gamma
    pref = tail.omega_p**2 * g
    if abs(xi - g) > 1e-6 * max(xi, g):
        inner = (math.atan(upper / g) / g - math.atan(upper / xi) / xi) / (xi**2 - g**2)
    else:
        # limit xi -> gamma: int_0^u dx / (x^2 + g^2)^2
        inner = (math.atan(upper / g) / g + upper / (upper**2 + g**2)) / (2 * g**2)
    return pref * inner


def _loglog_eps_imag(table: OpticalTable):
    lw = np.log(table.omega)
    ei = table.eps_imag
    positive = ei > 0
    le = np.where(positive, np.log(np.where(positive, ei, 1.0)), -np.inf)

    def eps_imag(u):
        # u = ln(omega), inside [ln omega_min, ln omega_max]
        j = np.clip(np.searchsorted(lw, u, side="right") - 1, 0, lw.size - 2)
        t = (u - lw[j]) / (lw[j + 1] - lw[j])
        both = positive[j] & positive[j + 1]
        loglog = np.exp(le[j] * (1 - t) + np.where(both, le[j + 1], 0.0) * t)
        linear = ei[j] * (1 - t) + ei[j + 1] * t
        return np.where(both, loglog, linear)

    return eps_imag


def _tabulated_kk(model: Tabulated, xi: float, quad: QuadratureSpec) -> KkResult:
    table = model.table
    w_lo, w_hi = table.omega_min, table.omega_max
    interp = _loglog_eps_imag(table)
    rel = quad.rel_tol / 10.0

    low = _drude_kk_segment(model.low_tail, xi, w_lo)

    def body(u):
        x = np.exp(u)
        return x * x * interp(u) / (x * x + xi * xi)

    lw = np.log(table.omega)
    breaks = list(lw[1:-1])
    if w_lo < xi < w_hi:
        breaks.append(math.log(xi))
    mid = gauss_kronrod(body, lw[0], lw[-1], rel_tol=rel,
                        max_subdivisions=quad.max_subdivisions, breakpoints=breaks)

    p = model.high_tail.exponent
    amp = float(table.eps_imag[-1])
    ratio = xi / w_hi

    def tail(t):
        return t ** (p - 1.0) / (1.0 + (ratio * t) ** 2)

    high = gauss_kronrod(tail, 0.0, 1.0, rel_tol=rel, max_subdivisions=quad.max_subdivisions,
                         breakpoints=[1.0 / ratio] if ratio > 1 else ())
    k = 2.0 / math.pi
    eps = 1.0 + k * (low + mid.value + amp * high.value)
    err = k * (mid.error + amp * high.error) + 4 * np.finfo(float).eps * eps
    return KkResult(xi, eps, err)


def eps_imag_axis(model: PermittivityModel, xi: float,
                  quad: QuadratureSpec | None = None) -> KkResult:
    """Permittivity on the imaginary frequency axis, eps(i xi), for xi > 0 (rad/s)."""
    if not xi > 0 or not math.isfinite(xi):
        raise DomainError(f"xi must be a finite positive frequency, got {xi}")
    if isinstance(model, PerfectConductor):
        raise UnsupportedModel(
            "a perfect conductor has no finite eps(i xi); use the ideal closed forms"
        )
    if isinstance(model, Vacuum):
        return KkResult(xi, 1.0, 0.0)
    if isinstance(model, Constant):
        return KkResult(xi, float(model.eps), 0.0)
    if isinstance(model, Plasma):
        return KkResult(xi, 1.0 + (model.omega_p / xi) ** 2, 0.0)
    if isinstance(model, Drude):
        return KkResult(xi, 1.0 + model.omega_p**2 / (xi * (xi + model.gamma)), 0.0)
    if isinstance(model, Tabulated):
        return _tabulated_kk(model, xi, quad or QuadratureSpec())
    if isinstance(model, MemoizedPermittivity):
        return model.lookup(xi, quad)
    raise UnsupportedModel(f"unknown permittivity model {type(model).__name__}")


def eps_imag_axis_many(model: PermittivityModel, xis: Iterable[float],
                       quad: QuadratureSpec | None = None) -> list[KkResult]:
    return [eps_imag_axis(model, float(x), quad) for x in xis]


class MemoizedPermittivity:
    """Caches eps(i xi) per frequency for one run; results are the uncached floats.

    Instances are accepted wherever a permittivity model is, so a tabulated
    material can be wrapped once and handed to the force routines.
    """

    def __init__(self, model: PermittivityModel, quad: QuadratureSpec | None = None):
        self.model = model
        self.quad = quad
        self._cache: dict[tuple, KkResult] = {}
        self.hits = 0

    def lookup(self, xi: float, quad: QuadratureSpec | None = None) -> KkResult:
        quad = quad or self.quad
        key = (float(xi), quad)
        got = self._cache.get(key)
        if got is None:
            got = self._cache[key] = eps_imag_axis(self.model, xi, quad)
        else:
            self.hits += 1
        return got

    def __call__(self, xi: float) -> float:
        return self.lookup(xi).eps


def plasma_wavelength(omega_p: float) -> float:
    """Plasma wavelength 2 pi c / omega_p in metres."""
    if not omega_p > 0:
        raise DomainError(f"omega_p must be > 0, got {omega_p}")
    return 2.0 * math.pi * C / omega_p


def model_plasma_frequency(model: PermittivityModel) -> float | None:
    """The free-electron plasma frequency of a metallic model, if it has one."""
    if isinstance(model, (Plasma, Drude)):
        return model.omega_p
    if isinstance(model, Tabulated):
        return model.low_tail.omega_p
    if isinstance(model, MemoizedPermittivity):
        return model_plasma_frequency(model.model)
    return None
