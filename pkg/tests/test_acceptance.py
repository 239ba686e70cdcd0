"""Acceptance criteria, one check per criterion.

Run with pytest (lines are collected into the terminal summary) or
directly with ``python tests/test_acceptance.py`` for a plain report.
Two criteria are known to be out of reach for any faithful implementation;
they are executed at their stated tolerance and marked xfail(strict=True),
so they show as FAIL in the report and the suite breaks if they ever pass.
"""

import math
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from conftest import ACCEPTANCE_LINES, lorentz_imag_axis, lorentz_model, random_conjugate_symmetric

from casimir.constants import C, PA_TO_DYN_CM2
from casimir.corrections import plasma_correction_factor, roughness_factor
from casimir.lifshitz import ParallelPlates, force_curve, ideal_pressure, lifshitz_pressure
from casimir.optics import (
    Constant,
    Drude,
    Plasma,
    Tabulated,
    eps_imag_axis,
    load_bundled_table,
    plasma_wavelength,
)
from casimir.quadrature import QuadratureSpec
from casimir.spectral import AnalyticFn, Circle, contour_count, count_zeros_poles, sum_zeros_poles, verify_realness
from casimir.thinfilm import LayeredCavity, fig2_point, film_pressure


def report(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{number}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def criterion_1():
    p = ideal_pressure(1e-6)
    dyn = p * PA_TO_DYN_CM2
    ok = abs(p / 1.3e-3 - 1) < 0.01 and abs(dyn / 0.013 - 1) < 0.01
    return report(1, "ideal plates at 1 um", ok, f"{p:.5e} Pa = {dyn:.5f} dyn/cm^2")


def criterion_2():
    parts, ok = [], True
    for d in (1e-7, 1e-6):
        t = time.perf_counter()
        value = lifshitz_pressure(d, Constant(1e8))[0]
        elapsed = time.perf_counter() - t
        dev = value / ideal_pressure(d) - 1
        ok &= abs(dev) < 1e-3 and elapsed < 10
        parts.append(f"d={d:g} m dev={dev:+.3e} ({elapsed:.2f} s)")
    return report(2, "constant eps=1e8 vs ideal within 0.1%", ok, "; ".join(parts))


def criterion_3():
    d, parts, ok = 1e-6, [], True
    for x in (0.01, 0.02, 0.05):
        wp = 2 * math.pi * C / (x * d)
        ratio = lifshitz_pressure(d, Plasma(wp))[0] / ideal_pressure(d)
        diff = abs(ratio - plasma_correction_factor(x * d, d, 2))
        ok &= diff < 0.01
        parts.append(f"lp/d={x}: |{ratio:.6f}-series|={diff:.2e}")
    return report(3, "plasma integral vs second-order series", ok, "; ".join(parts))


def criterion_4():
    d, parts, ok = 1e-7, [], False
    al = Tabulated(load_bundled_table("al"))
    for label, model in (("tabulated Al", al), ("Drude Al", al.low_tail)):
        lp = plasma_wavelength(model.low_tail.omega_p if isinstance(model, Tabulated)
                               else model.omega_p)
        full = lifshitz_pressure(d, model)[0] / ideal_pressure(d)
        series = plasma_correction_factor(lp, d, 2)
        rel = abs(full - series) / full
        ok |= 0.03 <= rel <= 0.08
        parts.append(f"{label} lp={lp * 1e9:.1f} nm full={full:.4f} series={series:.4f} "
                     f"diff={rel:.1%}")
    return report(4, "Al at 100 nm: integral and series differ by 3-8%", ok, "; ".join(parts))


def criterion_5():
    near = roughness_factor(30e-9, 100e-9)
    far = roughness_factor(30e-9, 600e-9)
    ok = math.isclose(near, 1.36, rel_tol=1e-14) and round(far, 2) == 1.01
    return report(5, "roughness factors", ok, f"A/d=0.3 -> {near!r}; A/d=0.05 -> {far:.4f}")


def criterion_6():
    au = Tabulated(load_bundled_table("au"))
    gaps = np.linspace(1e-7, 2e-7, 10)
    t = time.perf_counter()
    ratios = [fig2_point(g, 35e-9, au)["ratio"] for g in gaps]
    ok = all(0.35 <= r <= 0.65 for r in ratios)
    return report(6, "35 nm Au film effect ratio over 100-200 nm gaps", ok,
                  f"ratio in [{min(ratios):.4f}, {max(ratios):.4f}] "
                  f"({time.perf_counter() - t:.1f} s)")


def criterion_7():
    au = Tabulated(load_bundled_table("au"))
    parts, ok = [], True
    for d in (1e-7, 1e-6):
        bare = film_pressure(LayeredCavity(d, 0.0, au))[0] / ideal_pressure(d) - 1
        coated = (film_pressure(LayeredCavity(d, d / 2, Constant(1e8)))[0]
                  / ideal_pressure(d / 2) - 1)
        ok &= abs(bare) < 1e-3 and abs(coated) < 5e-3
        parts.append(f"d={d:g}: a=0 dev={bare:+.1e}, eps=1e8 a=d/2 dev={coated:+.2e}")
    return report(7, "thin-film limits", ok, "; ".join(parts))


def criterion_8():
    x0, gamma = 1e15, 2e14
    model = lorentz_model(x0, gamma)
    parts, ok = [], True
    for factor in (0.1, 1.0, 10.0):
        xi = factor * x0
        exact = lorentz_imag_axis(xi, x0, gamma, x0**2)
        rel = abs(eps_imag_axis(model, xi).eps - exact) / exact
        ok &= rel < 1e-3
        parts.append(f"xi={factor:g}x0 rel={rel:.1e}")
    return report(8, "Lorentz oscillator Kramers-Kronig", ok, "; ".join(parts))


def criterion_9():
    rng = np.random.default_rng(9)
    contour = Circle(0, 1.5)
    coeffs = [random_conjugate_symmetric(rng, 1.5) for _ in range(100)]
    realness = verify_realness(lambda i: AnalyticFn.polynomial(coeffs[i]), range(100), contour)
    worst_count, worst_sum, ok = 0.0, 0.0, realness.passed
    for c, s in zip(coeffs, realness.sums):
        roots = np.roots(c)
        inside = roots[np.abs(roots) < 1.5]
        fn = AnalyticFn.polynomial(c)
        residual = abs(contour_count(fn, contour).value - len(inside))
        worst_count = max(worst_count, residual)
        ok &= residual < 1e-3 and count_zeros_poles(fn, contour) == len(inside)
        expected = inside.sum()
        rel = abs(s - expected) / max(1.0, abs(expected))
        worst_sum = max(worst_sum, rel)
        ok &= rel < 1e-8
    return report(9, "argument principle on 100 random fixtures", ok,
                  f"max count residual {worst_count:.1e}, max sum error {worst_sum:.1e}, "
                  f"max |Im sum| {realness.max_imag:.1e}")


def _draw_model(rng, gold):
    kind = rng.integers(4)
    wp = rng.uniform(5e15, 3e16)
    if kind == 0:
        return Plasma(wp)
    if kind == 1:
        return Drude(wp, rng.uniform(1e13, 1e15))
    if kind == 2:
        return Constant(10 ** rng.uniform(0.2, 6))
    return gold


def criterion_10():
    rng = np.random.default_rng(10)
    gold = Tabulated(load_bundled_table("au"))
    q = QuadratureSpec(rel_tol=1e-5)
    n = 50
    decay = bound = order = kk = 0
    for _ in range(n):
        model = _draw_model(rng, gold)
        d = 10 ** rng.uniform(-7.5, -5.5)
        p1 = lifshitz_pressure(d, model, q)[0]
        p2 = lifshitz_pressure(d * rng.uniform(1.05, 3), model, q)[0]
        decay += 0 < p2 < p1
        bound += p1 < ideal_pressure(d)
    for _ in range(n):
        film = _draw_model(rng, gold)
        pt = fig2_point(10 ** rng.uniform(-7.5, -6), 10 ** rng.uniform(-9, -6.7), film, q)
        order += pt["f_nofilm"] <= pt["f_film"] <= pt["f_perfect"]
    for _ in range(n):
        model = _draw_model(rng, gold)
        xi = np.sort(10 ** rng.uniform(12, 18, 2))
        e1, e2 = (eps_imag_axis(model, x).eps for x in xi)
        kk += e1 >= e2 >= 1
    grid = np.sort(10 ** rng.uniform(-7.5, -5.5, n))
    serial = force_curve(grid, ParallelPlates(), gold, q)
    again = force_curve(grid, ParallelPlates(), gold, q)
    parallel = force_curve(grid, ParallelPlates(), gold, q, workers=4)
    determinism = (serial == again == parallel) * n
    counts = dict(decay=decay, bound=bound, fig2_order=order, kk_monotone=kk,
                  determinism=determinism)
    ok = all(v == n for v in counts.values())
    detail = ", ".join(f"{k} {v}/{n}" for k, v in counts.items())
    return report(10, "randomised property suite", ok, detail)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]

# |ratio - 1| for constant eps decays like ln(eps)/sqrt(eps) (1.9e-3 at eps = 1e8)
_SLOW_DIELECTRIC_LIMIT = ("a constant permittivity approaches the ideal mirror only as "
                          "ln(eps)/sqrt(eps) because low-frequency TE reflection vanishes")
# lp/d ~ 1 for Al at 100 nm, where the second-order series is far outside its range
_SERIES_DIVERGES = "the second-order series is several hundred percent off at lp/d ~ 1 for Al"


def test_criterion_1():
    assert criterion_1()


@pytest.mark.xfail(strict=True, reason=_SLOW_DIELECTRIC_LIMIT)
def test_criterion_2():
    assert criterion_2()


def test_criterion_3():
    assert criterion_3()


@pytest.mark.xfail(strict=True, reason=_SERIES_DIVERGES)
def test_criterion_4():
    assert criterion_4()


def test_criterion_5():
    assert criterion_5()


def test_criterion_6():
    assert criterion_6()


def test_criterion_7():
    assert criterion_7()


def test_criterion_8():
    assert criterion_8()


def test_criterion_9():
    assert criterion_9()


def test_criterion_10():
    assert criterion_10()


if __name__ == "__main__":
    results = [check() for check in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
