import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import dblquad

from casimir.constants import C, HBAR, HBAR_C
from casimir.errors import ConvergenceError, DomainError, UnsupportedModel
from casimir.lifshitz import (
    ForceCurveError,
    ParallelPlates,
    SpherePlate,
    force_curve,
    ideal_energy,
    ideal_pressure,
    ideal_sphere_force,
    lifshitz_energy,
    lifshitz_pressure,
    pft_force,
)
from casimir.optics import (
    Constant,
    Drude,
    MemoizedPermittivity,
    PerfectConductor,
    Plasma,
    Tabulated,
    Vacuum,
    load_bundled_table,
)
from casimir.quadrature import QuadratureSpec

GOLD = Tabulated(load_bundled_table("au"))


def test_ideal_pressure_values():
    assert ideal_pressure(1e-6) == pytest.approx(1.3e-3, rel=1e-2)
    assert ideal_pressure(1e-7) == pytest.approx(13.0, rel=1e-2)
    assert ideal_pressure(5e-7) / ideal_pressure(1e-6) == pytest.approx(16.0, rel=1e-14)
    with pytest.raises(DomainError):
        ideal_pressure(0.0)


def test_ideal_sphere_force():
    f = ideal_sphere_force(1e-6, 0.125)
    assert f == pytest.approx(3.4e-10, rel=0.02)
    assert ideal_sphere_force(1e-6, 0.25) == pytest.approx(2 * f, rel=1e-15)
    assert pft_force(ideal_energy, 1e-6, 0.125) == pytest.approx(f, rel=1e-14)
    assert pft_force(lambda d: 2.5e-9, 1e-6, 0.1) == pytest.approx(2 * math.pi * 0.1 * 2.5e-9)
    with pytest.warns(UserWarning):
        ideal_sphere_force(1e-3, 0.05)
    with pytest.raises(DomainError):
        ideal_sphere_force(1e-6, 0.0)


def test_vacuum_is_exactly_zero():
    assert lifshitz_pressure(1e-7, Vacuum()) == (0.0, 0.0, 0)
    assert lifshitz_pressure(1e-7, Constant(1.0)) == (0.0, 0.0, 0)


def test_perfect_conductor_rejected():
    with pytest.raises(UnsupportedModel):
        lifshitz_pressure(1e-7, PerfectConductor())


def _reference_pressure(d, eps):
    """Plain-variable double integral over (xi, p), evaluated with scipy."""

    def integrand(p, xi):
        s = math.sqrt(eps - 1 + p * p)
        e = math.exp(-2 * p * xi * d / C)
        r_te = ((s - p) / (s + p)) ** 2
        r_tm = ((s - eps * p) / (s + eps * p)) ** 2
        return p * p * xi**3 * (r_te * e / (1 - r_te * e) + r_tm * e / (1 - r_tm * e))

    # p runs until the decay exponent 2 p xi d / c reaches ~80
    val, _ = dblquad(integrand, 1e-7 * C / d, 40 * C / d, 1.0, lambda xi: 1.0 + 40 * C / (xi * d),
                     epsrel=1e-9)
    return HBAR / (2 * math.pi**2 * C**3) * val


@pytest.mark.parametrize("eps", [4.0, 1e3])
def test_against_independent_double_integral(eps):
    d = 2e-7
    got, err, _ = lifshitz_pressure(d, Constant(eps), QuadratureSpec(rel_tol=1e-8))
    assert got == pytest.approx(_reference_pressure(d, eps), rel=1e-5)


@pytest.mark.parametrize("k", [4, 5, 6, 7, 8])
def test_high_permittivity_limit_bound(k):
    # measured deviation is close to ln(eps)/sqrt(eps); 10 % headroom
    eps = 10.0**k
    ratio = lifshitz_pressure(1e-6, Constant(eps))[0] / ideal_pressure(1e-6)
    assert 0 < 1 - ratio < 1.1 * math.log(eps) / math.sqrt(eps)


def test_high_permittivity_limit_is_monotone():
    ratios = [lifshitz_pressure(1e-7, Constant(10.0**k))[0] / ideal_pressure(1e-7)
              for k in range(4, 9)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 1


def test_plasma_energy_force_below_ideal():
    model = Plasma(1.37e16)
    d, R = 2e-7, 0.1
    f = pft_force(lambda x: lifshitz_energy(x, model)[0], d, R)
    assert 0 < f < ideal_sphere_force(d, R)


def test_energy_is_integrated_pressure():
    model = Drude(1.37e16, 5e13)
    d, h = 3e-7, 3e-10
    e_minus = lifshitz_energy(d - h, model, QuadratureSpec(rel_tol=1e-9))[0]
    e_plus = lifshitz_energy(d + h, model, QuadratureSpec(rel_tol=1e-9))[0]
    p = lifshitz_pressure(d, model)[0]
    # E < 0 grows towards zero with d, so dE/dd = pressure magnitude
    assert (e_plus - e_minus) / (2 * h) == pytest.approx(p, rel=1e-4)


def test_energy_matches_ideal_for_high_permittivity():
    e, _, _ = lifshitz_energy(1e-6, Constant(1e8))
    assert e / ideal_energy(1e-6) == pytest.approx(1.0, abs=3e-3)


def test_convergence_on_tightening():
    q = QuadratureSpec(rel_tol=1e-5)
    for model in (Plasma(1.37e16), GOLD):
        v1, e1, _ = lifshitz_pressure(1.5e-7, model, q)
        v2, _, _ = lifshitz_pressure(1.5e-7, model, q.tightened(2.0))
        assert abs(v2 - v1) < e1
        assert e1 <= 1e-5 * v1


def test_error_estimate_covers_true_error():
    q = QuadratureSpec(rel_tol=1e-4)
    v, err, _ = lifshitz_pressure(1e-7, Plasma(1e16), q)
    ref, _, _ = lifshitz_pressure(1e-7, Plasma(1e16), QuadratureSpec(rel_tol=1e-10))
    assert abs(v - ref) <= err


def test_tight_budget_raises_convergence_error():
    q = QuadratureSpec(rel_tol=1e-14, max_subdivisions=16)
    with pytest.raises(ConvergenceError):
        lifshitz_pressure(1e-7, GOLD, q)


_materials = st.sampled_from([
    ("plasma", None), ("drude", None), ("constant", None), ("gold", GOLD),
])


def _model(kind, wp, gamma, eps):
    return {"plasma": Plasma(wp), "drude": Drude(wp, gamma), "constant": Constant(eps)}[kind]


@settings(max_examples=50, deadline=None)
@given(kind=_materials, d=st.floats(3e-8, 5e-6), scale=st.floats(1.05, 3.0),
       wp=st.floats(5e15, 3e16), gamma=st.floats(1e13, 1e15), eps=st.floats(1.5, 1e6))
def test_monotone_decay_and_ideal_bound(kind, d, scale, wp, gamma, eps):
    name, fixed = kind
    model = fixed or _model(name, wp, gamma, eps)
    q = QuadratureSpec(rel_tol=1e-5)
    p1 = lifshitz_pressure(d, model, q)[0]
    p2 = lifshitz_pressure(d * scale, model, q)[0]
    assert 0 < p2 < p1
    assert p1 < ideal_pressure(d)
    assert p2 < ideal_pressure(d * scale)


def test_force_curve_plates_and_sphere():
    grid = [1e-7, 2e-7, 4e-7]
    curve = force_curve(grid, ParallelPlates(), Plasma(1.37e16))
    v = curve.values()
    assert list(curve.distances()) == grid
    assert np.all(np.diff(v) < 0)
    sphere = force_curve(grid, SpherePlate(0.1), Plasma(1.37e16))
    assert np.all(sphere.values() < [ideal_sphere_force(d, 0.1) for d in grid])
    single = force_curve([1e-6], ParallelPlates(), Constant(1e8))
    assert single.points[0].value == pytest.approx(1.3e-3, rel=1e-2)


def test_force_curve_perfect_conductor_uses_closed_forms():
    curve = force_curve([1e-6], SpherePlate(0.125), PerfectConductor())
    assert curve.points[0].value == ideal_sphere_force(1e-6, 0.125)


def test_force_curve_validation_and_aggregation():
    with pytest.raises(DomainError):
        force_curve([], ParallelPlates(), Plasma(1e16))
    with pytest.raises(DomainError):
        force_curve([2e-7, 1e-7], ParallelPlates(), Plasma(1e16))
    q = QuadratureSpec(rel_tol=1e-14, max_subdivisions=16)
    with pytest.raises(ForceCurveError) as info:
        force_curve([1e-7, 2e-7], ParallelPlates(), GOLD, q)
    assert set(info.value.failures) == {0, 1}
    assert all(isinstance(e, ConvergenceError) for e in info.value.failures.values())


def test_sphere_grid_warns_for_large_separation():
    with pytest.warns(UserWarning):
        force_curve([1e-4], SpherePlate(1e-3), Plasma(1e16))


def test_force_curve_deterministic_serial_and_parallel():
    rng = np.random.default_rng(7)
    grid = np.sort(rng.uniform(5e-8, 2e-6, 6))
    a = force_curve(grid, ParallelPlates(), GOLD)
    b = force_curve(grid, ParallelPlates(), GOLD)
    c = force_curve(grid, ParallelPlates(), GOLD, workers=3)
    assert a == b == c


def test_memoised_model_gives_identical_curve():
    grid = [1e-7, 3e-7]
    plain = force_curve(grid, ParallelPlates(), GOLD)
    memo = force_curve(grid, ParallelPlates(), MemoizedPermittivity(GOLD))
    assert plain.values().tolist() == memo.values().tolist()
