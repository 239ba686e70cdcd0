import math

import numpy as np
import pytest

from casimir.optics import OpticalTable, Tabulated, PowerTail, matching_drude_tail

ACCEPTANCE_LINES = []


def lorentz_eps_imag(x, x0, gamma, f):
    return f * gamma * x / ((x0**2 - x**2) ** 2 + gamma**2 * x**2)


def lorentz_eps_real(x, x0, gamma, f):
    return 1.0 + f * (x0**2 - x**2) / ((x0**2 - x**2) ** 2 + gamma**2 * x**2)


def lorentz_imag_axis(xi, x0, gamma, f):
    return 1.0 + f / (x0**2 + gamma * xi + xi**2)


def lorentz_model(x0=1e15, gamma=2e14, f=None, points=2000):
    """Single oscillator tabulated log-uniformly on [x0/100, 100 x0]."""
    f = x0**2 if f is None else f
    w = np.geomspace(x0 / 100, 100 * x0, points)
    table = OpticalTable(w, lorentz_eps_real(w, x0, gamma, f), lorentz_eps_imag(w, x0, gamma, f))
    low = matching_drude_tail(w[0], float(table.eps_imag[0]), gamma=x0)
    return Tabulated(table, low, PowerTail(3.0))


def random_conjugate_symmetric(rng, radius, margin=0.05):
    """Real-coefficient polynomial of degree <= 8 with no root near |z| = radius."""
    while True:
        roots = []
        degree = int(rng.integers(1, 9))
        while len(roots) < degree:
            r = rng.uniform(0.1, 2 * radius) * np.exp(1j * rng.uniform(0, np.pi))
            if len(roots) + 2 <= degree and rng.random() < 0.6:
                roots += [r, np.conj(r)]
            else:
                roots.append(complex(r.real, 0.0))
        roots = np.array(roots)
        if np.all(np.abs(np.abs(roots) - radius) > margin * radius):
            coeffs = np.real(np.poly(roots)) * rng.uniform(0.5, 3.0)
            return coeffs


@pytest.fixture(scope="session")
def lorentz():
    return lorentz_model


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
