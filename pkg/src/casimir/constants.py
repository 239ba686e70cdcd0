"""Exact SI constants used throughout (2019 SI / CODATA 2018)."""

import math

HBAR = 1.054571817e-34  # J s
C = 299792458.0  # m / s
E_CHARGE = 1.602176634e-19  # C

HBAR_C = HBAR * C  # J m

EV_TO_RAD_S = E_CHARGE / HBAR  # photon energy (eV) -> angular frequency (rad/s)

PA_TO_DYN_CM2 = 10.0

PI = math.pi
