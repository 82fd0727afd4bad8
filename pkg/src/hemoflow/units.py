"""Unit conversion constants.

Clinical quantities arrive in mmHg / l/min / CGS (dyne, cm); the solver
works in SI. Conversion factors are fixed project-wide so that table
reproduction is deterministic.
"""

MMHG_TO_PA = 133.322
MMHG_TO_DYN_CM2 = 1333.22
LMIN_TO_M3S = 1.6667e-5
LMIN_TO_CM3S = LMIN_TO_M3S * 1e6

# 1 dyne.s/cm^5 = 1e5 Pa.s/m^3 ; 1 cm^5/dyne = 1e-5 m^3/Pa
DYNSCM5_TO_PASM3 = 1.0e5
CM5DYN_TO_M3PA = 1.0e-5


def mmhg_to_pa(p):
    return p * MMHG_TO_PA


def pa_to_mmhg(p):
    return p / MMHG_TO_PA


def lmin_to_m3s(q):
    return q * LMIN_TO_M3S


def m3s_to_lmin(q):
    return q / LMIN_TO_M3S
