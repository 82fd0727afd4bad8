"""Three-element (RCR) Windkessel outlet models and their estimation
from routine clinical measurements.

Estimation works in clinical/CGS units (mmHg, l/min, dyne.s/cm^5); the
solver coupling converts to SI at the interface. Resistances split as a
parallel circuit over the outlet cross-sectional areas, with a fixed
proximal fraction R_p/R = 0.056. Total compliance is distributed over the
same areas.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import InvalidArgumentError
from .units import (
    MMHG_TO_DYN_CM2,
    LMIN_TO_CM3S,
    DYNSCM5_TO_PASM3,
    CM5DYN_TO_M3PA,
)

PROXIMAL_FRACTION = 0.056


@dataclass
class ClinicalRecord:
    """One RHC/ECHO measurement set (pre- or post-surgery)."""

    configuration: str                  # "pre" | "post"
    PAM: float                          # mmHg
    PAS: Optional[float] = None         # mmHg
    PAD: Optional[float] = None         # mmHg
    CO: Optional[float] = None          # l/min  (pre)
    SV: Optional[float] = None          # ml     (pre)
    PF: Optional[float] = None          # l/min  (post)
    omega: Optional[float] = None       # rpm    (post)

    def __post_init__(self):
        if self.configuration not in ("pre", "post"):
            raise InvalidArgumentError("configuration must be 'pre' or 'post'")
        for name in ("PAM", "PAS", "PAD", "CO", "SV", "PF", "omega"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise InvalidArgumentError(f"{name} must be positive")
        if self.PAS is not None and self.PAD is not None:
            if not (self.PAD <= self.PAM <= self.PAS):
                raise InvalidArgumentError("expected PAD <= PAM <= PAS")
        if self.configuration == "pre" and (self.CO is None or self.SV is None):
            raise InvalidArgumentError("pre-surgery record requires CO and SV")
        if self.configuration == "post" and self.PF is None:
            raise InvalidArgumentError("post-surgery record requires PF")


@dataclass
class OutletGeometry:
    name: str
    area: float  # cm^2

    def __post_init__(self):
        if self.area <= 0:
            raise InvalidArgumentError("outlet area must be positive")


@dataclass
class WindkesselOutlet:
    """RCR outlet: proximal/distal resistance, compliance, and the stored
    proximal-node pressure state. Distal pressure is pinned to zero.

    Units: resistances dyne.s/cm^5, compliance cm^5/dyne, pressures
    dyn/cm^2, flow cm^3/s.
    """

    name: str
    R_p: float
    R_d: float
    C: float
    p_p: float = 0.0        # proximal node pressure [dyn/cm^2]
    p_d: float = 0.0        # fixed distal pressure

    def __post_init__(self):
        if min(self.R_p, self.R_d, self.C) <= 0:
            raise InvalidArgumentError("R_p, R_d, C must be positive")

    # unit views ------------------------------------------------------------
    @property
    def p_p_mmhg(self):
        return self.p_p / MMHG_TO_DYN_CM2

    def to_si(self):
        """(R_p, R_d, C) in Pa.s/m^3 and m^3/Pa."""
        return (self.R_p * DYNSCM5_TO_PASM3,
                self.R_d * DYNSCM5_TO_PASM3,
                self.C * CM5DYN_TO_M3PA)

    @classmethod
    def from_si(cls, name, R_p_si, R_d_si, C_si, p_p_pa=0.0):
        return cls(name, R_p_si / DYNSCM5_TO_PASM3, R_d_si / DYNSCM5_TO_PASM3,
                   C_si / CM5DYN_TO_M3PA, p_p=p_p_pa * 10.0)

    def pressure_pa(self, Q_m3s):
        """Downstream boundary pressure p = p_p + R_p Q, in Pa."""
        q = Q_m3s * 1e6  # cm^3/s
        return (self.p_p + self.R_p * q) * 0.1  # dyn/cm^2 -> Pa


def cardiac_period(SV, CO):
    """Cardiac period T = SV/CO, with SV in ml and CO in l/min."""
    if SV <= 0 or CO <= 0:
        raise InvalidArgumentError("SV and CO must be positive")
    return SV / (CO * LMIN_TO_CM3S / 1.0)  # ml / (cm^3/s) = s


def systemic_resistance(record: ClinicalRecord):
    """Mean pressure over mean flow, in dyne.s/cm^5."""
    pam = record.PAM * MMHG_TO_DYN_CM2
    if record.configuration == "pre":
        q = record.CO
    else:
        q = record.PF
    if q is None:
        raise InvalidArgumentError("record lacks the flow for its configuration")
    return pam / (q * LMIN_TO_CM3S)


def total_compliance(PAS, PAD, SV):
    """Total arterial compliance SV/(PAS - PAD) in cm^5/dyne.

    The ratio is stroke volume over pulse pressure; the units follow from
    ml / (mmHg -> dyn/cm^2).
    """
    if SV <= 0:
        raise InvalidArgumentError("SV must be positive")
    if PAS <= PAD:
        raise InvalidArgumentError("PAS must exceed PAD")
    return SV / ((PAS - PAD) * MMHG_TO_DYN_CM2)


def estimate_outlet_set(record: ClinicalRecord, outlets, total_C=None,
                        initial_pressure_from_record=True):
    """Estimate one RCR triple per outlet from a clinical record.

    R_k = RVS * (sum A)/A_k, split R_p/R = 0.056; C_k = C * A_k/(sum A).
    ``total_C`` defaults to the compliance computed from the record's
    PAS/PAD/SV (pre-surgery); post-surgery records reuse a supplied
    pre-surgery value.
    """
    if not outlets:
        raise InvalidArgumentError("need at least one outlet")
    rvs = systemic_resistance(record)
    if total_C is None:
        if record.PAS is None or record.PAD is None or record.SV is None:
            raise InvalidArgumentError(
                "total_C not given and record lacks PAS/PAD/SV to estimate it")
        total_C = total_compliance(record.PAS, record.PAD, record.SV)
    sum_a = sum(o.area for o in outlets)
    p0 = record.PAM * MMHG_TO_DYN_CM2 if initial_pressure_from_record else 0.0
    result = []
    for o in outlets:
        r_k = rvs * sum_a / o.area
        r_p = PROXIMAL_FRACTION * r_k
        result.append(WindkesselOutlet(
            name=o.name, R_p=r_p, R_d=r_k - r_p,
            C=total_C * o.area / sum_a, p_p=p0))
    return result


def advance_outlet(outlet: WindkesselOutlet, Q_n, dt):
    """One implicit first-order step of the RCR model.

    ``Q_n`` in cm^3/s, ``dt`` in s. Updates the stored proximal pressure and
    returns (outlet, p_next) with p_next = p_p^{n+1} + R_p Q_n  [dyn/cm^2].
    """
    if dt <= 0:
        raise InvalidArgumentError("dt must be positive")
    c_dt = outlet.C / dt
    outlet.p_p = (c_dt * outlet.p_p + Q_n) / (c_dt + 1.0 / outlet.R_d)
    return outlet, outlet.p_p + outlet.R_p * Q_n


# -- table I/O ----------------------------------------------------------------

def read_outlet_areas(path):
    """CSV with header ``name, area_cm2`` -> list of OutletGeometry."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(OutletGeometry(row["name"].strip(), float(row["area_cm2"])))
    return out


def write_coefficients_csv(outlets, path):
    """Emit the estimated coefficients in a diffable table layout."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "Rp_dyn_s_cm5", "Rd_dyn_s_cm5", "C_cm5_dyn"])
        for o in outlets:
            w.writerow([o.name, f"{o.R_p:.6g}", f"{o.R_d:.6g}", f"{o.C:.6g}"])
