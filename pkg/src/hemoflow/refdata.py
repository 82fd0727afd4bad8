"""Reference patient dataset and published coefficient tables.

Bundled clinical measurements (RHC/ECHO) for one LVAD recipient — the
pre-surgery record and four post-surgery working points — together with
the outlet cross-sections and the coefficient tables published for this
case. The ``validate`` command and the regression suite check the
estimators in :mod:`hemoflow.windkessel` against these numbers.
"""

from __future__ import annotations

from .windkessel import ClinicalRecord, OutletGeometry

#: Pre-surgery RHC/ECHO record (pressures mmHg, CO l/min, SV ml).
PRE_RECORD = ClinicalRecord(configuration="pre", PAS=108.0, PAD=66.0,
                            PAM=78.0, CO=5.63, SV=55.0)

#: Post-surgery working points: PF [l/min], pump speed [rpm], PAM [mmHg].
POST_RECORDS = {
    "test1": ClinicalRecord(configuration="post", PAM=78.0, PF=4.1, omega=5400.0),
    "test2": ClinicalRecord(configuration="post", PAM=90.0, PF=4.2, omega=5600.0),
    "test3": ClinicalRecord(configuration="post", PAM=100.0, PF=4.5, omega=6000.0),
    "test4": ClinicalRecord(configuration="post", PAM=83.0, PF=5.0, omega=5600.0),
}

#: Boundary cross-sections [cm^2]. The first two are inlets (ascending
#: aorta pre-surgery, outflow cannula post-surgery); the rest are outlets.
INLET_AREAS = {"ascending_aorta": 6.42, "outflow_cannula": 1.3}

OUTLETS = [
    OutletGeometry("right_subclavian", 0.156),
    OutletGeometry("right_common_carotid", 0.246),
    OutletGeometry("left_common_carotid", 0.168),
    OutletGeometry("left_subclavian", 0.446),
    OutletGeometry("descending_aorta", 3.68),
]

#: Published derived quantities: cardiac period [s], systemic resistance
#: [dyn s/cm^5] per record, total compliance [cm^5/dyn].
PUBLISHED_PERIOD = 0.586
PUBLISHED_RVS = {"pre": 1105.0, "test1": 1522.0, "test2": 1714.0,
                 "test3": 1778.0, "test4": 1328.0}
PUBLISHED_COMPLIANCE = 9.85e-4

#: Published per-outlet Windkessel coefficients, pre-surgery:
#: name -> (R_p [dyn s/cm^5], R_d [dyn s/cm^5], C [cm^5/dyn]).
PUBLISHED_PRE_COEFFICIENTS = {
    "right_subclavian": (1.84e3, 3.11e4, 3.26e-5),
    "right_common_carotid": (1.23e3, 2.07e4, 5.16e-5),
    "left_common_carotid": (1.78e3, 3.01e4, 3.52e-5),
    "left_subclavian": (7.09e2, 1.19e4, 9.35e-5),
    "descending_aorta": (7.8e1, 1.31e3, 7.72e-4),
}

#: Published per-outlet resistances, post-surgery: test -> name -> (R_p, R_d).
PUBLISHED_POST_COEFFICIENTS = {
    "test1": {
        "right_subclavian": (2.56e3, 4.32e4),
        "right_common_carotid": (1.63e3, 2.74e4),
        "left_common_carotid": (2.38e3, 4.0e4),
        "left_subclavian": (8.96e2, 1.51e4),
        "descending_aorta": (1.08e2, 1.83e3),
    },
    "test2": {
        "right_subclavian": (2.88e3, 4.86e4),
        "right_common_carotid": (1.83e3, 3.08e4),
        "left_common_carotid": (2.68e3, 4.51e4),
        "left_subclavian": (1.01e3, 1.7e4),
        "descending_aorta": (1.22e2, 2.06e3),
    },
    "test3": {
        "right_subclavian": (2.99e3, 5.05e4),
        "right_common_carotid": (1.9e3, 3.2e4),
        "left_common_carotid": (2.78e3, 4.68e4),
        "left_subclavian": (1.04e3, 1.76e4),
        "descending_aorta": (1.27e2, 2.14e3),
    },
    "test4": {
        "right_subclavian": (2.19e3, 3.68e4),
        "right_common_carotid": (1.39e3, 2.33e4),
        "left_common_carotid": (2.03e3, 3.42e4),
        "left_subclavian": (7.64e2, 1.29e4),
        "descending_aorta": (9.25e1, 1.56e3),
    },
}

#: Published pump heads [mmHg] at the four post-surgery working points.
PUBLISHED_PUMP_HEADS = {"test1": 75.0, "test2": 81.3, "test3": 93.3,
                        "test4": 70.4}

#: Published inlet Reynolds numbers, post-surgery (cannula inlet).
PUBLISHED_REYNOLDS = {"test1": 1818.0, "test2": 1862.0, "test3": 1995.0,
                      "test4": 2217.0}
