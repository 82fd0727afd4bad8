"""Boundary conditions and inflow profiles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from ..errors import InvalidArgumentError
from ..units import lmin_to_m3s
from ..windkessel import WindkesselOutlet


# -- inflow waveform ---------------------------------------------------------

def pulsatile_waveform(CO_m3s, T, systole_fraction=0.35, plateau_ratio=0.05):
    """Synthetic cardiac inflow: a half-sine systolic pulse plus a low
    diastolic plateau, scaled so the period average equals ``CO_m3s``.

    Returns a callable Q(t) [m^3/s]. This is a parametric stand-in for a
    measured aortic waveform, not a reproduction of one.
    """
    if CO_m3s <= 0 or T <= 0:
        raise InvalidArgumentError("CO and T must be positive")
    ts = systole_fraction * T
    # mean = Qs*(2/pi)*sf + Qs*plateau*(1-sf)
    qs = CO_m3s / (2.0 / np.pi * systole_fraction + plateau_ratio * (1.0 - systole_fraction))
    qd = plateau_ratio * qs

    def q(t):
        tau = np.mod(t, T)
        return qs * np.sin(np.pi * tau / ts) if tau < ts else qd

    return q


# -- velocity conditions -----------------------------------------------------

@dataclass
class InflowBC:
    """Fixed-profile inflow through a patch.

    ``flow_rate`` is a volumetric rate [m^3/s], constant or callable of
    time. ``profile`` is "plug" or "parabolic"; the profile is rescaled so
    the discrete influx matches the requested rate exactly.
    """

    flow_rate: Union[float, Callable[[float], float]]
    profile: str = "plug"

    def rate(self, t):
        return self.flow_rate(t) if callable(self.flow_rate) else float(self.flow_rate)

    def face_velocities(self, mesh, patch, t):
        fids = patch.face_ids
        A = mesh.face_area[fids]            # outward
        xf = mesh.face_centroid[fids]
        n = A / np.linalg.norm(A, axis=1)[:, None]
        q = self.rate(t)
        if self.profile == "plug":
            shape = np.ones(len(fids))
        elif self.profile == "parabolic":
            meta = patch.meta
            if meta.get("kind2d") or mesh.dim == 2:
                c = np.asarray(meta.get("center", xf.mean(axis=0)))
                half = meta.get("half_width")
                if half is None:
                    r = np.linalg.norm(xf - xf.mean(axis=0), axis=1)
                    half = r.max() * 1.05
                    c = xf.mean(axis=0)
                r = np.linalg.norm(xf - c, axis=1)
                shape = np.clip(1.0 - (r / half) ** 2, 0.0, None)
            else:
                c = np.asarray(meta.get("center", xf.mean(axis=0)))
                R = meta.get("radius")
                if R is None:
                    R = np.linalg.norm(xf - c, axis=1).max() * 1.05
                r = np.linalg.norm(xf - c, axis=1)
                shape = np.clip(1.0 - (r / R) ** 2, 0.0, None)
        else:
            raise InvalidArgumentError(f"unknown inflow profile {self.profile!r}")
        u = -n * shape[:, None]
        influx = -np.einsum("ij,ij->", u, A)
        if influx <= 0:
            raise InvalidArgumentError("degenerate inflow patch")
        return u * (q / influx)


@dataclass
class NoSlipBC:
    def face_velocities(self, mesh, patch, t):
        return np.zeros((len(patch.face_ids), mesh.dim))


@dataclass
class VelocityZeroGradientBC:
    pass


# -- pressure conditions -----------------------------------------------------

@dataclass
class PressureZeroGradientBC:
    pass


@dataclass
class FixedPressureBC:
    value: float  # Pa


@dataclass
class WindkesselBC:
    """Couples a patch to a three-element RCR outlet model."""

    outlet: WindkesselOutlet


VELOCITY_BCS = (InflowBC, NoSlipBC, VelocityZeroGradientBC)
PRESSURE_BCS = (PressureZeroGradientBC, FixedPressureBC, WindkesselBC)


class BoundaryConditionSet:
    """Per-patch velocity + pressure condition, with global sanity checks."""

    def __init__(self, conditions):
        """``conditions``: dict patch name -> (velocity bc, pressure bc)."""
        self.conditions = dict(conditions)
        has_ref = False
        for name, (v, p) in self.conditions.items():
            if not isinstance(v, VELOCITY_BCS):
                raise InvalidArgumentError(f"patch {name}: bad velocity condition")
            if not isinstance(p, PRESSURE_BCS):
                raise InvalidArgumentError(f"patch {name}: bad pressure condition")
            if isinstance(p, (FixedPressureBC, WindkesselBC)):
                has_ref = True
        if not has_ref:
            raise InvalidArgumentError(
                "no pressure reference: need a fixed-value or Windkessel outlet")

    def validate_against(self, mesh):
        if set(self.conditions) != set(mesh.patches):
            raise InvalidArgumentError(
                f"boundary conditions {sorted(self.conditions)} do not match "
                f"mesh patches {sorted(mesh.patches)}")

    def velocity(self, name):
        return self.conditions[name][0]

    def pressure(self, name):
        return self.conditions[name][1]

    def windkessel_patches(self):
        return [n for n, (_, p) in self.conditions.items()
                if isinstance(p, WindkesselBC)]


def poiseuille_bcs(mesh, flow_rate, outlet_pressure=0.0, profile="parabolic"):
    """Convenience BC set for the pipe/channel test geometries."""
    conds = {}
    for name, patch in mesh.patches.items():
        if patch.kind == "inlet":
            conds[name] = (InflowBC(flow_rate, profile), PressureZeroGradientBC())
        elif patch.kind == "outlet":
            conds[name] = (VelocityZeroGradientBC(), FixedPressureBC(outlet_pressure))
        else:
            conds[name] = (NoSlipBC(), PressureZeroGradientBC())
    return BoundaryConditionSet(conds)
