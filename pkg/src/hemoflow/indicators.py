"""Hemodynamic indicators and error metrics.

Wall shear stress and its time average, inlet Reynolds numbers, volume
averaged pressure with systolic/diastolic/mean extraction, and the two
comparison metrics used for validation (weighted absolute percentage
error and relative L2 field error).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, UndefinedMetricError


@dataclass
class BoundaryField:
    """Per-face values on one patch, with the face areas for weighting."""

    patch: str
    values: np.ndarray      # (nfaces,) or (nfaces, dim)
    face_areas: np.ndarray  # (nfaces,) magnitudes

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.face_areas = np.asarray(self.face_areas, dtype=float)
        if self.values.shape[0] != self.face_areas.shape[0]:
            raise InvalidArgumentError("value count must match face count")

    def magnitude(self):
        if self.values.ndim == 1:
            return np.abs(self.values)
        return np.linalg.norm(self.values, axis=1)

    def area_mean(self):
        return float(np.sum(self.magnitude() * self.face_areas)
                     / self.face_areas.sum())


@dataclass
class TimeSeries:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise InvalidArgumentError("times and values must have equal length")
        if self.times.size and np.any(np.diff(self.times) <= 0):
            raise InvalidArgumentError("times must be strictly increasing")

    def window(self, t0, t1):
        m = (self.times >= t0 - 1e-12) & (self.times <= t1 + 1e-12)
        return TimeSeries(self.times[m], self.values[m])


# -- wall shear stress ---------------------------------------------------------

def wall_shear_stress(state, mesh, props, wall_patch):
    """Tangential viscous traction on a no-slip patch.

    Uses the one-sided near-wall gradient mu*(u_wall - u_cell)/delta with
    the wall at rest, projected onto the wall plane. On faceted curved
    walls this matches the discrete diffusive wall flux, which keeps the
    traction consistent with the solved momentum balance.
    """
    patch = mesh.patches[wall_patch]
    if patch.kind != "wall":
        raise InvalidArgumentError(f"patch {wall_patch!r} is not a wall")
    g = mesh.fv
    rows = np.array([g.b_index[int(f)] for f in patch.face_ids])
    n = g.b_normal[rows]
    delta = g.b_delta[rows]
    u_c = state.u[g.b_owner[rows]]
    # traction from the one-sided gradient; wall velocity is zero
    t = props.mu * (0.0 - u_c) / delta[:, None]
    t_tan = t - np.einsum("ij,ij->i", t, n)[:, None] * n
    return BoundaryField(wall_patch, t_tan,
                         mesh.face_area_mag[patch.face_ids])


def tawss(wss_series, times, T):
    """Trapezoidal time average of |WSS| over one period of length T."""
    if len(wss_series) < 2:
        raise InvalidArgumentError("need at least two WSS samples")
    times = np.asarray(times, dtype=float)
    if len(times) != len(wss_series):
        raise InvalidArgumentError("one time per WSS sample required")
    span = times[-1] - times[0]
    if not np.isclose(span, T, rtol=1e-6):
        raise InvalidArgumentError(
            f"samples span {span:.6g} s, expected one period T = {T:.6g} s")
    mags = np.stack([f.magnitude() for f in wss_series])
    avg = np.trapezoid(mags, times, axis=0) / T
    first = wss_series[0]
    return BoundaryField(first.patch, avg, first.face_areas)


# -- scalar indicators ---------------------------------------------------------

def reynolds_inlet(Q, A, props):
    """Re = (Q/A) * sqrt(4A/pi) / nu for a circular section of area A [SI]."""
    if A <= 0:
        raise InvalidArgumentError("area must be positive")
    if Q < 0:
        raise InvalidArgumentError("flow rate must be non-negative")
    d = np.sqrt(4.0 * A / np.pi)
    return (Q / A) * d / props.nu


def volume_avg_pressure(p, mesh):
    """Volume-weighted mean cell pressure."""
    p = np.asarray(p, dtype=float)
    return float(np.dot(p, mesh.cell_volume) / mesh.cell_volume.sum())


def pas_pad_pam(series: TimeSeries, T=None):
    """(systolic, diastolic, mean) of a pressure trace.

    With T given, the last full period of the series is used; otherwise
    the whole series. The mean is the trapezoidal time average.
    """
    if series.times.size == 0:
        raise InvalidArgumentError("empty series")
    s = series
    if T is not None:
        t1 = s.times[-1]
        s = s.window(t1 - T, t1)
        if s.times.size < 2:
            raise InvalidArgumentError("series does not span one period")
    pas = float(s.values.max())
    pad = float(s.values.min())
    if s.times.size == 1:
        pam = float(s.values[0])
    else:
        pam = float(np.trapezoid(s.values, s.times) / (s.times[-1] - s.times[0]))
    return pas, pad, pam


# -- comparison metrics --------------------------------------------------------

def wape(X: TimeSeries, X_ref: TimeSeries):
    """Weighted absolute percentage error of X against X_ref [percent].

    (100/n) * sum |X_i - X_ref_i| / mean(X_ref); both series must share
    the sampling grid.
    """
    if X.times.shape != X_ref.times.shape or not np.allclose(X.times, X_ref.times):
        raise InvalidArgumentError("series are on different time grids")
    ref_mean = X_ref.values.mean()
    if ref_mean == 0.0:
        raise UndefinedMetricError("reference series has zero mean")
    n = X.values.size
    return float(100.0 / n * np.sum(np.abs(X.values - X_ref.values))
                 / abs(ref_mean))


def l2_rel_error(X_fom, X_rom, mesh=None, weights=None):
    """100 * ||X_fom - X_rom||_L2 / ||X_fom||_L2, volume-weighted.

    ``weights`` overrides the cell volumes (e.g. face areas for boundary
    fields); with neither given the plain vector 2-norm is used.
    """
    a = np.asarray(X_fom, dtype=float)
    b = np.asarray(X_rom, dtype=float)
    if a.shape != b.shape:
        raise InvalidArgumentError("fields have different shapes")
    if weights is None:
        weights = np.ones(a.shape[0]) if mesh is None else mesh.cell_volume
    w = np.asarray(weights, dtype=float)
    sq = (a - b) ** 2
    ref = a ** 2
    if a.ndim > 1:
        sq = sq.sum(axis=tuple(range(1, a.ndim)))
        ref = ref.sum(axis=tuple(range(1, a.ndim)))
    denom = np.sqrt(np.dot(ref, w))
    if denom == 0.0:
        raise UndefinedMetricError("reference field has zero norm")
    return float(100.0 * np.sqrt(np.dot(sq, w)) / denom)
