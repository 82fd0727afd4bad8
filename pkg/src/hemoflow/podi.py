"""Non-intrusive reduced-order modeling by POD with interpolation.

Snapshots of a field at sampled parameter values are compressed to a
small orthonormal basis (method of snapshots), the modal coefficients are
interpolated over the parameter, and new parameter points are evaluated
by expanding the interpolated coefficients in the basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import RBFInterpolator, interp1d

from .errors import (DegenerateInputError, ExtrapolationError,
                     InvalidArgumentError)

INTERPOLATION_KINDS = ("linear", "rbf")


@dataclass
class SnapshotSet:
    """Field snapshots as columns of S, one per parameter point.

    ``weight`` holds per-degree-of-freedom quadrature weights (cell
    volumes or face areas); when present all inner products are weighted
    so truncation optimality is in the discrete L2 norm.
    """

    S: np.ndarray                    # (N, N_s)
    params: np.ndarray               # (N_s,)
    field_name: str = "field"
    weight: Optional[np.ndarray] = None

    def __post_init__(self):
        self.S = np.asarray(self.S, dtype=float)
        self.params = np.asarray(self.params, dtype=float)
        if self.S.ndim != 2:
            raise InvalidArgumentError("snapshot matrix must be 2-D")
        if self.S.shape[1] != self.params.size:
            raise InvalidArgumentError("one parameter per snapshot column required")
        if self.S.size == 0:
            raise InvalidArgumentError("empty snapshot set")
        if len(np.unique(self.params)) != self.params.size:
            raise InvalidArgumentError("parameters must be pairwise distinct")
        if self.weight is not None:
            self.weight = np.asarray(self.weight, dtype=float)
            if self.weight.shape != (self.S.shape[0],):
                raise InvalidArgumentError("one weight per degree of freedom required")
            if np.any(self.weight <= 0):
                raise InvalidArgumentError("weights must be positive")


@dataclass
class PodBasis:
    modes: np.ndarray            # (N, k), W-orthonormal columns
    singular_values: np.ndarray  # full spectrum, descending
    k: int
    energy_fraction: float
    weight: Optional[np.ndarray] = None

    def project(self, X):
        """Modal coefficients of columns of X: U_k^T W X."""
        X = np.asarray(X, dtype=float)
        if self.weight is not None:
            X = self.weight[:, None] * X if X.ndim > 1 else self.weight * X
        return self.modes.T @ X


def cumulative_energy(singular_values):
    """Normalized partial sums of squared singular values."""
    sv = np.asarray(singular_values, dtype=float)
    if sv.size == 0:
        raise InvalidArgumentError("empty singular value list")
    if np.any(sv < 0) or np.any(np.diff(sv) > 1e-12 * max(sv[0], 1.0)):
        raise InvalidArgumentError("singular values must be non-negative descending")
    en = np.cumsum(sv**2)
    if en[-1] == 0.0:
        raise DegenerateInputError("all singular values are zero")
    return en / en[-1]


def _weighted_qr(U, w):
    """Orthonormalize columns in the (optionally weighted) inner product."""
    if w is None:
        Q, _ = np.linalg.qr(U)
        return Q
    sw = np.sqrt(w)
    Q, _ = np.linalg.qr(sw[:, None] * U)
    return Q / sw[:, None]


def _wfro(A, w):
    """(Weighted) Frobenius norm."""
    return float(np.sqrt(((A * A) if w is None else (w[:, None] * A * A)).sum()))


def _full_rank_refine(S, w, U, sv):
    """Extend U with modes of the projection residual until S is spanned.

    The Gram-matrix eigendecomposition resolves singular values only down
    to about sqrt(machine eps) of the largest; repeating the decomposition
    on the residual recovers the unresolved tail, which matters when the
    full-rank basis must reconstruct every snapshot to round-off.
    """
    n_s = S.shape[1]
    sv = sv.copy()
    snorm = _wfro(S, w)
    for _ in range(n_s):
        k = U.shape[1]
        if k >= n_s:
            break
        C = U.T @ S if w is None else U.T @ (w[:, None] * S)
        R = S - U @ C
        if _wfro(R, w) <= 1e-14 * snorm:
            break
        G = R.T @ R if w is None else R.T @ (w[:, None] * R)
        lam, V = np.linalg.eigh(G)
        lam, V = np.clip(lam[::-1], 0.0, None), V[:, ::-1]
        svr = np.sqrt(lam)
        kr = int(np.sum(svr > svr[0] * 1e-12)) if svr[0] > 0.0 else 0
        kr = min(kr, n_s - k)
        if kr == 0:
            break
        Ur = (R @ V[:, :kr]) / svr[:kr]
        U = _weighted_qr(np.hstack([U, Ur]), w)
        sv[k:k + kr] = svr[:kr]
    return U, sv


def pod_basis(snapshots: SnapshotSet, energy_threshold=0.999):
    """POD basis by the method of snapshots.

    Eigendecomposition of the small Gram matrix S^T W S gives the squared
    singular values and right-singular vectors; the modes are recovered as
    S V / sigma. Retains the smallest k whose cumulative squared-singular-
    value energy reaches the threshold.
    """
    if not 0.0 < energy_threshold <= 1.0:
        raise InvalidArgumentError("energy threshold must be in (0, 1]")
    S = snapshots.S
    w = snapshots.weight
    G = S.T @ S if w is None else S.T @ (w[:, None] * S)
    lam, V = np.linalg.eigh(G)
    lam, V = lam[::-1], V[:, ::-1]
    total = lam.sum()
    if total <= 0.0:
        raise DegenerateInputError("all-zero snapshot matrix")
    lam = np.clip(lam, 0.0, None)
    sv = np.sqrt(lam)

    en = np.cumsum(lam) / total
    k = int(np.searchsorted(en, energy_threshold - 1e-14) + 1)
    # never retain numerically null directions
    rank = int(np.sum(sv > sv[0] * 1e-12))
    k = min(k, max(rank, 1))

    U = (S @ V[:, :k]) / sv[:k]
    # re-orthonormalize in the weighted inner product: the Gram-matrix
    # route loses half the working precision on near-null directions, and
    # a QR pass restores machine-level orthonormality without changing
    # the spanned subspace
    U = _weighted_qr(U, w)
    if energy_threshold >= 1.0 and k < S.shape[1]:
        U, sv = _full_rank_refine(S, w, U, sv)
        k = U.shape[1]
    # deterministic sign: largest-magnitude entry of each mode positive
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(k)])
    signs[signs == 0] = 1.0
    U *= signs
    return PodBasis(U, sv, k, float(min(en[k - 1], 1.0)), weight=w)


@dataclass
class RomModel:
    """Trained per-field ROM: basis + interpolated modal coefficients."""

    basis: PodBasis
    coefficients: np.ndarray     # (k, N_s)
    params: np.ndarray           # (N_s,) sorted
    interpolation_kind: str
    field_name: str = "field"
    _interp: object = field(default=None, repr=False, compare=False)

    @property
    def param_box(self):
        return float(self.params.min()), float(self.params.max())

    def _interpolant(self):
        if self._interp is None:
            if self.interpolation_kind == "linear":
                self._interp = interp1d(self.params, self.coefficients,
                                        axis=1, kind="linear")
            else:
                self._interp = RBFInterpolator(
                    self.params[:, None], self.coefficients.T,
                    kernel="thin_plate_spline")
        return self._interp

    def coeffs_at(self, pi):
        if self.interpolation_kind == "linear":
            return self._interpolant()(pi)
        return self._interpolant()(np.atleast_2d([pi]))[0]

    def predict(self, pi, allow_extrapolation=False):
        lo, hi = self.param_box
        if not allow_extrapolation and not lo <= pi <= hi:
            raise ExtrapolationError(
                f"parameter {pi} outside training box [{lo}, {hi}]")
        if allow_extrapolation and self.interpolation_kind == "linear":
            pi = np.clip(pi, lo, hi)
        return self.basis.modes @ self.coeffs_at(pi)


def train(snapshots: SnapshotSet, energy_threshold=0.999,
          interpolation_kind="linear"):
    """Build the basis, project the modal coefficients and fit the
    per-mode interpolants over the training parameters."""
    if interpolation_kind not in INTERPOLATION_KINDS:
        raise InvalidArgumentError(
            f"unknown interpolation kind {interpolation_kind!r}")
    if snapshots.params.size < 2:
        raise InvalidArgumentError("need at least 2 snapshots to interpolate")
    order = np.argsort(snapshots.params)
    S = snapshots.S[:, order]
    params = snapshots.params[order]
    basis = pod_basis(SnapshotSet(S, params, snapshots.field_name,
                                  snapshots.weight), energy_threshold)
    C = basis.project(S)
    return RomModel(basis, C, params, interpolation_kind,
                    snapshots.field_name)


def evaluate_rom(models, fom_fields, test_params, weights=None):
    """Relative L2 error of each field model at each test parameter.

    ``models``: dict field name -> RomModel; ``fom_fields``: dict
    (field name, parameter) -> reference field; ``weights``: dict field
    name -> quadrature weights (optional). Returns {param: {field: E%}}.
    """
    from .indicators import l2_rel_error

    table = {}
    for pi in test_params:
        row = {}
        for name, model in models.items():
            key = (name, pi)
            if key not in fom_fields:
                raise InvalidArgumentError(
                    f"missing reference solution for {name} at {pi}")
            w = None if weights is None else weights.get(name)
            row[name] = l2_rel_error(fom_fields[key], model.predict(pi),
                                     weights=w)
        table[pi] = row
    return table


def format_error_table(table, field_order=None):
    """Render the evaluate_rom output as an aligned text table."""
    params = sorted(table)
    fields = field_order or sorted({f for row in table.values() for f in row})
    lines = ["parameter  " + "  ".join(f"{f:>10s}" for f in fields)]
    for pi in params:
        row = table[pi]
        lines.append(f"{pi:9.4g}  "
                     + "  ".join(f"{row.get(f, float('nan')):9.3f}%" for f in fields))
    return "\n".join(lines)
