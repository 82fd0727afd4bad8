"""Explicit finite-volume operators (face sums over control volumes).

Boundary face values enter through ``BoundaryValues``: per-boundary-face
values in the global boundary-face ordering (mesh.fv.boundary). A value of
None means zero-gradient (the owner value is used); for the diffusion
operator it means zero diffusive flux through that face.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgumentError

CONVECTION_SCHEMES = ("upwind", "second-order-upwind", "central")


def boundary_values_from_patches(mesh, patch_values, default=None):
    """Assemble a per-boundary-face value array from per-patch values.

    ``patch_values``: dict patch name -> scalar, (n,)/(n,dim) array, or
    callable(face_centroids) -> values. Unlisted patches get ``default``
    (None = zero-gradient marker).
    """
    g = mesh.fv
    out = [default] * len(g.boundary)
    for name, val in patch_values.items():
        patch = mesh.patches[name]
        for k, f in enumerate(patch.face_ids):
            idx = g.b_index[int(f)]
            if callable(val):
                out[idx] = val(mesh.face_centroid[f])
            elif np.ndim(val) >= 1 and np.asarray(val).shape[0] == len(patch.face_ids) \
                    and np.asarray(val).dtype != object:
                out[idx] = np.asarray(val)[k]
            else:
                out[idx] = val
    return out


def _boundary_value_array(mesh, field, bvals):
    """Resolve boundary face values; None entries -> owner cell value."""
    g = mesh.fv
    vals = np.asarray(field)[g.b_owner].astype(float).copy()
    if bvals is not None:
        for i, v in enumerate(bvals):
            if v is not None:
                vals[i] = v
    return vals


def face_interpolate(field, mesh):
    """Linear interpolation of a cell field to internal faces."""
    g = mesh.fv
    f = np.asarray(field, dtype=float)
    w = g.w_owner if f.ndim == 1 else g.w_owner[:, None]
    return w * f[g.i_owner] + (1.0 - w) * f[g.i_neigh]


def gradient_term(field, mesh, bvals=None):
    """Sum of face-interpolated values times face area vectors, per cell.

    This is the Gauss pressure-gradient face sum (volume-scaled gradient);
    divide by cell volumes for the gradient itself.
    """
    g = mesh.fv
    f = np.asarray(field, dtype=float)
    out = np.zeros((mesh.n_cells, mesh.dim))
    ff = face_interpolate(f, mesh)
    A = mesh.face_area[g.internal]
    contrib = ff[:, None] * A
    np.add.at(out, g.i_owner, contrib)
    np.add.at(out, g.i_neigh, -contrib)
    fb = _boundary_value_array(mesh, f, bvals)
    np.add.at(out, g.b_owner, fb[:, None] * mesh.face_area[g.boundary])
    return out


def gauss_gradient(field, mesh, bvals=None):
    """Cell-centered Gauss gradient of a scalar field, shape (nc, dim)."""
    return gradient_term(field, mesh, bvals) / mesh.cell_volume[:, None]


def vector_gauss_gradient(u, mesh, bvals=None):
    """Per-component Gauss gradient of a vector field, shape (nc, dim, dim).

    out[c, i, j] = d u_i / d x_j at cell c.
    """
    u = np.asarray(u, dtype=float)
    out = np.empty((mesh.n_cells, u.shape[1], mesh.dim))
    for i in range(u.shape[1]):
        comp_b = None
        if bvals is not None:
            comp_b = [None if v is None else np.asarray(v)[i] for v in bvals]
        out[:, i, :] = gauss_gradient(u[:, i], mesh, comp_b)
    return out


def _face_values(u, phi, mesh, scheme, bvals):
    """Convected face values u_j on internal faces for a given scheme."""
    g = mesh.fv
    u = np.asarray(u, dtype=float)
    phi_i = phi[g.internal]
    if scheme == "central":
        return face_interpolate(u, mesh)
    donors = np.where(phi_i >= 0.0, g.i_owner, g.i_neigh)
    uf = u[donors]
    if scheme == "upwind":
        return uf
    if scheme == "second-order-upwind":
        grad = vector_gauss_gradient(u, mesh, bvals)
        dx = mesh.face_centroid[g.internal] - mesh.cell_centroid[donors]
        return uf + np.einsum("fij,fj->fi", grad[donors], dx)
    raise InvalidArgumentError(f"unknown convection scheme {scheme!r}")


def convective_term(u, phi, mesh, scheme="second-order-upwind", bvals=None):
    """Face sum of phi_j u_j per cell (divergence of the convective flux
    times the cell volume). ``phi`` holds all face fluxes in m^3/s;
    boundary fluxes are taken from phi directly with the boundary velocity
    from bvals (falling back to the owner value).
    """
    if scheme not in CONVECTION_SCHEMES:
        raise InvalidArgumentError(f"unknown convection scheme {scheme!r}")
    g = mesh.fv
    u = np.asarray(u, dtype=float)
    uf = _face_values(u, phi, mesh, scheme, bvals)
    out = np.zeros_like(u)
    contrib = phi[g.internal][:, None] * uf
    np.add.at(out, g.i_owner, contrib)
    np.add.at(out, g.i_neigh, -contrib)
    ub = np.stack([_boundary_value_array(mesh, u[:, i],
                                         None if bvals is None else
                                         [None if v is None else np.asarray(v)[i] for v in bvals])
                   for i in range(u.shape[1])], axis=1)
    np.add.at(out, g.b_owner, phi[g.boundary][:, None] * ub)
    return out


def diffusion_term(u, mesh, n_corr=1, bvals=None):
    """Face sum of (grad u)_j . A_j per cell (Laplacian times volume).

    The orthogonal contribution uses the over-relaxed decomposition; when
    ``n_corr`` >= 1 an explicit non-orthogonal correction from the
    face-interpolated cell gradient is added. Boundary faces with a value
    use a one-sided orthogonal difference; zero-gradient faces contribute
    no flux.
    """
    if n_corr < 0:
        raise InvalidArgumentError("n_corr must be >= 0")
    g = mesh.fv
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 1
    uu = u[:, None] if scalar else u
    out = np.zeros_like(uu)

    flux = g.orth_coeff[:, None] * (uu[g.i_neigh] - uu[g.i_owner])
    if n_corr >= 1 and not np.allclose(g.T, 0.0):
        grads = vector_gauss_gradient(uu, mesh, bvals if not scalar else
                                      (None if bvals is None else
                                       [None if v is None else np.atleast_1d(v) for v in bvals]))
        w = g.w_owner[:, None, None]
        gf = w * grads[g.i_owner] + (1.0 - w) * grads[g.i_neigh]
        flux = flux + np.einsum("fij,fj->fi", gf, g.T)
    np.add.at(out, g.i_owner, flux)
    np.add.at(out, g.i_neigh, -flux)

    if bvals is not None:
        for i, v in enumerate(bvals):
            if v is None:
                continue
            v = np.atleast_1d(np.asarray(v, dtype=float))
            c = g.b_owner[i]
            out[c] += g.b_orth_coeff[i] * (v - uu[c])
    return out[:, 0] if scalar else out
