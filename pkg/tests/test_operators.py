"""Discrete operator exactness on fields with known derivatives."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hemoflow.errors import InvalidArgumentError
from hemoflow.fv import (boundary_values_from_patches, convective_term,
                         diffusion_term, face_interpolate, gauss_gradient,
                         vector_gauss_gradient)
from hemoflow.mesh import generate_box_mesh, generate_pipe_mesh


def linear_bvals(mesh, func):
    """Exact boundary values of ``func`` on every patch."""
    return boundary_values_from_patches(
        mesh, {name: func for name in mesh.patches})


@given(a=st.floats(-5, 5), b=st.floats(-5, 5), c=st.floats(-5, 5),
       shear=st.floats(0.0, 0.4))
@settings(max_examples=25, deadline=None)
def test_gauss_gradient_exact_for_linear_fields(a, b, c, shear):
    mesh = generate_box_mesh(5, 4, (1.0, 0.7), shear=shear)
    f = a * mesh.cell_centroid[:, 0] + b * mesh.cell_centroid[:, 1] + c
    bvals = linear_bvals(mesh, lambda x: a * x[0] + b * x[1] + c)
    grad = gauss_gradient(f, mesh, bvals)
    scale = max(abs(a), abs(b), 1.0)
    assert np.allclose(grad[:, 0], a, atol=1e-10 * scale)
    assert np.allclose(grad[:, 1], b, atol=1e-10 * scale)


def test_vector_gradient_matches_componentwise_scalar_gradient():
    mesh = generate_box_mesh(6, 5, (1.0, 1.0), shear=0.2)
    x = mesh.cell_centroid
    u = np.column_stack([1.5 * x[:, 0] - 2.0 * x[:, 1], 0.5 * x[:, 1]])
    grad = vector_gauss_gradient(u, mesh)
    assert np.allclose(grad[:, 0, :],
                       gauss_gradient(u[:, 0], mesh))
    assert np.allclose(grad[:, 1, :],
                       gauss_gradient(u[:, 1], mesh))


def test_face_interpolation_exact_for_linear_fields():
    mesh = generate_box_mesh(5, 5, (1.0, 1.0))
    f = 3.0 * mesh.cell_centroid[:, 0] - mesh.cell_centroid[:, 1]
    g = mesh.fv
    ff = face_interpolate(f, mesh)
    xf = mesh.face_centroid[g.internal]
    assert np.allclose(ff, 3.0 * xf[:, 0] - xf[:, 1], atol=1e-12)


def test_diffusion_of_linear_field_vanishes_in_interior():
    """Interior cells only: boundary faces use a one-sided first-order
    difference, which is inexact on a sheared (non-orthogonal) boundary."""
    mesh = generate_box_mesh(6, 6, (1.0, 1.0), shear=0.15)
    func = lambda x: 2.0 * x[0] + 3.0 * x[1]
    f = 2.0 * mesh.cell_centroid[:, 0] + 3.0 * mesh.cell_centroid[:, 1]
    bvals = linear_bvals(mesh, func)
    lap = diffusion_term(f, mesh, n_corr=2, bvals=bvals)
    g = mesh.fv
    interior = np.ones(mesh.n_cells, dtype=bool)
    interior[g.b_owner] = False
    assert interior.any()
    assert np.abs(lap[interior]).max() < 1e-9 * np.abs(f).max()


def test_convection_of_constant_field_is_divergence_free():
    """With a solenoidal face flux, convecting a constant gives zero."""
    mesh = generate_box_mesh(5, 4, (1.0, 1.0))
    g = mesh.fv
    phi = np.zeros(mesh.n_faces)
    # uniform unit flow in x: phi = A . (1, 0) on every face
    phi[g.internal] = mesh.face_area[g.internal][:, 0]
    phi[g.boundary] = mesh.face_area[g.boundary][:, 0]
    u = np.tile([2.0, -1.0], (mesh.n_cells, 1))
    bvals = boundary_values_from_patches(
        mesh, {name: np.array([2.0, -1.0]) for name in mesh.patches})
    for scheme in ("upwind", "second-order-upwind", "central"):
        div = convective_term(u, phi, mesh, scheme=scheme, bvals=bvals)
        assert np.abs(div).max() < 1e-12


def test_convection_rejects_unknown_scheme():
    mesh = generate_box_mesh(3, 3, (1.0, 1.0))
    u = np.zeros((mesh.n_cells, 2))
    with pytest.raises(InvalidArgumentError):
        convective_term(u, np.zeros(mesh.n_faces), mesh, scheme="quick")


def test_operators_work_on_3d_meshes():
    mesh = generate_pipe_mesh(0.02, 0.01, 4, 3)
    f = mesh.cell_centroid[:, 2]
    bvals = linear_bvals(mesh, lambda x: x[2])
    grad = gauss_gradient(f, mesh, bvals)
    assert np.allclose(grad[:, 2], 1.0, atol=1e-8)
    assert np.abs(grad[:, :2]).max() < 1e-8
