"""Shared fixtures for the regression and acceptance suites.

The two session-scoped fixtures run transient finite-volume solves that
take minutes in total, so they are computed once and reused by every
test that needs a converged flow field.
"""

from __future__ import annotations

import time
import warnings

import numpy as np
import pytest

from hemoflow.fv import (BoundaryConditionSet, FluidProperties, InflowBC,
                         NoSlipBC, PisoSolver, PressureZeroGradientBC,
                         SolverConfig, VelocityZeroGradientBC, WindkesselBC,
                         poiseuille_bcs)
from hemoflow.indicators import wall_shear_stress
from hemoflow.mesh import generate_bifurcation_mesh, generate_pipe_mesh
from hemoflow.windkessel import WindkesselOutlet

LMIN = 1.0 / 60000.0  # l/min -> m^3/s


def solve_pipe(diameter, flow_rate, axial, radial, n_theta, fluid):
    """Steady laminar pipe flow, warm-started from the exact parabola."""
    mesh = generate_pipe_mesh(diameter, diameter, axial, radial,
                              n_theta=n_theta)
    bcs = poiseuille_bcs(mesh, flow_rate, profile="parabolic")
    cfg = SolverConfig(dt=0.01, t_end=50.0, steady_tol=5e-4,
                       convection_scheme="upwind", lin_tol=1e-6,
                       continuity_tol=2e-5, cfl_max=1e9, cfl_action="warn")
    solver = PisoSolver(mesh, bcs, fluid, cfg)
    u_mean = flow_rate / (np.pi * diameter**2 / 4.0)
    r = np.linalg.norm(mesh.cell_centroid[:, :2], axis=1)
    u0 = np.zeros((mesh.n_cells, 3))
    u0[:, 2] = 2.0 * u_mean * (1.0 - (2.0 * r / diameter) ** 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        state = solver.run(solver.initialize(u=u0))
    wss = wall_shear_stress(state, mesh, fluid, "wall")
    return mesh, state, wss


@pytest.fixture(scope="session")
def pipe_runs():
    """Pipe solutions at Re 500: two resolutions plus a narrower bore.

    The flow rate is held fixed across the two diameters so the wall
    shear ratio isolates the d^-3 scaling.
    """
    fluid = FluidProperties(rho=1060.0, mu=0.004)
    d = 0.02
    u_mean = 500.0 * fluid.nu / d
    Q = u_mean * np.pi * d * d / 4.0
    t0 = time.perf_counter()
    runs = {
        "coarse": solve_pipe(d, Q, 16, 6, 24, fluid),
        "medium": solve_pipe(d, Q, 20, 10, 40, fluid),
        "narrow": solve_pipe(0.016, Q, 20, 10, 40, fluid),
    }
    return {"fluid": fluid, "d": d, "d_narrow": 0.016, "Q": Q,
            "u_mean": u_mean, "runs": runs,
            "seconds": time.perf_counter() - t0}


def solve_bifurcation(mesh, fluid, pf_lmin, warm=None):
    """Steady planar bifurcation flow with an RCR afterload at the outlet.

    The proximal pressure starts at its exact steady value R_d*Q so the
    Windkessel state needs no long capacitive transient.
    """
    Q = pf_lmin * LMIN
    outlet = WindkesselOutlet("outlet", R_p=4.8, R_d=43.2, C=1.2e-3,
                              p_p=43.2 * Q * 1e6)
    bcs = BoundaryConditionSet({
        "inlet": (InflowBC(Q, profile="plug"), PressureZeroGradientBC()),
        "wall": (NoSlipBC(), PressureZeroGradientBC()),
        "outlet": (VelocityZeroGradientBC(), WindkesselBC(outlet)),
    })
    cfg = SolverConfig(dt=0.01, t_end=20.0, steady_tol=5e-5, n_nonorth=2,
                       convection_scheme="upwind", lin_tol=1e-7,
                       continuity_tol=1e-6, cfl_max=1e9, cfl_action="warn")
    solver = PisoSolver(mesh, bcs, fluid, cfg)
    u0 = None if warm is None else warm.u.copy()
    p0 = None if warm is None else warm.p.copy()
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        state = solver.run(solver.initialize(u=u0, p=p0))
    return state, time.perf_counter() - t0


@pytest.fixture(scope="session")
def bif_sweep():
    """Parameter sweep of the bifurcation case over PF in [3, 5] l/min.

    Returns 21 equispaced training solutions (warm-started along the
    sweep), two cold-started held-out references with their solve times,
    and the quadrature weights for each field.
    """
    mesh = generate_bifurcation_mesh(0.024, 0.004, 0.002, 45.0, resolution=8)
    fluid = FluidProperties(rho=1060.0, mu=3e-4)

    def fields(state):
        wss = wall_shear_stress(state, mesh, fluid, "wall").magnitude()
        return {"p": state.p.copy(), "u_x": state.u[:, 0].copy(),
                "u_y": state.u[:, 1].copy(), "wss": wss}

    params = np.round(np.linspace(3.0, 5.0, 21), 10)
    snaps, prev = {}, None
    for pf in params:
        prev, _ = solve_bifurcation(mesh, fluid, pf, warm=prev)
        snaps[pf] = fields(prev)
    refs, cold_seconds = {}, {}
    for pf in (3.45, 4.35):
        state, sec = solve_bifurcation(mesh, fluid, pf)
        refs[pf] = fields(state)
        cold_seconds[pf] = sec
    volumes = mesh.cell_volume
    weights = {"p": volumes, "u_x": volumes, "u_y": volumes,
               "wss": mesh.face_area_mag[mesh.patches["wall"].face_ids]}
    return {"mesh": mesh, "fluid": fluid, "params": params, "snaps": snaps,
            "refs": refs, "cold_seconds": cold_seconds, "weights": weights}
