"""Sparse linear solvers for the segregated solver.

Pressure systems are SPD and use Jacobi-preconditioned conjugate
gradients (CG needs an SPD preconditioner, which rules out ILU); the
mildly non-symmetric momentum systems use ILU-preconditioned BiCGStab.
Both fall back to a direct sparse LU when the iteration stalls.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla

from ..errors import SolverFailure


def _ilu_preconditioner(A):
    try:
        ilu = spla.spilu(A.tocsc(), drop_tol=1e-6, fill_factor=12)
    except RuntimeError:
        # incomplete factorization can hit a zero pivot even for a
        # well-posed system; fall back to diagonal scaling
        d = A.diagonal()
        return spla.LinearOperator(A.shape, lambda v: v / d)
    return spla.LinearOperator(A.shape, ilu.solve)


def solve_cg(A, b, x0=None, tol=1e-6, maxiter=5000):
    """Preconditioned CG; LU fallback, SolverFailure on divergence.

    Convergence is measured against the initial residual (not ||b||) so
    that large boundary source terms do not mask a poorly solved interior.
    """
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0 and x0 is None:
        return np.zeros_like(b)
    r0 = np.linalg.norm(b if x0 is None else b - A @ x0)
    if r0 == 0.0:
        return np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    d = A.diagonal()
    M = spla.LinearOperator(A.shape, lambda v: v / d)
    x, info = spla.cg(A, b, x0=x0, rtol=0.0, atol=tol * r0, M=M,
                      maxiter=maxiter)
    if info != 0:
        res = float(np.linalg.norm(b - A @ x) / r0)
        try:
            return spla.splu(A.tocsc()).solve(b)
        except RuntimeError:
            raise SolverFailure(f"pressure CG diverged (info={info})", [res])
    return x


def solve_bicgstab(A, B, x0=None, tol=1e-6, maxiter=2000):
    """Solve A x = b for each column of B (shared matrix and ILU)."""
    B = np.atleast_2d(B.T).T
    X = np.empty_like(B, dtype=float)
    M = _ilu_preconditioner(A)
    lu = None
    for j in range(B.shape[1]):
        b = B[:, j]
        bnorm = np.linalg.norm(b)
        if bnorm == 0.0:
            X[:, j] = 0.0
            continue
        xj0 = None if x0 is None else x0[:, j]
        r0 = bnorm if xj0 is None else np.linalg.norm(b - A @ xj0)
        if r0 == 0.0:
            X[:, j] = xj0
            continue
        x, info = spla.bicgstab(A, b, x0=xj0, rtol=0.0, atol=tol * r0,
                                M=M, maxiter=maxiter)
        if info != 0:
            if lu is None:
                try:
                    lu = spla.splu(A.tocsc())
                except RuntimeError:
                    raise SolverFailure(
                        f"momentum solve failed (info={info}) and LU fallback failed",
                        [float(np.linalg.norm(b - A @ x) / bnorm)])
            x = lu.solve(b)
        X[:, j] = x
    return X
