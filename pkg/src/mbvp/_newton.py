"""Damped Newton driver shared by the linear and coupled solvers."""

import numpy as np
import scipy.sparse.linalg as spla

from .errors import NewtonDivergenceError


def damped_newton(residual, jacobian, x0, tol, max_iter=50, max_halvings=30):
    """Newton iteration with Armijo-style halving on the residual inf-norm.

    residual(x) returns the flat residual vector, jacobian(x) a sparse
    matrix.  A step is accepted as soon as it decreases the residual norm;
    after the tolerance is met one extra full step is attempted (and kept
    only if it improves) so converged iterates sit well inside tolerance.
    Raises NewtonDivergenceError when no decreasing step exists or the
    iteration budget runs out above tolerance.
    """
    x = np.array(x0, dtype=float, copy=True)
    r = residual(x)
    nrm = float(np.abs(r).max()) if r.size else 0.0
    iterations = 0
    polished = False
    while True:
        if nrm <= tol:
            if polished or nrm <= 1e-14 or iterations >= max_iter:
                return x, nrm, iterations
            polished = True
        elif iterations >= max_iter:
            raise NewtonDivergenceError(
                "no convergence within %d iterations (residual %.3e > %.3e)"
                % (max_iter, nrm, tol),
                best_residual=nrm,
            )
        J = jacobian(x)
        try:
            step = spla.spsolve(J.tocsc(), -r)
        except RuntimeError:
            if polished:
                return x, nrm, iterations
            raise NewtonDivergenceError("singular Jacobian", best_residual=nrm)
        if not np.all(np.isfinite(step)):
            if polished:
                return x, nrm, iterations
            raise NewtonDivergenceError("non-finite Newton step", best_residual=nrm)
        alpha = 1.0
        accepted = False
        for _ in range(max_halvings + 1):
            x_try = x + alpha * step
            r_try = residual(x_try)
            nrm_try = float(np.abs(r_try).max())
            if np.isfinite(nrm_try) and nrm_try < nrm:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            if polished:
                # the bonus step failed to improve; keep the converged iterate
                return x, nrm, iterations
            raise NewtonDivergenceError(
                "line search stalled at residual %.3e" % nrm, best_residual=nrm
            )
        x, r, nrm = x_try, r_try, nrm_try
        iterations += 1
