"""The relativistic velocity--momentum homeomorphism and its inverse.

``phi`` maps the open unit ball of R^q onto R^q via y / sqrt(1 - |y|^2)
and blows up at the light-cone boundary |y| = 1; ``phi_inverse`` is its
total, globally smooth inverse z / sqrt(1 + |z|^2).  Solvers work in the
momentum variable exclusively, so ``phi`` itself only appears in
diagnostics and manufactured right-hand sides.

Both maps accept a single vector ``(q,)`` or a stack of vectors ``(k, q)``
with the component axis last.
"""

import numpy as np

from . import kernels
from .errors import DomainError

#: Velocities with norm at or above this threshold are rejected.
BALL_GUARD = 1.0 - 1e-12


def _as_rows(a):
    arr = np.ascontiguousarray(np.asarray(a, dtype=float))
    if arr.ndim == 1:
        return arr[None, :], True
    if arr.ndim == 2:
        return arr, False
    raise ValueError("expected a (q,) vector or (k, q) stack, got shape %s" % (arr.shape,))


def phi(y):
    """Momentum of velocity y: y / sqrt(1 - |y|^2).

    Raises DomainError when any row norm reaches BALL_GUARD, i.e. the
    velocity is at or beyond the light-cone boundary.
    """
    rows, single = _as_rows(y)
    norms = np.sqrt(np.einsum("ij,ij->i", rows, rows))
    if np.any(norms >= BALL_GUARD):
        raise DomainError(
            "velocity norm %.17g is outside the open unit ball guard %.17g"
            % (float(norms.max()), BALL_GUARD)
        )
    out = kernels.phi_forward(rows)
    return out[0] if single else out


def phi_inverse(z):
    """Velocity of momentum z: z / sqrt(1 + |z|^2); always strictly inside the ball.

    Total on R^q.  Output rows are nudged below unit norm when rounding at
    very large |z| would otherwise land exactly on the boundary.
    """
    rows, single = _as_rows(z)
    out = kernels.phi_backward(rows)
    return out[0] if single else out


def dphi(y):
    """Jacobian of phi: (1-|y|^2)^-1/2 I + y y^T (1-|y|^2)^-3/2, shape (..., q, q)."""
    rows, single = _as_rows(y)
    r2 = np.einsum("ij,ij->i", rows, rows)
    if np.any(np.sqrt(r2) >= BALL_GUARD):
        raise DomainError("velocity norm outside the open unit ball guard")
    g = 1.0 / np.sqrt(1.0 - r2)
    q = rows.shape[1]
    out = np.zeros((rows.shape[0], q, q))
    out[:, np.arange(q), np.arange(q)] = g[:, None]
    out += (g**3)[:, None, None] * rows[:, :, None] * rows[:, None, :]
    return out[0] if single else out


def dphi_inverse(z):
    """Jacobian of phi_inverse: (1+|z|^2)^-1/2 I - z z^T (1+|z|^2)^-3/2."""
    rows, single = _as_rows(z)
    out = kernels.dphi_backward(rows)
    return out[0] if single else out
