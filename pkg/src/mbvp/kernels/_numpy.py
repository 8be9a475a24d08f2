"""Pure-numpy implementations of the hot array kernels.

Every function here has a numba twin in ``_numba`` with identical
signatures and semantics; the active backend is chosen in ``__init__``.
All inputs are contiguous float64 arrays with the component dimension last.
"""

import numpy as np

# Largest representable row norm strictly below 1.
_SHRINK = 1.0 - 1e-15


def phi_forward(y):
    """Map velocities y (k, q) inside the unit ball to momenta y/sqrt(1-|y|^2)."""
    r2 = np.einsum("ij,ij->i", y, y)
    return y / np.sqrt(1.0 - r2)[:, None]


def phi_backward(z):
    """Map momenta z (k, q) to velocities z/sqrt(1+|z|^2), clipped into the open ball."""
    r2 = np.einsum("ij,ij->i", z, z)
    out = z / np.sqrt(1.0 + r2)[:, None]
    n2 = np.einsum("ij,ij->i", out, out)
    bad = n2 >= 1.0
    if np.any(bad):
        out[bad] *= _SHRINK / np.sqrt(n2[bad])[:, None]
    return out


def dphi_backward(z):
    """Jacobian blocks (k, q, q) of phi_backward at each row of z."""
    k, q = z.shape
    r2 = np.einsum("ij,ij->i", z, z)
    s = 1.0 / np.sqrt(1.0 + r2)
    out = np.zeros((k, q, q))
    out[:, np.arange(q), np.arange(q)] = s[:, None]
    out -= (s**3)[:, None, None] * z[:, :, None] * z[:, None, :]
    return out


def pair_defects(u, w, rhs, dt, inv_lam):
    """Per-interval trapezoidal defects of u' = inv_lam^-1 psi(w)... scaled form.

    Returns (F, G), each (k-1, q), with
      F_i = inv_lam*(u[i+1]-u[i])/dt - (psi(w[i]) + psi(w[i+1]))/2
      G_i = (w[i+1]-w[i])/dt - ((inv_lam*u[i]-rhs[i]) + (inv_lam*u[i+1]-rhs[i+1]))/2
    """
    psi = phi_backward(w)
    F = (u[1:] - u[:-1]) * (inv_lam / dt) - 0.5 * (psi[:-1] + psi[1:])
    s = inv_lam * u - rhs
    G = (w[1:] - w[:-1]) / dt - 0.5 * (s[:-1] + s[1:])
    return F, G


def trapezoid_sq(vals, dt):
    """Trapezoidal quadrature of |vals(t)|^2 over the grid, vals (k, q)."""
    sq = np.einsum("ij,ij->i", vals, vals)
    return dt * (np.sum(sq) - 0.5 * (sq[0] + sq[-1]))


def max_row_norm(vals):
    """Largest Euclidean row norm of vals (k, q)."""
    return float(np.sqrt(np.einsum("ij,ij->i", vals, vals).max()))
