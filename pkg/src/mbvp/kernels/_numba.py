"""Numba-compiled twins of the kernels in ``_numpy``.

Loop bodies are written out explicitly so the JIT can fuse them; results
agree with the numpy backend to rounding.
"""

import numpy as np
from numba import njit

_SHRINK = 1.0 - 1e-15


@njit(cache=True)
def phi_forward(y):
    k, q = y.shape
    out = np.empty_like(y)
    for i in range(k):
        r2 = 0.0
        for j in range(q):
            r2 += y[i, j] * y[i, j]
        s = 1.0 / np.sqrt(1.0 - r2)
        for j in range(q):
            out[i, j] = y[i, j] * s
    return out


@njit(cache=True)
def phi_backward(z):
    k, q = z.shape
    out = np.empty_like(z)
    for i in range(k):
        r2 = 0.0
        for j in range(q):
            r2 += z[i, j] * z[i, j]
        s = 1.0 / np.sqrt(1.0 + r2)
        n2 = 0.0
        for j in range(q):
            out[i, j] = z[i, j] * s
            n2 += out[i, j] * out[i, j]
        if n2 >= 1.0:
            c = _SHRINK / np.sqrt(n2)
            for j in range(q):
                out[i, j] *= c
    return out


@njit(cache=True)
def dphi_backward(z):
    k, q = z.shape
    out = np.empty((k, q, q))
    for i in range(k):
        r2 = 0.0
        for j in range(q):
            r2 += z[i, j] * z[i, j]
        s = 1.0 / np.sqrt(1.0 + r2)
        s3 = s * s * s
        for a in range(q):
            for b in range(q):
                v = -s3 * z[i, a] * z[i, b]
                if a == b:
                    v += s
                out[i, a, b] = v
    return out


@njit(cache=True)
def pair_defects(u, w, rhs, dt, inv_lam):
    k, q = u.shape
    psi = phi_backward(w)
    F = np.empty((k - 1, q))
    G = np.empty((k - 1, q))
    for i in range(k - 1):
        for j in range(q):
            F[i, j] = (u[i + 1, j] - u[i, j]) * (inv_lam / dt) - 0.5 * (
                psi[i, j] + psi[i + 1, j]
            )
            G[i, j] = (w[i + 1, j] - w[i, j]) / dt - 0.5 * (
                (inv_lam * u[i, j] - rhs[i, j]) + (inv_lam * u[i + 1, j] - rhs[i + 1, j])
            )
    return F, G


@njit(cache=True)
def trapezoid_sq(vals, dt):
    k, q = vals.shape
    total = 0.0
    first = 0.0
    last = 0.0
    for i in range(k):
        sq = 0.0
        for j in range(q):
            sq += vals[i, j] * vals[i, j]
        total += sq
        if i == 0:
            first = sq
        if i == k - 1:
            last = sq
    return dt * (total - 0.5 * (first + last))


@njit(cache=True)
def max_row_norm(vals):
    k, q = vals.shape
    best = 0.0
    for i in range(k):
        sq = 0.0
        for j in range(q):
            sq += vals[i, j] * vals[i, j]
        if sq > best:
            best = sq
    return float(np.sqrt(best))
