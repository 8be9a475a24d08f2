"""Convergent-to-zero 2x2 matrix tests and the matrix-form a-priori bound.

A nonnegative square matrix M is convergent to zero when M^k -> 0; for the
2x2 case everything is available in closed form, and the four classical
characterizations (vanishing powers, summable Neumann series, spectral
radius below one, entrywise-nonnegative inverse of I - M) are each exposed
as a separate test so they can be cross-checked against one another.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeEntryError, NotConvergentError

#: Iteration cap for the power/Neumann tests (exponent doubles each step,
#: so the cap is never the deciding factor away from spectral radius 1).
POWER_CAP = 2000

#: Entry threshold under which a power of M counts as vanished.
POWER_TOL = 1e-12

_BLOWUP = 1e150


@dataclass(frozen=True)
class ConvMatrix:
    """Nonnegative 2x2 matrix of growth coefficients [[a, b], [c, d]]."""

    entries: np.ndarray = field()

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix, got shape %s" % (arr.shape,))
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix entries must be finite")
        if np.any(arr < 0.0):
            raise NegativeEntryError(
                "matrix entries must be nonnegative, got %s" % (arr.tolist(),)
            )
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_rows(cls, a, b, c, d):
        return cls(np.array([[a, b], [c, d]], dtype=float))


def _coerce(M):
    if isinstance(M, ConvMatrix):
        return M.entries
    return ConvMatrix(np.asarray(M, dtype=float)).entries


def spectral_radius(M):
    """Spectral radius from the characteristic polynomial.

    For nonnegative 2x2 matrices the discriminant ((a-d)/2)^2 + bc is
    nonnegative, so both eigenvalues are real and the radius is
    (a+d)/2 + sqrt(((a-d)/2)^2 + bc).
    """
    a, b = _coerce(M)[0]
    c, d = _coerce(M)[1]
    half_trace = 0.5 * (a + d)
    disc = 0.25 * (a - d) ** 2 + b * c
    return half_trace + np.sqrt(disc)


def is_convergent_to_zero(M):
    """Return (verdict, spectral_radius); the radius-1 tie is not convergent."""
    rho = spectral_radius(M)
    return bool(rho < 1.0), float(rho)


def converges_by_eigenvalues(M):
    return is_convergent_to_zero(M)[0]


def converges_by_powers(M, tol=POWER_TOL, max_iter=POWER_CAP):
    """Decide M^k -> 0 by repeated squaring of M.

    Squaring doubles the exponent each step, which keeps the test decisive
    even when the spectral radius sits just below 1; a plain k-fold product
    with the same iteration budget could not tell rho = 1 - 1e-6 apart
    from rho = 1.
    """
    P = _coerce(M).copy()
    for _ in range(max_iter):
        top = np.abs(P).max()
        if top < tol:
            return True
        if top > _BLOWUP or not np.isfinite(top):
            return False
        P = P @ P
    return False


def neumann_series(M, tol=POWER_TOL, max_iter=POWER_CAP):
    """Sum I + M + M^2 + ... by doubling; returns (converged, partial_sum).

    Uses S_{2j} = S_j + M^j S_j with M^{2j} = (M^j)^2, so the number of
    summed terms doubles per iteration.
    """
    A = _coerce(M)
    S = np.eye(2)
    P = A.copy()
    for _ in range(max_iter):
        top = np.abs(P).max()
        if top < tol:
            return True, S
        if top > _BLOWUP or np.abs(S).max() > _BLOWUP or not np.isfinite(top):
            return False, None
        S = S + P @ S
        P = P @ P
    return False, None


def converges_by_neumann_series(M):
    return neumann_series(M)[0]


def converges_by_inverse_positivity(M, singular_tol=1e-14):
    """I - M nonsingular with entrywise-nonnegative inverse."""
    A = _coerce(M)
    I_minus = np.eye(2) - A
    det = I_minus[0, 0] * I_minus[1, 1] - I_minus[0, 1] * I_minus[1, 0]
    scale = 1.0 + np.abs(I_minus).max()
    if abs(det) <= singular_tol * scale * scale:
        return False
    adj = np.array(
        [[I_minus[1, 1], -I_minus[0, 1]], [-I_minus[1, 0], I_minus[0, 0]]]
    )
    inv = adj / det
    return bool(np.all(inv >= -1e-14))


def inverse_I_minus_M(M):
    """Entrywise-nonnegative inverse of I - M; requires M convergent to zero."""
    ok, rho = is_convergent_to_zero(M)
    if not ok:
        raise NotConvergentError(
            "matrix is not convergent to zero (spectral radius %.6g)" % rho
        )
    A = _coerce(M)
    I_minus = np.eye(2) - A
    det = I_minus[0, 0] * I_minus[1, 1] - I_minus[0, 1] * I_minus[1, 0]
    adj = np.array(
        [[I_minus[1, 1], -I_minus[0, 1]], [-I_minus[1, 0], I_minus[0, 0]]]
    )
    return adj / det


def apriori_bound_iv(M, delta, T):
    """Norm-square bounds (beta_u, beta_v, total) from the matrix inequality.

    beta = (I - M)^-1 (delta*T, delta*T)^T bounds the squared H1 norms of
    every homotopy solution, and total = sqrt(beta_u) + sqrt(beta_v) bounds
    the summed H1 norm.
    """
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    if T <= 0.0:
        raise ValueError("T must be positive")
    inv = inverse_I_minus_M(M)
    beta = inv @ np.array([delta * T, delta * T])
    return float(beta[0]), float(beta[1]), float(np.sqrt(beta[0]) + np.sqrt(beta[1]))
