"""Catalog of monotone boundary operators represented by their resolvents.

A boundary operator couples the endpoint positions (u(0), u(T)) to the
endpoint momenta (w(0), -w(T)) through a set-valued monotone map on
R^q x R^q.  The operator is only ever touched through its resolvent
J_lam = (I + lam*op)^-1, which is single valued, total and 1-Lipschitz:
the inclusion "flux in op(position)" holds iff

    position == J_lam(position + lam * flux).

Pairs (z1, z2) in R^q x R^q are stored as flat vectors of length 2q; all
resolvents accept stacks (..., 2q) of such vectors.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParamsError, UnsupportedBoundaryError

_CHECK_SEED = 20240117


class BoundaryKind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    PERIODIC = "periodic"
    ANTIPERIODIC = "antiperiodic"
    LINEAR_PSD = "linear_psd"
    PROJECTION_PROX = "projection_prox"


class DomainDescriptor(enum.Enum):
    SINGLE_POINT_0 = "single_point_0"
    FULL_SPACE = "full_space"
    DIAGONAL = "diagonal"
    ANTIDIAGONAL = "antidiagonal"
    CONVEX_SET = "convex_set"


_DOMAIN_OF_KIND = {
    BoundaryKind.DIRICHLET: DomainDescriptor.SINGLE_POINT_0,
    BoundaryKind.NEUMANN: DomainDescriptor.FULL_SPACE,
    BoundaryKind.PERIODIC: DomainDescriptor.DIAGONAL,
    BoundaryKind.ANTIPERIODIC: DomainDescriptor.ANTIDIAGONAL,
    BoundaryKind.LINEAR_PSD: DomainDescriptor.FULL_SPACE,
    BoundaryKind.PROJECTION_PROX: DomainDescriptor.CONVEX_SET,
}


@dataclass(frozen=True)
class BoundaryOperator:
    """Immutable boundary operator; build with :func:`build_boundary`."""

    kind: BoundaryKind
    q: int
    domain: DomainDescriptor
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BoundaryPoint:
    """Endpoint data: position (u(0), u(T)) and flux (w(0), -w(T)), flat 2q vectors."""

    position: np.ndarray
    flux: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        flx = np.asarray(self.flux, dtype=float)
        if pos.shape != flx.shape or pos.ndim != 1 or pos.shape[0] % 2:
            raise ValueError("position and flux must be equal-length flat 2q vectors")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(flx))):
            raise ValueError("boundary point components must be finite")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "flux", flx)


def ball_projection(radius):
    """Projection onto the closed Euclidean ball of given radius (contains 0)."""
    if radius <= 0:
        raise InvalidParamsError("projection ball radius must be positive")

    def proj(z):
        z = np.asarray(z, dtype=float)
        nrm = np.sqrt(np.sum(z * z, axis=-1, keepdims=True))
        factor = radius / np.maximum(nrm, radius)
        return z * factor

    return proj


def box_projection(low, high):
    """Projection onto the box [low, high] componentwise; the box must contain 0."""
    low = np.asarray(low, dtype=float)
    high = np.asarray(high, dtype=float)
    if np.any(low > 0.0) or np.any(high < 0.0):
        raise InvalidParamsError("projection box must contain the origin")
    if np.any(low > high):
        raise InvalidParamsError("projection box has low > high")

    def proj(z):
        return np.clip(np.asarray(z, dtype=float), low, high)

    return proj


def _validate_psd(A, q):
    if A.shape != (2 * q, 2 * q):
        raise InvalidParamsError(
            "linear boundary matrix must be %dx%d, got %s" % (2 * q, 2 * q, A.shape)
        )
    if not np.all(np.isfinite(A)):
        raise InvalidParamsError("linear boundary matrix must be finite")
    scale = 1.0 + np.abs(A).max()
    if 2 * q <= 64:
        sym = 0.5 * (A + A.T)
        if np.linalg.eigvalsh(sym).min() < -1e-10 * scale:
            raise InvalidParamsError(
                "linear boundary matrix is not positive semi-definite"
            )
    rng = np.random.default_rng(_CHECK_SEED)
    z = rng.standard_normal((10_000, 2 * q))
    quad = np.einsum("ki,ij,kj->k", z, A, z)
    nrm2 = np.einsum("ki,ki->k", z, z)
    if np.any(quad < -1e-10 * nrm2 * scale):
        raise InvalidParamsError(
            "linear boundary matrix fails the sampled positive semi-definiteness test"
        )


def _validate_projection(proj, q):
    rng = np.random.default_rng(_CHECK_SEED)
    z = rng.standard_normal((100, 2 * q)) * 3.0
    try:
        p1 = np.asarray(proj(z), dtype=float)
        p2 = np.asarray(proj(p1), dtype=float)
        origin = np.asarray(proj(np.zeros(2 * q)), dtype=float)
    except Exception as exc:
        raise InvalidParamsError("projection map raised during validation: %s" % exc)
    if p1.shape != z.shape:
        raise InvalidParamsError("projection map must preserve input shape")
    scale = 1.0 + np.abs(p1).max()
    if np.abs(p2 - p1).max() > 1e-9 * scale:
        raise InvalidParamsError("projection map is not idempotent on samples")
    if np.abs(origin).max() > 1e-12:
        raise InvalidParamsError("projection map must fix the origin (the set must contain 0)")


def build_boundary(kind, q, params=None):
    """Construct a catalog boundary operator after validating its parameters.

    kind may be a BoundaryKind or its string value.  linear_psd requires
    params["matrix"] (2q x 2q positive semi-definite); projection_prox
    requires params["projection"], an idempotent origin-fixing map acting
    on (..., 2q) arrays.
    """
    if not isinstance(kind, BoundaryKind):
        try:
            kind = BoundaryKind(str(kind).strip().lower())
        except ValueError:
            raise InvalidParamsError(
                "unknown boundary kind %r; expected one of %s"
                % (kind, [k.value for k in BoundaryKind])
            )
    if q < 1:
        raise InvalidParamsError("boundary dimension q must be >= 1")
    params = dict(params or {})
    if kind is BoundaryKind.LINEAR_PSD:
        if "matrix" not in params:
            raise InvalidParamsError("linear_psd requires params['matrix']")
        A = np.asarray(params["matrix"], dtype=float)
        _validate_psd(A, q)
        params["matrix"] = A
    elif kind is BoundaryKind.PROJECTION_PROX:
        if "projection" not in params:
            raise InvalidParamsError("projection_prox requires params['projection']")
        _validate_projection(params["projection"], q)
    elif params:
        raise InvalidParamsError("%s takes no parameters" % kind.value)
    return BoundaryOperator(kind=kind, q=q, domain=_DOMAIN_OF_KIND[kind], params=params)


def resolvent(bop, lam, z):
    """Evaluate J_lam = (I + lam*op)^-1 at z, shape (..., 2q)."""
    if lam <= 0.0:
        raise ValueError("resolvent parameter lam must be positive")
    z = np.asarray(z, dtype=float)
    q = bop.q
    if z.shape[-1] != 2 * q:
        raise ValueError("expected trailing dimension %d, got %s" % (2 * q, z.shape))
    kind = bop.kind
    if kind is BoundaryKind.DIRICHLET:
        return np.zeros_like(z)
    if kind is BoundaryKind.NEUMANN:
        return z.copy()
    if kind is BoundaryKind.PERIODIC:
        avg = 0.5 * (z[..., :q] + z[..., q:])
        return np.concatenate([avg, avg], axis=-1)
    if kind is BoundaryKind.ANTIPERIODIC:
        half = 0.5 * (z[..., :q] - z[..., q:])
        return np.concatenate([half, -half], axis=-1)
    if kind is BoundaryKind.LINEAR_PSD:
        A = bop.params["matrix"]
        M = np.eye(2 * q) + lam * A
        flat = z.reshape(-1, 2 * q)
        out = np.linalg.solve(M, flat.T).T
        return out.reshape(z.shape)
    # projection_prox: the resolvent of a normal cone is the projection,
    # independently of lam.
    return np.asarray(bop.params["projection"](z), dtype=float)


def resolvent_jacobian(bop, lam, z):
    """Forward-difference Jacobian of J_lam at a single point z, shape (2q, 2q).

    Catalog resolvents are piecewise linear, so forward differences are
    exact away from kinks; the step is 1e-7 * (1 + |z_j|) per coordinate.
    """
    z = np.asarray(z, dtype=float)
    dim = z.shape[0]
    steps = 1e-7 * (1.0 + np.abs(z))
    batch = z[None, :] + np.diag(steps)
    base = resolvent(bop, lam, z)
    pert = resolvent(bop, lam, batch)
    return (pert - base[None, :]).T / steps[None, :]


def boundary_residual(bop, lam, point):
    """Residual of the endpoint inclusion: zero iff flux lies in op(position)."""
    pos = point.position
    flux = point.flux
    return pos - resolvent(bop, lam, pos + lam * flux)


def cone_diagonal_check(bop):
    """True iff the closed conical hull of the domain meets the diagonal only at 0.

    A True answer certifies that the first Rayleigh constant of the
    operator is positive.  Projection domains have no analytic cone here
    and are rejected.
    """
    domain = bop.domain
    if domain is DomainDescriptor.SINGLE_POINT_0:
        return True
    if domain is DomainDescriptor.ANTIDIAGONAL:
        return True
    if domain is DomainDescriptor.DIAGONAL:
        return False
    if domain is DomainDescriptor.FULL_SPACE:
        return False
    raise UnsupportedBoundaryError(
        "no analytic conical hull for domain descriptor %s" % domain.value
    )


def certify_boundary(bop, n_pairs=10_000, lambdas=(0.1, 1.0, 10.0), seed=_CHECK_SEED):
    """Sampled necessary-condition certificate for a boundary operator.

    Returns a dict with the largest firm-nonexpansiveness violation
    |J z1 - J z2|^2 - <<z1 - z2 | J z1 - J z2>> over seeded pairs, the worst
    monotonicity defect of the encoded graph, and |J(0)|.  These conditions
    are necessary for the operator to be maximal monotone; passing them
    does not certify sufficiency for user-supplied projections.
    """
    rng = np.random.default_rng(seed)
    dim = 2 * bop.q
    worst_fne = 0.0
    worst_mono = 0.0
    for lam in lambdas:
        z1 = rng.standard_normal((n_pairs, dim)) * 5.0
        z2 = rng.standard_normal((n_pairs, dim)) * 5.0
        j1 = resolvent(bop, lam, z1)
        j2 = resolvent(bop, lam, z2)
        dj = j1 - j2
        dz = z1 - z2
        lhs = np.einsum("ki,ki->k", dj, dj)
        rhs = np.einsum("ki,ki->k", dz, dj)
        worst_fne = max(worst_fne, float((lhs - rhs).max()))
        # graph pairs (x_i, a_i) with a_i = (z_i - x_i)/lam satisfy a_i in op(x_i)
        a1 = (z1 - j1) / lam
        a2 = (z2 - j2) / lam
        mono = np.einsum("ki,ki->k", a1 - a2, j1 - j2)
        worst_mono = max(worst_mono, float((-mono).max()))
    origin = float(np.abs(resolvent(bop, lambdas[0], np.zeros(dim))).max())
    return {
        "max_firm_nonexpansiveness_violation": worst_fne,
        "max_monotonicity_defect": worst_mono,
        "resolvent_at_origin": origin,
    }
