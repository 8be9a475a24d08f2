"""Solution operator for the momentum-form linear problem.

Solves -[phi(u')]' + u = h(t) on [0, T] with the endpoint inclusion
(w(0), -w(T)) in op(u(0), u(T)), where w = phi(u').  The discretization
works in the pair (u, w): u' = psi(w) and w' = u - h with psi = phi^-1,
trapezoidal collocation on each subinterval, and the boundary inclusion
closed through the operator's resolvent.  Because psi is total and maps
into the open unit ball, the scheme can never step outside the light cone
and Newton's method sees a globally smooth system.

Residuals are scaled per unit time (divided by the step), so tolerances
mean the same thing at every grid resolution.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from ._newton import damped_newton
from .boundary import BoundaryOperator, resolvent, resolvent_jacobian
from .errors import DomainError
from .geometry import dphi, phi


@dataclass(frozen=True)
class Grid:
    """Uniform partition of [0, T] into N subintervals (N even, >= 16)."""

    T: float
    N: int = 200

    def __post_init__(self):
        if not np.isfinite(self.T) or self.T <= 0.0:
            raise ValueError("T must be a positive real")
        if self.N < 16 or self.N % 2 != 0:
            raise ValueError("N must be an even integer >= 16")

    @property
    def dt(self):
        return self.T / self.N

    @property
    def nodes(self):
        return np.linspace(0.0, self.T, self.N + 1)


@dataclass
class GridFunction:
    """Nodal values of the state u and its momentum w = phi(u')."""

    u: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.u = np.ascontiguousarray(np.asarray(self.u, dtype=float))
        self.w = np.ascontiguousarray(np.asarray(self.w, dtype=float))
        if self.u.shape != self.w.shape or self.u.ndim != 2:
            raise ValueError("u and w must be (N+1, q) arrays of equal shape")

    @classmethod
    def zeros(cls, grid, q):
        return cls(np.zeros((grid.N + 1, q)), np.zeros((grid.N + 1, q)))

    @property
    def q(self):
        return self.u.shape[1]

    def velocity(self):
        """Recovered u' = psi(w); every row lies strictly inside the unit ball."""
        return kernels.phi_backward(self.w)

    def max_speed(self):
        return kernels.max_row_norm(self.velocity())

    def copy(self):
        return GridFunction(self.u.copy(), self.w.copy())


@dataclass
class LinearProblem:
    """Right-hand side h (N+1, q), boundary operator, and grid."""

    h: np.ndarray
    bop: BoundaryOperator
    grid: Grid

    def __post_init__(self):
        self.h = np.ascontiguousarray(np.asarray(self.h, dtype=float))
        expected = (self.grid.N + 1, self.bop.q)
        if self.h.shape != expected:
            raise ValueError(
                "h must have shape %s to match grid and boundary dimension, got %s"
                % (expected, self.h.shape)
            )
        if not np.all(np.isfinite(self.h)):
            raise ValueError("h must be finite at every node")


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-10
    max_iter: int = 50
    max_halvings: int = 30
    resolvent_lambda: float = 1.0


# ---------------------------------------------------------------------------
# quadrature norms (single definition used by bounds, reports and tests)

def trapezoid_weights(grid):
    w = np.full(grid.N + 1, grid.dt)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def l2_norm_sq(vals, grid):
    """Trapezoidal \\int |vals(t)|^2 dt over the grid; vals is (N+1, q)."""
    return float(kernels.trapezoid_sq(np.ascontiguousarray(vals, dtype=float), grid.dt))


def h1_norm_sq(gf, grid):
    """Discrete squared H1 norm: |u|_L2^2 + |psi(w)|_L2^2."""
    return l2_norm_sq(gf.u, grid) + l2_norm_sq(gf.velocity(), grid)


# ---------------------------------------------------------------------------
# sparse structure of one (u, w) component

class _ComponentStructure:
    """Index bookkeeping for the collocation equations of one component.

    Rows: N*q F-equations (u' = psi(w) scaled by inv_lam), N*q G-equations
    (w' = inv_lam*u - rhs), then 2q boundary-closure rows.  Columns of u
    start at u_col, of w at w_col, inside some larger system.
    """

    def __init__(self, q, N, dt, inv_lam, row0, u_col, w_col):
        self.q, self.N, self.dt, self.inv_lam = q, N, dt, inv_lam
        self.row_F = row0
        self.row_G = row0 + N * q
        self.row_BC = row0 + 2 * N * q
        self.u_col = u_col
        self.w_col = w_col

        i = np.arange(N)
        j = np.arange(q)
        node = i[:, None] * q + j[None, :]          # (N, q)
        ones = np.ones((N, q))

        rows = []
        cols = []
        vals = []
        # F rows: +-(inv_lam/dt) on the u diagonals
        rows += [self.row_F + node, self.row_F + node]
        cols += [u_col + node, u_col + node + q]
        vals += [-(inv_lam / dt) * ones, (inv_lam / dt) * ones]
        # G rows: +-(1/dt) on the w diagonals, -inv_lam/2 on the u diagonals
        rows += [self.row_G + node] * 4
        cols += [w_col + node, w_col + node + q, u_col + node, u_col + node + q]
        vals += [(-1.0 / dt) * ones, (1.0 / dt) * ones,
                 (-0.5 * inv_lam) * ones, (-0.5 * inv_lam) * ones]
        self._static_rows = np.concatenate([r.ravel() for r in rows])
        self._static_cols = np.concatenate([c.ravel() for c in cols])
        self._static_vals = np.concatenate([v.ravel() for v in vals])

        # F rows: -dpsi/2 blocks against w[i] and w[i+1]
        a = j[None, :, None]
        b = j[None, None, :]
        blk_rows = np.broadcast_to(self.row_F + i[:, None, None] * q + a, (N, q, q))
        blk_cols_i = np.broadcast_to(w_col + i[:, None, None] * q + b, (N, q, q))
        self._dpsi_rows = np.concatenate([blk_rows.ravel(), blk_rows.ravel()])
        self._dpsi_cols = np.concatenate([blk_cols_i.ravel(), (blk_cols_i + q).ravel()])

        # boundary rows: 2q x q blocks against u[0], u[N], w[0], w[N]
        rbc = self.row_BC + np.arange(2 * q)
        bc_rows = np.broadcast_to(rbc[:, None], (2 * q, q)).ravel()
        self._bc_rows = np.concatenate([bc_rows] * 4)
        self._bc_cols = np.concatenate(
            [
                np.broadcast_to(u_col + j[None, :], (2 * q, q)).ravel(),
                np.broadcast_to(u_col + N * q + j[None, :], (2 * q, q)).ravel(),
                np.broadcast_to(w_col + j[None, :], (2 * q, q)).ravel(),
                np.broadcast_to(w_col + N * q + j[None, :], (2 * q, q)).ravel(),
            ]
        )

    def residual(self, u, w, rhs, bop, res_lambda):
        F, G = kernels.pair_defects(u, w, rhs, self.dt, self.inv_lam)
        R = self.bc_residual(u, w, bop, res_lambda)
        return np.concatenate([F.ravel(), G.ravel(), R])

    def bc_residual(self, u, w, bop, res_lambda):
        P = self.inv_lam * np.concatenate([u[0], u[-1]])
        Phi = np.concatenate([w[0], -w[-1]])
        return P - resolvent(bop, res_lambda, P + res_lambda * Phi)

    def jacobian_triplets(self, u, w, bop, res_lambda):
        q = self.q
        dpsi = kernels.dphi_backward(w)
        dpsi_vals = np.concatenate(
            [(-0.5 * dpsi[:-1]).ravel(), (-0.5 * dpsi[1:]).ravel()]
        )
        P = self.inv_lam * np.concatenate([u[0], u[-1]])
        Phi = np.concatenate([w[0], -w[-1]])
        Jr = resolvent_jacobian(bop, res_lambda, P + res_lambda * Phi)
        W_pos = np.eye(2 * q) - Jr
        W_flux = -res_lambda * Jr
        bc_vals = np.concatenate(
            [
                (self.inv_lam * W_pos[:, :q]).ravel(),
                (self.inv_lam * W_pos[:, q:]).ravel(),
                W_flux[:, :q].ravel(),
                (-W_flux[:, q:]).ravel(),
            ]
        )
        rows = np.concatenate([self._static_rows, self._dpsi_rows, self._bc_rows])
        cols = np.concatenate([self._static_cols, self._dpsi_cols, self._bc_cols])
        vals = np.concatenate([self._static_vals, dpsi_vals, bc_vals])
        return rows, cols, vals


# ---------------------------------------------------------------------------
# operations

def solve_S(problem, opts=None, initial=None):
    """Solve -[phi(u')]' + u = h with the boundary inclusion closed by resolvent.

    Damped Newton on the (u, w) collocation system, by default from the
    zero initial guess; on divergence the data is ramped in four stages
    (s*h for s = 0.25, 0.5, 0.75, 1) with warm starts.  ``initial`` may be
    a GridFunction used as the starting iterate instead of zero.

    Returns a GridFunction whose scaled residual is at most opts.tol in the
    inf-norm; raises NewtonDivergenceError if all attempts stall.
    """
    opts = opts or SolveOptions()
    grid, bop = problem.grid, problem.bop
    q, N = bop.q, grid.N
    nodal = (N + 1) * q
    struct = _ComponentStructure(q, N, grid.dt, 1.0, 0, 0, nodal)

    def unpack(X):
        return (
            np.ascontiguousarray(X[:nodal].reshape(N + 1, q)),
            np.ascontiguousarray(X[nodal:].reshape(N + 1, q)),
        )

    def make_residual(rhs):
        def fn(X):
            u, w = unpack(X)
            return struct.residual(u, w, rhs, bop, opts.resolvent_lambda)

        return fn

    size = 2 * nodal

    def jac(X):
        u, w = unpack(X)
        rows, cols, vals = struct.jacobian_triplets(u, w, bop, opts.resolvent_lambda)
        return sp.coo_matrix((vals, (rows, cols)), shape=(size, size))

    if initial is not None:
        X0 = np.concatenate([initial.u.ravel(), initial.w.ravel()])
    else:
        X0 = np.zeros(size)

    from .errors import NewtonDivergenceError

    try:
        X, _, _ = damped_newton(
            make_residual(problem.h), jac, X0, opts.tol, opts.max_iter, opts.max_halvings
        )
    except NewtonDivergenceError:
        X = np.zeros(size)
        for s in (0.25, 0.5, 0.75, 1.0):
            X, _, _ = damped_newton(
                make_residual(s * problem.h), jac, X, opts.tol,
                opts.max_iter, opts.max_halvings,
            )
    u, w = unpack(X)
    return GridFunction(u, w)


def discrete_residual(gf, problem, res_lambda=1.0):
    """(ode_res, bc_res): inf-norms of the scaled collocation defect and BC residual."""
    grid = problem.grid
    F, G = kernels.pair_defects(gf.u, gf.w, problem.h, grid.dt, 1.0)
    ode = max(float(np.abs(F).max()), float(np.abs(G).max())) if F.size else 0.0
    struct = _ComponentStructure(gf.q, grid.N, grid.dt, 1.0, 0, 0, 0)
    bc = float(np.abs(struct.bc_residual(gf.u, gf.w, problem.bop, res_lambda)).max())
    return ode, bc


def manufactured_rhs(u_fn, du_fn, ddu_fn, grid):
    """Build the data h = -d/dt[phi(u*')] + u* for a chosen smooth u*.

    The three callables evaluate u*, u*' and u*'' at an array of times,
    returning (k, q) arrays.  Returns (h, u_exact, w_exact) nodal arrays;
    raises DomainError if the trial velocity touches the unit ball.
    """
    t = grid.nodes
    U = np.ascontiguousarray(np.asarray(u_fn(t), dtype=float))
    dU = np.ascontiguousarray(np.asarray(du_fn(t), dtype=float))
    ddU = np.ascontiguousarray(np.asarray(ddu_fn(t), dtype=float))
    if U.ndim != 2 or U.shape[0] != grid.N + 1:
        raise ValueError("u_fn must return an (N+1, q) array")
    if kernels.max_row_norm(dU) >= 1.0:
        raise DomainError("manufactured velocity reaches the unit ball")
    w_exact = phi(dU)
    h = -np.einsum("kab,kb->ka", dphi(dU), ddU) + U
    return h, U, w_exact


def continuity_gap(h1, h2, bop, grid, opts=None):
    """Quantitative continuity of the solution operator.

    Solves both problems and returns (lhs, rhs) with
    lhs = |u1 - u2|_H1^2 and rhs = sqrt(T) * |h1 - h2|_inf * |u1 - u2|_L2;
    the discrete lhs exceeds rhs by at most O(1/N^2).
    """
    g1 = solve_S(LinearProblem(h1, bop, grid), opts)
    g2 = solve_S(LinearProblem(h2, bop, grid), opts)
    du = g1.u - g2.u
    dvel = g1.velocity() - g2.velocity()
    l2_sq = l2_norm_sq(du, grid)
    lhs = l2_sq + l2_norm_sq(dvel, grid)
    gap = np.ascontiguousarray(np.asarray(h1, dtype=float) - np.asarray(h2, dtype=float))
    rhs = float(np.sqrt(grid.T) * kernels.max_row_norm(gap) * np.sqrt(l2_sq))
    return float(lhs), rhs
