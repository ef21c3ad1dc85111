"""Operator splitting for the star-style regression objectives.

All models minimise over ``x = (f, mu)``::

    1/2 * sum_{i labeled} (f_i - Y_i)^2 + lam * sum_k w_k * phi(z_k),
    z_k = (f_i - mu_k)_{i in e_k}

with ``phi`` the max-norm (hyperedge selection), the l1 norm (joint
selection), the squared l1 norm (node selection) or the squared l2 norm
(dense). The dense objective is quadratic and is solved directly; the
others run scaled-form ADMM on the constraint ``A x = z``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import splu

from .hypergraph import Hypergraph, WeightScheme, validate
from .models import ModelKind
from .smoothness import median_midpoint
from .prox import (project_l1_ball, prox_l1_rows, prox_linf_rows,
                   prox_sql1_rows)


class SolverError(RuntimeError):
    pass


class SingularSystem(SolverError):
    """Some connected component has no labeled node."""


class MaxIterExceeded(UserWarning):
    pass


_DENSE_LIMIT = 2000


class StackedOperator:
    """The map ``(f, mu) -> (f_i - mu_k)`` over all (edge, member) slots.

    Slots are ordered edge by edge; block ``k`` occupies
    ``offsets[k]:offsets[k+1]``. ``pad``/``unpad`` move between the flat
    vector and an ``m x max|e|`` zero-padded array with one row per edge.
    """

    def __init__(self, h: Hypergraph):
        self.n, self.m = h.n, h.m
        self.nodes = h.member_nodes
        self.edges = h.member_edges
        self.offsets = h.offsets
        self.sizes = h.sizes
        self.rows = int(self.offsets[-1])
        self.width = int(self.sizes.max()) if self.m else 0
        self._cols = np.arange(self.rows) - np.repeat(self.offsets[:-1], self.sizes)

    @property
    def shape(self):
        return (self.rows, self.n + self.m)

    def apply(self, f, mu):
        return f[self.nodes] - mu[self.edges]

    def apply_x(self, x):
        return x[: self.n][self.nodes] - x[self.n:][self.edges]

    def adjoint(self, z):
        gf = np.bincount(self.nodes, weights=z, minlength=self.n)
        if self.m:
            gmu = -np.add.reduceat(z, self.offsets[:-1]) if self.rows else np.zeros(self.m)
        else:
            gmu = np.zeros(0)
        return gf, gmu

    def adjoint_x(self, z):
        gf, gmu = self.adjoint(z)
        return np.concatenate([gf, gmu])

    def matrix(self) -> sparse.csr_matrix:
        r = np.arange(self.rows)
        data = np.concatenate([np.ones(self.rows), -np.ones(self.rows)])
        rows = np.concatenate([r, r])
        cols = np.concatenate([self.nodes, self.n + self.edges])
        return sparse.csr_matrix((data, (rows, cols)), shape=self.shape)

    def gram(self) -> sparse.csr_matrix:
        """``A^T A`` (the unit-weight star-expansion Laplacian)."""
        A = self.matrix()
        return (A.T @ A).tocsr()

    def pad(self, z):
        Z = np.zeros((self.m, self.width))
        Z[self.edges, self._cols] = z
        return Z

    def unpad(self, Z):
        return Z[self.edges, self._cols]


@dataclass
class AdmmConfig:
    rho: float = 1.0
    tol_abs: float = 1e-8
    tol_rel: float = 1e-6
    max_iter: int = 10000
    over_relaxation: float = 1.0
    adaptive_rho: bool = False
    linear_solver: str = "cholesky"

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not (self.tol_abs > 0 and self.tol_rel > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 1.0 <= self.over_relaxation <= 1.8:
            raise ValueError("over_relaxation must lie in [1, 1.8]")
        if self.linear_solver not in ("cholesky", "cg"):
            raise ValueError("linear_solver is 'cholesky' or 'cg'")


@dataclass
class Diagnostics:
    iterations: int = 0
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    eps_primal: float = 0.0
    eps_dual: float = 0.0
    objective_trace: list = field(default_factory=list)
    converged: bool = True
    kkt_residual: float = 0.0
    rho: float = 0.0

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "eps_primal": self.eps_primal,
            "eps_dual": self.eps_dual,
            "converged": self.converged,
            "kkt_residual": self.kkt_residual,
            "rho": self.rho,
            "objective_trace": [float(v) for v in self.objective_trace],
        }


@dataclass
class Problem:
    h: Hypergraph
    y: np.ndarray
    mask: np.ndarray
    model: ModelKind
    lam: float
    ws: WeightScheme | str | None = None

    def __post_init__(self):
        self.model = ModelKind.parse(self.model)
        self.y = np.asarray(self.y, dtype=float)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.ws is None:
            self.ws = self.model.default_weights
        self.ws = WeightScheme.parse(self.ws)
        if self.y.shape != (self.h.n,) or self.mask.shape != (self.h.n,):
            raise ValueError("labels and mask must have one entry per node")
        if not self.lam >= 0:
            raise ValueError("lambda must be nonnegative")
        if not self.mask.any():
            raise ValueError("at least one node must be labeled")
        # hidden labels never enter the solver
        self.y = np.where(self.mask, self.y, 0.0)

    @property
    def weights(self) -> np.ndarray:
        return self.h.weights(self.ws) if self.h.m else np.zeros(0)


@dataclass
class Solution:
    f: np.ndarray
    mu: np.ndarray
    delta: np.ndarray
    objective: float
    diagnostics: Diagnostics
    z: np.ndarray | None = None
    u: np.ndarray | None = None


# -- penalties -------------------------------------------------------------

def block_measure(Z, penalty):
    """Per-row slack ``delta_k`` of padded blocks (before weighting)."""
    A = np.abs(Z)
    if penalty == "linf":
        return A.max(axis=1) if A.shape[1] else np.zeros(A.shape[0])
    if penalty in ("l1", "sql1"):
        return A.sum(axis=1)
    if penalty == "sq":
        return (A ** 2).sum(axis=1)
    raise ValueError(penalty)


def block_penalty(Z, penalty):
    d = block_measure(Z, penalty)
    return d ** 2 if penalty == "sql1" else d


_REPRESENTATIVE = {
    "linf": lambda v: 0.5 * (v.min() + v.max()),
    "l1": median_midpoint,
    "sql1": median_midpoint,
}

_PROX = {"linf": prox_linf_rows, "l1": prox_l1_rows, "sql1": prox_sql1_rows}


def objective_value(problem: Problem, f, mu) -> float:
    op = StackedOperator(problem.h)
    return _objective(problem, op, f, mu, problem.weights)


def _objective(problem, op, f, mu, w):
    r = (f - problem.y)[problem.mask]
    fit = 0.5 * float(r @ r)
    if op.m == 0 or problem.lam == 0:
        return fit
    pen = block_penalty(op.pad(op.apply(f, mu)), problem.model.penalty)
    return fit + problem.lam * float(w @ pen)


# -- linear algebra --------------------------------------------------------

def check_components(h: Hypergraph, mask, coupled: bool = True) -> np.ndarray:
    """Return the nodes in components without a labeled node.

    ``coupled=False`` treats every node as its own component (no
    regularisation).
    """
    mask = np.asarray(mask, dtype=bool)
    if not coupled:
        return np.flatnonzero(~mask)
    comp = h.components()
    labeled = np.zeros(comp.max() + 1 if comp.size else 0, dtype=bool)
    labeled[comp[mask]] = True
    return np.flatnonzero(~labeled[comp])


def conjugate_gradient(matvec, b, x0=None, rtol=1e-10, maxiter=None):
    """Plain CG for SPD systems; stops at ``||r|| <= rtol * ||b||``."""
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    maxiter = maxiter or 10 * len(b)
    r = b - matvec(x)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return np.zeros_like(b), 0
    p = r.copy()
    rs = r @ r
    for it in range(maxiter):
        if math.sqrt(rs) <= rtol * bnorm:
            return x, it
        Ap = matvec(p)
        pAp = p @ Ap
        if pAp <= 0:
            raise SingularSystem("system matrix is not positive definite")
        alpha = rs / pAp
        x += alpha * p
        r -= alpha * Ap
        rs_new = r @ r
        p = r + (rs_new / rs) * p
        rs = rs_new
    if math.sqrt(rs) > rtol * bnorm:
        raise SolverError("conjugate gradient did not reach tolerance")
    return x, maxiter


def solve_quadratic_subproblem(mask, Y, A: StackedOperator, rho: float, rhs, x0=None,
                               h: Hypergraph | None = None):
    """Solve ``(M_L + rho A^T A) x = rhs`` for ``x = (f, mu)`` by CG.

    ``M_L`` is the 0/1 diagonal label mask on the ``f`` block. ``Y`` is
    unused by the system itself; it is accepted so callers can build ``rhs``
    from the same arguments. Pass ``h`` to get :class:`SingularSystem` for
    unlabeled components instead of a CG failure.
    """
    mask = np.asarray(mask, dtype=bool)
    if h is not None:
        bad = check_components(h, mask)
        if bad.size:
            raise SingularSystem(f"{bad.size} nodes lie in unlabeled components")
    dmask = np.concatenate([mask.astype(float), np.zeros(A.m)])

    def matvec(x):
        return dmask * x + rho * A.adjoint_x(A.apply_x(x))

    x, _ = conjugate_gradient(matvec, np.asarray(rhs, dtype=float), x0=x0, rtol=1e-10)
    return x[: A.n], x[A.n:]


class _XSolver:
    """Solves ``(M_L + rho A^T A) x = b`` repeatedly for a fixed matrix."""

    def __init__(self, op: StackedOperator, mask, rho, method):
        self.op, self.rho, self.method = op, rho, method
        self.mask = np.asarray(mask, dtype=bool)
        self._x = None
        if method == "cg":
            return
        K = op.gram() * rho + sparse.diags(np.concatenate([self.mask.astype(float),
                                                           np.zeros(op.m)]))
        if K.shape[0] <= _DENSE_LIMIT:
            c = scipy.linalg.cho_factor(K.toarray())
            self._inv = scipy.linalg.cho_solve(c, np.eye(K.shape[0]))
            self._lu = None
        else:
            self._inv = None
            self._lu = splu(K.tocsc())

    def __call__(self, b):
        if self.method == "cg":
            f, mu = solve_quadratic_subproblem(self.mask, None, self.op, self.rho, b, x0=self._x)
            self._x = np.concatenate([f, mu])
            return self._x
        if self._inv is not None:
            return self._inv @ b
        return self._lu.solve(b)


# -- KKT -------------------------------------------------------------------

def _simplex_project(x, c):
    """Project onto ``{a >= 0, sum a = c}``."""
    s = np.sort(x)[::-1]
    cs = np.cumsum(s) - c
    j = np.arange(1, len(s) + 1)
    k = np.nonzero(s - cs / j > 0)[0][-1]
    return np.maximum(x - cs[k] / (k + 1), 0.0)


def _project_subdifferential(zk, yk, c, penalty, eps):
    a = np.abs(zk)
    if penalty == "l1":
        v = np.clip(yk, -c, c)
        big = a > eps
        v[big] = c * np.sign(zk[big])
        return v
    if penalty == "sql1":
        S = a.sum()
        if S <= eps:
            return np.zeros_like(yk)
        g = 2 * c * S
        v = np.clip(yk, -g, g)
        big = a > eps
        v[big] = g * np.sign(zk[big])
        return v
    if penalty == "linf":
        M = a.max()
        if M <= eps:
            return project_l1_ball(yk, c)
        act = a >= M - eps
        s = np.sign(zk[act])
        v = np.zeros_like(yk)
        v[act] = s * _simplex_project(s * yk[act], c)
        return v
    raise ValueError(penalty)


def kkt_residual(problem: Problem, f, mu, y_dual, eps: float = 1e-9) -> float:
    """Upper bound on the distance from 0 to the objective's subdifferential.

    The ADMM multiplier is projected, block by block, onto the subdifferential
    of the penalty at ``A x`` (entries within ``eps`` of a kink count as
    being on it); the returned value is ``||grad fit + A^T v||_inf``.
    """
    op = StackedOperator(problem.h)
    w = problem.weights
    Ax = op.apply(f, mu)
    v = np.empty_like(Ax)
    for k in range(op.m):
        sl = slice(op.offsets[k], op.offsets[k + 1])
        v[sl] = _project_subdifferential(Ax[sl], y_dual[sl], problem.lam * w[k],
                                         problem.model.penalty, eps)
    gf = np.where(problem.mask, f - problem.y, 0.0)
    g = np.concatenate([gf, np.zeros(op.m)]) + op.adjoint_x(v)
    return float(np.abs(g).max()) if g.size else 0.0


# -- solvers ---------------------------------------------------------------

def _pin_unlabeled(problem: Problem, pin: bool, coupled: bool):
    bad = check_components(problem.h, problem.mask, coupled=coupled)
    if bad.size == 0:
        return problem.mask, problem.y
    if not pin:
        raise SingularSystem(f"{bad.size} nodes lie in components without labels")
    # any constant is optimal on a label-free component; use the observed mean
    mask, y = problem.mask.copy(), problem.y.copy()
    mask[bad] = True
    y[bad] = problem.y[problem.mask].mean()
    return mask, y


def solve_dense(problem: Problem, pin_unlabeled: bool = False) -> Solution:
    """Closed-form dense model: ``(M_L + 2 lam L_w) f = M_L Y`` with edge means eliminated."""
    validate(problem.h)
    h, lam = problem.h, problem.lam
    mask, y = _pin_unlabeled(problem, pin_unlabeled, coupled=lam > 0 and h.m > 0)
    w = problem.weights
    K = sparse.diags(mask.astype(float))
    if lam > 0 and h.m:
        B = h.incidence()
        deg_w = B @ w
        Lw = sparse.diags(deg_w) - B @ sparse.diags(w / h.sizes) @ B.T
        K = K + 2 * lam * Lw
    K = sparse.csc_matrix(K)
    f = splu(K).solve(np.where(mask, y, 0.0))
    op = StackedOperator(h)
    mu = np.add.reduceat(f[op.nodes], op.offsets[:-1]) / h.sizes if h.m else np.zeros(0)
    delta = block_measure(op.pad(op.apply(f, mu)), "sq") if h.m else np.zeros(0)
    obj = _objective(problem, op, f, mu, w)
    return Solution(f, mu, delta, obj, Diagnostics(rho=0.0))


def admm_solve(problem: Problem, cfg: AdmmConfig | None = None, warm: Solution | None = None,
               pin_unlabeled: bool = False) -> Solution:
    """Minimise the model objective; dense problems are delegated to :func:`solve_dense`.

    ``warm`` reuses ``(f, mu, z, u)`` from a previous solve on the same
    hypergraph, e.g. the neighbouring point of a lambda grid.
    """
    cfg = cfg or AdmmConfig()
    validate(problem.h)
    if problem.model is ModelKind.DENSE:
        return solve_dense(problem, pin_unlabeled)
    h, lam = problem.h, problem.lam
    mask, y = _pin_unlabeled(problem, pin_unlabeled, coupled=lam > 0 and h.m > 0)
    n, m = h.n, h.m
    op = StackedOperator(h)
    w = problem.weights
    penalty = problem.model.penalty
    diag = Diagnostics()

    if m == 0 or lam == 0:
        # no coupling: labeled nodes keep their labels
        f = np.where(mask, y, 0.0)
        rep = _REPRESENTATIVE[penalty]
        mu = np.array([rep(f[list(e.nodes)]) for e in h.edges])
        z = op.apply(f, mu)
        delta = block_measure(op.pad(z), penalty) if m else np.zeros(0)
        diag.rho = cfg.rho
        return Solution(f, mu, delta, _objective(problem, op, f, mu, w), diag, z, np.zeros_like(z))

    rho = cfg.rho
    alpha = cfg.over_relaxation
    b = np.concatenate([np.where(mask, y, 0.0), np.zeros(m)])
    if warm is not None and warm.z is not None and warm.z.shape == (op.rows,):
        x = np.concatenate([warm.f, warm.mu])
        z = warm.z.copy()
        u = warm.u.copy() if warm.u is not None else np.zeros(op.rows)
    else:
        f0 = np.where(mask, y, y[mask].mean())
        mu0 = np.add.reduceat(f0[op.nodes], op.offsets[:-1]) / h.sizes
        x = np.concatenate([f0, mu0])
        z = op.apply_x(x)
        u = np.zeros(op.rows)
    solve = _XSolver(op, mask, rho, cfg.linear_solver)
    prox = _PROX[penalty]
    sqrt_rows, sqrt_cols = math.sqrt(op.rows), math.sqrt(n + m)

    best_obj, best_x = math.inf, x
    trace = diag.objective_trace
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        x = solve(b + rho * op.adjoint_x(z - u))
        Ax = op.apply_x(x)
        Ax_hat = alpha * Ax + (1 - alpha) * z if alpha != 1.0 else Ax
        z_old = z
        z = op.unpad(prox(op.pad(Ax_hat + u), lam * w / rho))
        u = u + Ax_hat - z

        fx = x[:n]
        res = (fx - y)[mask]
        obj = 0.5 * float(res @ res) + lam * float(w @ block_penalty(op.pad(Ax), penalty))
        trace.append(obj)
        if obj < best_obj:
            best_obj, best_x = obj, x

        r = np.linalg.norm(Ax - z)
        s = rho * np.linalg.norm(op.adjoint_x(z - z_old))
        eps_pri = sqrt_rows * cfg.tol_abs + cfg.tol_rel * max(np.linalg.norm(Ax), np.linalg.norm(z))
        eps_dual = sqrt_cols * cfg.tol_abs + cfg.tol_rel * rho * np.linalg.norm(op.adjoint_x(u))
        if r <= eps_pri and s <= eps_dual:
            converged = True
            break
        if cfg.adaptive_rho and it % 10 == 0:
            if r > 10 * s:
                rho, u = rho * 2, u / 2
            elif s > 10 * r:
                rho, u = rho / 2, u * 2
            else:
                continue
            solve = _XSolver(op, mask, rho, cfg.linear_solver)

    diag.iterations = it
    diag.primal_residual, diag.dual_residual = float(r), float(s)
    diag.eps_primal, diag.eps_dual = float(eps_pri), float(eps_dual)
    diag.converged = converged
    diag.rho = rho
    if not converged:
        warnings.warn(f"ADMM stopped after {it} iterations without converging", MaxIterExceeded)
        x = best_x
    f, mu = x[:n].copy(), x[n:].copy()
    Ax = op.apply(f, mu)
    delta = block_measure(op.pad(Ax), penalty)
    diag.kkt_residual = kkt_residual(problem, f, mu, rho * u,
                                     eps=max(10 * float(np.abs(Ax - z).max()), 1e-12))
    return Solution(f, mu, delta, _objective(problem, op, f, mu, w), diag, z, u)
