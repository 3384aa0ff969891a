"""Fully discrete backward collocation for the weakly singular adjoint
Volterra equation u(t) = g(t) + int_t^1 (rho - t)^{-theta} K(t, rho) u(rho) drho.

The kernel singularity is absorbed into a Jacobi weight by mapping the
integration variable through the same backward transformation that generates
the basis, so the discrete operator is a plain Gauss sum. Assembly works with
the z-space nodes and the exact distances 1 - t, which stay meaningful even
where t itself rounds to 1.
"""

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .approximation import Interpolant, barycentric_weights, cardinal_matrix
from .backward_basis import BackwardSpec, map_inverse
from .jacobi_core import JacobiParams, gauss_rule


class SingularMatrixError(ArithmeticError):
    """Exact zero pivot during LU elimination."""

    def __init__(self, pivot: int):
        super().__init__(f"singular collocation matrix: zero pivot at index {pivot}")
        self.pivot = pivot


class SourceEvaluationError(RuntimeError):
    """The source function failed at a collocation node."""


@dataclass(frozen=True)
class ProblemDefinition:
    """A weakly singular adjoint Volterra problem on [0,1].

    `kernel` is K(t, rho) on the triangle t <= rho <= 1 and `source` is g(t).
    `source_w`/`exact_w`, when given, are the same functions expressed in
    w = 1 - t; the solver prefers them near the terminal endpoint, where w is
    known far more accurately than t.
    """

    theta: float
    kernel: object
    source: object
    exact: object = None
    source_w: object = None
    exact_w: object = None
    label: str = "custom"

    def __post_init__(self):
        if not (0.0 < self.theta < 1.0):
            raise ValueError(f"theta must lie in (0,1), got {self.theta}")
        for t in (0.0, 0.3, 0.8):
            for rho_ in (t, 0.5 * (t + 1.0), 1.0):
                val = float(self.kernel(t, rho_))
                if not math.isfinite(val):
                    raise ValueError(
                        f"kernel not finite at (t, rho) = ({t}, {rho_}): {val}"
                    )

    def source_at(self, t: float, w: float) -> float:
        """Source value at t, using the w = 1-t form when available."""
        if self.source_w is not None:
            return float(self.source_w(w))
        return float(self.source(t))


@dataclass(frozen=True)
class SolveDiagnostics:
    condition: float
    residual: float
    assembly_seconds: float
    solve_seconds: float
    near_singular: bool


@dataclass(frozen=True)
class CollocationSolution:
    spec: BackwardSpec
    nodes_t: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    interpolant: Interpolant = field(repr=False)
    diagnostics: SolveDiagnostics = None

    def __call__(self, t):
        return self.interpolant(t)


def singular_ratio(rho: float, eta: float) -> float:
    """(1 - (1-eta)^{1/rho}) / eta, the bounded factor left over after the
    kernel singularity is pulled into the quadrature weight.

    Three-term Taylor expansion below eta = 1e-6 (direct evaluation loses all
    significance there), spliced to expm1/log1p evaluation above; the value
    tends to 1/rho as eta -> 0.
    """
    s = 1.0 / rho
    if eta < 1e-6:
        return s * (1.0 - 0.5 * (s - 1.0) * eta + (s - 1.0) * (s - 2.0) / 6.0 * eta * eta)
    return -math.expm1(math.log1p(-eta) * s) / eta


def kernel_transform(problem: ProblemDefinition, spec: BackwardSpec,
                     t_i: float, eta: float) -> float:
    """Transformed kernel value at collocation point t_i and quadrature
    variable eta: ((1-t_i)^{1-theta}/rho) * ratio(eta)^{-theta} * K(t_i, rho_i(eta))."""
    if t_i >= 1.0:
        raise ValueError(f"kernel transform requires t_i < 1, got {t_i}")
    if not (0.0 <= eta < 1.0):
        raise ValueError(f"eta must lie in [0,1), got {eta}")
    w = 1.0 - t_i
    s_eta = -math.expm1(math.log1p(-eta) / spec.rho) if eta > 0.0 else 0.0
    varrho = t_i + w * s_eta
    factor = singular_ratio(spec.rho, eta) ** (-problem.theta)
    return w ** (1.0 - problem.theta) / spec.rho * factor * float(problem.kernel(t_i, varrho))


class _Assembly:
    """Per (problem, spec, N) cache: collocation nodes, quadrature rule,
    transformed kernel factors, and barycentric weights."""

    def __init__(self, problem: ProblemDefinition, spec: BackwardSpec, n: int,
                 quad_size: int | None = None):
        self.problem = problem
        self.spec = spec
        self.n = n
        rho, theta = spec.rho, problem.theta

        rule = gauss_rule(spec.params, n + 1)
        self.nodes_z = rule.nodes
        self.log_w = np.log1p(-rule.nodes) / rho     # log(1 - t_i), exact route
        self.w_nodes = np.exp(self.log_w)            # 1 - t_i, always > 0 here
        if not np.all(self.w_nodes > 0.0):
            raise ValueError("collocation node reached the terminal endpoint")
        self.nodes_t = map_inverse(spec, rule.nodes)
        self.bary = barycentric_weights(self.nodes_z)

        m = (quad_size if quad_size is not None else n + 1)
        qrule = gauss_rule(JacobiParams(1.0 / rho - 1.0, -theta), m)
        self.eta = qrule.nodes
        self.chi = qrule.weights
        self.log_q = np.log1p(-qrule.nodes) / rho    # log(1 - s(eta_k))
        self.q = np.exp(self.log_q)                  # 1 - s(eta_k), in (0,1]
        self.mid = np.array(
            [singular_ratio(rho, e) ** (-theta) for e in qrule.nodes]
        )

    def kbar_row(self, i: int) -> np.ndarray:
        """Transformed kernel values at node i across all quadrature points."""
        w_i, t_i = self.w_nodes[i], self.nodes_t[i]
        varrho = 1.0 - w_i * self.q
        kv = np.array([float(self.problem.kernel(t_i, p)) for p in varrho])
        return w_i ** (1.0 - self.problem.theta) / self.spec.rho * self.mid * kv

    def quad_z_row(self, i: int) -> np.ndarray:
        """z images of the transformed quadrature points rho_i(eta_k)."""
        return -np.expm1(self.spec.rho * (self.log_w[i] + self.log_q))

    def quad_points(self, i: int) -> np.ndarray:
        return 1.0 - self.w_nodes[i] * self.q


def discrete_operator(problem: ProblemDefinition, spec: BackwardSpec, n: int,
                      phi, i: int, quad_size: int | None = None) -> float:
    """Gauss approximation of the adjoint integral operator applied to phi,
    evaluated at collocation node i of the degree-N node set."""
    ctx = _Assembly(problem, spec, n, quad_size=quad_size)
    pts = ctx.quad_points(i)
    phiv = np.array([float(phi(p)) for p in pts])
    return float(np.dot(ctx.chi, ctx.kbar_row(i) * phiv))


def assemble(problem: ProblemDefinition, spec: BackwardSpec, n: int):
    """Collocation matrix (identity minus discrete operator on the cardinal
    basis) and right-hand side of source values at the nodes."""
    ctx = _Assembly(problem, spec, n)
    return _assemble_from(ctx)


def _assemble_from(ctx: _Assembly):
    n = ctx.n
    mat = np.eye(n + 1)
    rhs = np.empty(n + 1)
    for i in range(n + 1):
        h = cardinal_matrix(ctx.nodes_z, ctx.bary, ctx.quad_z_row(i))
        mat[i, :] -= (ctx.chi * ctx.kbar_row(i)) @ h
        try:
            rhs[i] = ctx.problem.source_at(ctx.nodes_t[i], ctx.w_nodes[i])
        except Exception as exc:
            raise SourceEvaluationError(
                f"source evaluation failed at node {i} (t = {ctx.nodes_t[i]!r})"
            ) from exc
    return mat, rhs


def lu_factor(a: np.ndarray):
    """In-place LU with row partial pivoting; returns (lu, pivots)."""
    lu = np.array(a, dtype=float)
    n = lu.shape[0]
    piv = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if lu[p, k] == 0.0:
            raise SingularMatrixError(k)
        if p != k:
            lu[[k, p], :] = lu[[p, k], :]
            piv[[k, p]] = piv[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv


def lu_solve(lu: np.ndarray, piv: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = lu.shape[0]
    x = np.asarray(b, dtype=float)[piv].copy()
    for k in range(1, n):
        x[k] -= np.dot(lu[k, :k], x[:k])
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - np.dot(lu[k, k + 1:], x[k + 1:])) / lu[k, k]
    return x


def condition_1norm(mat: np.ndarray, lu: np.ndarray, piv: np.ndarray) -> float:
    """1-norm condition number, with the inverse norm taken column by column
    through the existing LU factors (systems here are small and dense)."""
    n = mat.shape[0]
    inv_norm = 0.0
    e = np.zeros(n)
    for j in range(n):
        e[j] = 1.0
        inv_norm = max(inv_norm, float(np.abs(lu_solve(lu, piv, e)).sum()))
        e[j] = 0.0
    return float(np.abs(mat).sum(axis=0).max()) * inv_norm


def solve(problem: ProblemDefinition, spec: BackwardSpec, n: int) -> CollocationSolution:
    """Solve the fully discrete collocation system by dense LU with partial
    pivoting and wrap the nodal values in an evaluable interpolant."""
    t0 = time.perf_counter()
    ctx = _Assembly(problem, spec, n)
    mat, rhs = _assemble_from(ctx)
    t1 = time.perf_counter()
    lu, piv = lu_factor(mat)
    values = lu_solve(lu, piv, rhs)
    t2 = time.perf_counter()

    cond = condition_1norm(mat, lu, piv)
    near_singular = cond > 1e12
    if near_singular:
        warnings.warn(
            f"collocation system is nearly singular (cond ~ {cond:.3e})",
            RuntimeWarning,
        )
    residual = float(np.max(np.abs(mat @ values - rhs)))
    diag = SolveDiagnostics(
        condition=cond,
        residual=residual,
        assembly_seconds=t1 - t0,
        solve_seconds=t2 - t1,
        near_singular=near_singular,
    )
    ip = Interpolant(spec, ctx.nodes_z, ctx.nodes_t, values, ctx.bary)
    return CollocationSolution(spec, ctx.nodes_t, values, ip, diag)
