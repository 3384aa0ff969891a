"""Classical Jacobi polynomials on [-1,1], shifted norms on [0,1], and
Gauss quadrature rules for the weight (1-z)^mu * z^upsilon on [0,1]."""

from dataclasses import dataclass, field

import math
import numpy as np

from .special_functions import beta, log_gamma


class QuadratureError(RuntimeError):
    """Gauss rule construction failed to converge or to validate."""


@dataclass(frozen=True)
class JacobiParams:
    """Exponent pair of a Jacobi weight: (1-z)^mu * z^upsilon, both > -1."""

    mu: float
    upsilon: float

    def __post_init__(self):
        if not (self.mu > -1.0 and self.upsilon > -1.0):
            raise ValueError(
                f"Jacobi exponents must satisfy mu, upsilon > -1, got "
                f"({self.mu}, {self.upsilon})"
            )

    def shifted(self, k: int) -> "JacobiParams":
        return JacobiParams(self.mu + k, self.upsilon + k)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule on [0,1] for the weight (1-z)^mu * z^upsilon.

    Nodes are strictly increasing in (0,1), weights positive, and the rule
    integrates polynomials up to degree 2M-1 exactly.
    """

    params: JacobiParams
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of sampled integrand values at the nodes."""
        return float(np.dot(self.weights, values))


def _recurrence_coeffs(params: JacobiParams, k: int):
    """(A_k, B_k, C_k) of P_{k+1}(x) = (A_k x + B_k) P_k(x) - C_k P_{k-1}(x)."""
    mu, up = params.mu, params.upsilon
    s = mu + up
    if k == 0:
        return (s + 2.0) / 2.0, (mu - up) / 2.0, 0.0
    two = 2.0 * k + s
    denom = 2.0 * (k + 1.0) * (k + s + 1.0)
    a = (two + 1.0) * (two + 2.0) / denom
    b = (two + 1.0) * (mu * mu - up * up) / (denom * two)
    c = 2.0 * (k + mu) * (k + up) * (two + 2.0) / (denom * two)
    return a, b, c


def jacobi_eval(params: JacobiParams, r: int, x):
    """Value of the classical Jacobi polynomial P_r^{mu,upsilon} at x in [-1,1].

    Forward three-term recurrence from degrees 0 and 1; `x` may be a scalar
    or an ndarray.
    """
    if r < 0:
        raise ValueError(f"degree must be nonnegative, got {r}")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if r == 0:
        return p_prev[()] if p_prev.ndim == 0 else p_prev
    a0, b0, _ = _recurrence_coeffs(params, 0)
    p = a0 * x + b0
    for k in range(1, r):
        a, b, c = _recurrence_coeffs(params, k)
        p, p_prev = (a * x + b) * p - c * p_prev, p
    return p[()] if p.ndim == 0 else p


def jacobi_norm(params: JacobiParams, r: int) -> float:
    """Squared weighted L2 norm of the degree-r shifted Jacobi polynomial on [0,1].

    Gamma(r+mu+1)Gamma(r+upsilon+1) / (r! (2r+mu+upsilon+1) Gamma(r+mu+upsilon+1)),
    computed in log space; r = 0 goes through the beta function directly since the
    general formula is a 0*inf form when mu+upsilon+1 = 0.
    """
    if r < 0:
        raise ValueError(f"degree must be nonnegative, got {r}")
    mu, up = params.mu, params.upsilon
    if r == 0:
        return beta(mu + 1.0, up + 1.0)
    log_val = (
        log_gamma(r + mu + 1.0)
        + log_gamma(r + up + 1.0)
        - log_gamma(r + 1.0)
        - log_gamma(r + mu + up + 1.0)
    )
    return math.exp(log_val) / (2.0 * r + mu + up + 1.0)


def gauss_rule(params: JacobiParams, m: int) -> QuadratureRule:
    """M-point Gauss rule on [0,1] for the weight (1-z)^mu * z^upsilon.

    Golub-Welsch: eigen-decomposition of the symmetric tridiagonal matrix of
    the monic three-term recurrence; weights come from the first components
    of the normalized eigenvectors scaled by the weight's total mass.
    """
    if m < 1:
        raise ValueError(f"rule size must be >= 1, got {m}")
    mu, up = params.mu, params.upsilon
    s = mu + up
    mass = beta(mu + 1.0, up + 1.0)

    # Monic recurrence coefficients for the weight on [-1,1], then the
    # affine shift x = 2z - 1 halves the diagonal offsets and off-diagonals.
    diag = np.empty(m)
    diag[0] = (up - mu) / (s + 2.0)
    off = np.empty(max(m - 1, 0))
    if m > 1:
        off[0] = math.sqrt(4.0 * (mu + 1.0) * (up + 1.0) / ((s + 2.0) ** 2 * (s + 3.0)))
    for k in range(1, m):
        two = 2.0 * k + s
        diag[k] = (up * up - mu * mu) / (two * (two + 2.0))
        if k < m - 1:
            kk = k + 1.0
            t2 = 2.0 * kk + s
            off[k] = math.sqrt(
                4.0 * kk * (kk + mu) * (kk + up) * (kk + s)
                / (t2 * t2 * (t2 + 1.0) * (t2 - 1.0))
            )
    jac = np.diag((diag + 1.0) / 2.0)
    if m > 1:
        half_off = off / 2.0
        jac += np.diag(half_off, 1) + np.diag(half_off, -1)
    try:
        nodes, vectors = np.linalg.eigh(jac)
    except np.linalg.LinAlgError as exc:
        raise QuadratureError(
            f"eigen-decomposition failed for params {params}, m={m}"
        ) from exc
    weights = mass * vectors[0, :] ** 2

    if not (np.all(np.diff(nodes) > 0.0) and nodes[0] > 0.0 and nodes[-1] < 1.0):
        raise QuadratureError(f"nodes not strictly inside (0,1) for {params}, m={m}")
    if not np.all(weights > 0.0):
        raise QuadratureError(f"nonpositive weight for {params}, m={m}")
    if abs(float(weights.sum()) - mass) > 1e-12 * mass:
        raise QuadratureError(f"weight mass off for {params}, m={m}")
    return QuadratureRule(params, nodes, weights)
