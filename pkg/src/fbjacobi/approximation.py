"""Weighted projection, Gauss-node interpolation with the generalized
Lagrange basis, expansion evaluation, and error norms.

All Lagrange work is done barycentrically in the z variable where the basis
is polynomial; sampling grids are uniform in z so points cluster toward the
terminal endpoint t = 1.
"""

from dataclasses import dataclass, field

import numpy as np

from .backward_basis import BackwardSpec, map_forward, map_inverse
from .jacobi_core import JacobiParams, _recurrence_coeffs, gauss_rule, jacobi_norm

# Below this distance in z a sample point is treated as lying on a node,
# sidestepping the 0/0 in the barycentric quotient.
NODE_TOL = 1e-15


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    """Second-form barycentric weights for the given z nodes, normalized to
    unit maximum magnitude (the form is scale invariant)."""
    n = len(nodes)
    w = np.ones(n)
    for j in range(n):
        diff = nodes[j] - nodes
        diff[j] = 1.0
        w[j] = 1.0 / np.prod(diff)
    return w / np.max(np.abs(w))


def cardinal_values(nodes: np.ndarray, bary: np.ndarray, z: float) -> np.ndarray:
    """All cardinal functions h_j evaluated at a single z."""
    diff = z - nodes
    hit = np.abs(diff) < NODE_TOL
    if hit.any():
        out = np.zeros_like(nodes)
        out[np.argmax(hit)] = 1.0
        return out
    ratios = bary / diff
    return ratios / ratios.sum()


def cardinal_matrix(nodes: np.ndarray, bary: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Cardinal functions on a z grid; rows index grid points, columns nodes."""
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    diff = zs[:, None] - nodes[None, :]
    hits = np.abs(diff) < NODE_TOL
    diff[hits] = 1.0
    ratios = bary[None, :] / diff
    out = ratios / ratios.sum(axis=1, keepdims=True)
    rows = hits.any(axis=1)
    if rows.any():
        out[rows] = 0.0
        idx = np.argmax(hits[rows], axis=1)
        out[np.nonzero(rows)[0], idx] = 1.0
    return out


def _sample(func, ts: np.ndarray) -> np.ndarray:
    """Evaluate a scalar function on a grid, vectorizing when it supports it."""
    try:
        vals = np.asarray(func(ts), dtype=float)
        if vals.shape == ts.shape:
            return vals
    except Exception:
        pass
    return np.array([float(func(float(t))) for t in ts])


@dataclass(frozen=True)
class Expansion:
    """Coefficients c_0..c_N against the backward basis of a given spec."""

    spec: BackwardSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        self.coeffs.setflags(write=False)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        return eval_expansion(self, t)


@dataclass(frozen=True)
class Interpolant:
    """Nodal interpolant on the mapped Gauss nodes, evaluated barycentrically."""

    spec: BackwardSpec
    nodes_z: np.ndarray = field(repr=False)
    nodes_t: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    bary_weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("nodes_z", "nodes_t", "values", "bary_weights"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            arr.setflags(write=False)

    @property
    def degree(self) -> int:
        return len(self.nodes_z) - 1

    def __call__(self, t):
        return eval_interpolant(self, t)


def project(spec: BackwardSpec, n: int, f, quad_size: int | None = None) -> Expansion:
    """Orthogonal projection of f onto the degree-N backward basis space.

    Coefficients are weighted inner products divided by the basis norms, with
    the inner product evaluated in z by a Gauss rule; exact whenever f already
    lies in the space and quad_size >= N+1.
    """
    if quad_size is None:
        quad_size = max(2 * n, n + 32)
    if quad_size < n + 1:
        raise ValueError(f"quad_size must be >= N+1, got {quad_size} for N={n}")
    rule = gauss_rule(spec.params, quad_size)
    ts = map_inverse(spec, rule.nodes)
    fv = _sample(f, ts)
    x = 2.0 * rule.nodes - 1.0
    coeffs = np.empty(n + 1)
    p_prev = np.ones_like(x)
    p = None
    for r in range(n + 1):
        if r == 0:
            cur = p_prev
        elif r == 1:
            a0, b0, _ = _recurrence_coeffs(spec.params, 0)
            p = a0 * x + b0
            cur = p
        else:
            a, b, c = _recurrence_coeffs(spec.params, r - 1)
            p, p_prev = (a * x + b) * p - c * p_prev, p
            cur = p
        coeffs[r] = np.dot(rule.weights, fv * cur) / jacobi_norm(spec.params, r)
    return Expansion(spec, coeffs)


def eval_expansion(expansion: Expansion, t):
    """Expansion value at t via Clenshaw backward recurrence in z."""
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    x = 2.0 * map_forward(expansion.spec, arr) - 1.0
    c = expansion.coeffs
    n = len(c) - 1
    if n == 0:
        out = np.broadcast_to(c[0], np.shape(x)).copy() if not scalar else c[0]
        return float(out) if scalar else np.asarray(out, dtype=float)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for k in range(n, 0, -1):
        a, b, _ = _recurrence_coeffs(expansion.spec.params, k)
        _, _, c_next = _recurrence_coeffs(expansion.spec.params, k + 1)
        b1, b2 = c[k] + (a * x + b) * b1 - c_next * b2, b1
    a0, b0, _ = _recurrence_coeffs(expansion.spec.params, 0)
    _, _, c1 = _recurrence_coeffs(expansion.spec.params, 1)
    out = c[0] + (a0 * x + b0) * b1 - c1 * b2
    return float(out) if scalar else out


def interpolate(spec: BackwardSpec, n: int, f) -> Interpolant:
    """Interpolant of f at the N+1 mapped Gauss nodes of the basis family."""
    rule = gauss_rule(spec.params, n + 1)
    nodes_z = np.asarray(rule.nodes, dtype=float)
    nodes_t = map_inverse(spec, nodes_z)
    values = _sample(f, np.atleast_1d(nodes_t))
    return Interpolant(spec, nodes_z, nodes_t, values, barycentric_weights(nodes_z))


def eval_interpolant(ip: Interpolant, t):
    """Interpolant value at t; nodal inputs reproduce the stored values exactly."""
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr)
    zs = map_forward(ip.spec, flat)
    out = cardinal_matrix(ip.nodes_z, ip.bary_weights, zs) @ ip.values
    # The z image of a stored node can drift by a few ulps through the t
    # round trip; exact t matches short-circuit that. t = 1.0 is excluded:
    # distinct near-terminal nodes can share that representation, so it is
    # always evaluated through z.
    for j, tj in enumerate(ip.nodes_t):
        if tj != 1.0:
            out[flat == tj] = ip.values[j]
    return float(out[0]) if scalar else out


def weighted_l2_error(spec: BackwardSpec, f, g, quad_size: int) -> float:
    """Weighted L2 distance between f and g under the spec's basis weight,
    integrated in z by a Gauss rule of the given size."""
    if quad_size < 1:
        raise ValueError(f"quad_size must be >= 1, got {quad_size}")
    rule = gauss_rule(spec.params, quad_size)
    ts = map_inverse(spec, rule.nodes)
    diff = _sample(f, ts) - _sample(g, ts)
    return float(np.sqrt(np.dot(rule.weights, diff * diff)))


def eval_grid(rho: float, samples: int) -> np.ndarray:
    """Standard evaluation grid: uniform in z over [z(1e-6), 1 - 1e-12],
    mapped back to t, so samples cluster toward the terminal endpoint."""
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    spec = BackwardSpec(JacobiParams(0.0, 0.0), rho)
    z_lo = map_forward(spec, 1e-6)
    zs = np.linspace(z_lo, 1.0 - 1e-12, samples)
    return map_inverse(spec, zs)


def linf_error(f, g, samples: int, rho: float = 1.0) -> float:
    """Max |f - g| over the standard z-uniform evaluation grid."""
    ts = eval_grid(rho, samples)
    return float(np.max(np.abs(_sample(f, ts) - _sample(g, ts))))


def lebesgue_constant(spec: BackwardSpec, n: int, samples: int) -> float:
    """Max over a uniform z grid of the summed absolute cardinal functions."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    rule = gauss_rule(spec.params, n + 1)
    bary = barycentric_weights(rule.nodes)
    zs = np.linspace(0.0, 1.0, samples)
    h = cardinal_matrix(rule.nodes, bary, zs)
    return float(np.max(np.sum(np.abs(h), axis=1)))
