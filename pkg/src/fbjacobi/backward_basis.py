"""Fractional backward Jacobi basis: the terminal-endpoint mapping
z = 1-(1-t)^rho, basis evaluation, weights, transformed derivatives, and
collocation nodes.

Everything polynomial happens in the z variable; t enters only at the
user-facing evaluation boundary, so the basis stays accurate arbitrarily
close to t = 1.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .jacobi_core import JacobiParams, gauss_rule, jacobi_eval
from .special_functions import gamma_ratio


@dataclass(frozen=True)
class BackwardSpec:
    """One basis family: Jacobi exponents plus the mapping exponent rho."""

    params: JacobiParams
    rho: float

    def __post_init__(self):
        if not (0.0 < self.rho <= 1.0):
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")

    def shifted(self, k: int) -> "BackwardSpec":
        return BackwardSpec(self.params.shifted(k), self.rho)


def _as_float_or_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def map_forward(spec: BackwardSpec, t):
    """z(t) = 1 - (1-t)^rho; monotone on [0,1], fixing both endpoints."""
    arr, scalar = _as_float_or_array(t)
    with np.errstate(divide="ignore"):
        z = -np.expm1(spec.rho * np.log1p(-arr))
    return float(z) if scalar else z


def map_inverse(spec: BackwardSpec, z):
    """t(z) = 1 - (1-z)^{1/rho}, the exact inverse of map_forward.

    Computed through expm1/log1p; when (1-z)^{1/rho} underflows the result
    is exactly 1.0, which is the intended terminal-endpoint convention.
    """
    arr, scalar = _as_float_or_array(z)
    with np.errstate(divide="ignore"):
        t = -np.expm1(np.log1p(-arr) / spec.rho)
    return float(t) if scalar else t


def fb_eval(spec: BackwardSpec, r: int, t):
    """Backward basis function of degree r: P_r^{mu,upsilon}(1 - 2(1-t)^rho)."""
    arr, scalar = _as_float_or_array(t)
    x = 2.0 * map_forward(spec, arr) - 1.0
    val = jacobi_eval(spec.params, r, x)
    return float(val) if scalar else val


def fb_weight(spec: BackwardSpec, t):
    """Orthogonality weight rho (1-t)^{rho(mu+1)-1} (1-(1-t)^rho)^upsilon."""
    arr, scalar = _as_float_or_array(t)
    one_minus = 1.0 - arr
    z = map_forward(spec, arr)
    val = (
        spec.rho
        * one_minus ** (spec.rho * (spec.params.mu + 1.0) - 1.0)
        * z ** spec.params.upsilon
    )
    return float(val) if scalar else val


def fb_weight_tilde(spec: BackwardSpec, t):
    """Derivative-side weight rho^{-1} (1-t)^{rho mu + 1} (1-(1-t)^rho)^{upsilon+1}."""
    arr, scalar = _as_float_or_array(t)
    one_minus = 1.0 - arr
    z = map_forward(spec, arr)
    val = (
        one_minus ** (spec.rho * spec.params.mu + 1.0)
        * z ** (spec.params.upsilon + 1.0)
        / spec.rho
    )
    return float(val) if scalar else val


def deriv_factor(spec: BackwardSpec, r: int, k: int) -> float:
    """Coefficient linking the k-th transformed derivative of degree r to the
    degree r-k basis function with parameters shifted by k.

    Built as the iterated product of the per-step factors r+mu+upsilon+1+j;
    the product telescopes to a ratio of gamma functions, which is checked
    here and warned about if it ever drifts beyond rounding.
    """
    if not 1 <= k <= r:
        raise ValueError(f"need 1 <= k <= r, got k={k}, r={r}")
    base = r + spec.params.mu + spec.params.upsilon + 1.0
    product = 1.0
    for j in range(k):
        product *= base + j
    ratio = gamma_ratio(base + k, base)
    if abs(product - ratio) > 1e-10 * max(abs(product), 1.0):
        warnings.warn(
            f"derivative factor mismatch at r={r}, k={k}: "
            f"product={product!r}, gamma ratio={ratio!r}; using the product",
            RuntimeWarning,
        )
    return product


def fb_deriv_eval(spec: BackwardSpec, r: int, k: int, t):
    """k-th transformed derivative of the degree-r basis function at t.

    Uses the closed-form identity onto the (mu+k, upsilon+k) family, so it is
    exact up to rounding even where d/dt itself is singular at t = 1.
    """
    factor = deriv_factor(spec, r, k)
    return factor * fb_eval(spec.shifted(k), r - k, t)


def sturm_liouville_apply(spec: BackwardSpec, r: int, t):
    """Left side of the singular Sturm-Liouville relation for the degree-r
    basis function, assembled from the first and second transformed
    derivatives with shifted parameters.

    Equals r(r+mu+upsilon+1) times the basis function itself; exposed so the
    eigenrelation can be verified as a runtime diagnostic.
    """
    if r < 1:
        return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
    z = map_forward(spec, t)
    mu, up = spec.params.mu, spec.params.upsilon
    out = ((mu + 1.0) * z - (up + 1.0) * (1.0 - z)) * fb_deriv_eval(spec, r, 1, t)
    if r >= 2:
        out = out - z * (1.0 - z) * fb_deriv_eval(spec, r, 2, t)
    return out


def fb_nodes(spec: BackwardSpec, n: int) -> np.ndarray:
    """The N+1 collocation nodes in (0,1): mapped Gauss nodes of degree N+1.

    For very small rho combined with large N the nodes nearest the terminal
    endpoint can round to 1.0 in double precision even though they are
    mathematically interior; solvers that need the distance to 1 should work
    from the z-space nodes instead.
    """
    rule = gauss_rule(spec.params, n + 1)
    return map_inverse(spec, rule.nodes)
