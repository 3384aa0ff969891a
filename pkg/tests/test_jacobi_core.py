import math

import numpy as np
import pytest
import scipy.special

from fbjacobi.jacobi_core import (
    JacobiParams,
    QuadratureRule,
    gauss_rule,
    jacobi_eval,
    jacobi_norm,
)
from fbjacobi.special_functions import beta, gamma_ratio

PARAM_GRID = [
    JacobiParams(-0.25, -0.25),
    JacobiParams(-0.5, -0.5),
    JacobiParams(0.0, 0.0),
    JacobiParams(0.3, -0.2),
    JacobiParams(1.0, -0.5),
    JacobiParams(5.0, -2.0 / 3.0),
]


class TestJacobiParams:
    def test_validates_exponents(self):
        with pytest.raises(ValueError):
            JacobiParams(-1.0, 0.0)
        with pytest.raises(ValueError):
            JacobiParams(0.0, -1.5)

    def test_shifted(self):
        p = JacobiParams(-0.5, 0.25).shifted(2)
        assert p.mu == 1.5 and p.upsilon == 2.25


class TestJacobiEval:
    def test_degree_zero_and_one(self):
        p = JacobiParams(0.7, -0.3)
        assert jacobi_eval(p, 0, 0.37) == 1.0
        leg = JacobiParams(0.0, 0.0)
        for x in (-1.0, -0.2, 0.9):
            assert abs(jacobi_eval(leg, 1, x) - x) < 1e-15

    def test_endpoint_identity(self):
        # P_r(1) = Gamma(r+mu+1) / (r! Gamma(mu+1))
        p = JacobiParams(0.3, -0.2)
        val = jacobi_eval(p, 4, 1.0)
        ref = gamma_ratio(4.0 + p.mu + 1.0, p.mu + 1.0) / math.factorial(4)
        assert abs(val - ref) <= 1e-13 * abs(ref)

    def test_vectorized_matches_scalar(self):
        p = JacobiParams(-0.5, 0.3)
        xs = np.linspace(-1, 1, 11)
        vec = jacobi_eval(p, 6, xs)
        assert vec.shape == xs.shape
        for x, v in zip(xs, vec):
            assert v == jacobi_eval(p, 6, float(x))

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            jacobi_eval(JacobiParams(0, 0), -1, 0.0)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_against_scipy(self, params):
        xs = np.linspace(-1.0, 1.0, 17)
        for r in (0, 1, 3, 8, 15):
            ref = scipy.special.eval_jacobi(r, params.mu, params.upsilon, xs)
            got = jacobi_eval(params, r, xs)
            scale = np.maximum(1.0, np.abs(ref))
            assert np.max(np.abs(got - ref) / scale) <= 1e-12


class TestJacobiNorm:
    def test_known_values(self):
        assert abs(jacobi_norm(JacobiParams(0, 0), 0) - 1.0) < 1e-14
        # Gamma(2)Gamma(2) / (1 * 3 * Gamma(2)) = 1/3
        assert abs(jacobi_norm(JacobiParams(0, 0), 1) - 1.0 / 3.0) < 1e-14
        # Chebyshev mass: the general formula is 0*inf at r=0
        assert abs(jacobi_norm(JacobiParams(-0.5, -0.5), 0) - math.pi) < 1e-13


class TestGaussRule:
    def test_midpoint_rule(self):
        rule = gauss_rule(JacobiParams(0, 0), 1)
        assert abs(rule.nodes[0] - 0.5) < 1e-15
        assert abs(rule.weights[0] - 1.0) < 1e-15

    def test_two_point_legendre(self):
        rule = gauss_rule(JacobiParams(0, 0), 2)
        off = 1.0 / (2.0 * math.sqrt(3.0))
        assert np.allclose(rule.nodes, [0.5 - off, 0.5 + off], atol=1e-15, rtol=0)
        assert np.allclose(rule.weights, [0.5, 0.5], atol=1e-15, rtol=0)

    def test_chebyshev_closed_form(self):
        rule = gauss_rule(JacobiParams(-0.5, -0.5), 5)
        expected = sorted((1.0 + math.cos((2 * i + 1) * math.pi / 10.0)) / 2.0
                          for i in range(5))
        assert np.allclose(rule.nodes, expected, atol=1e-13, rtol=0)
        assert np.allclose(rule.weights, math.pi / 5.0, atol=1e-13, rtol=0)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    @pytest.mark.parametrize("m", [1, 2, 5, 13, 40])
    def test_monomial_exactness(self, params, m):
        rule = gauss_rule(params, m)
        for k in range(2 * m):
            got = float(np.dot(rule.weights, rule.nodes**k))
            ref = beta(params.upsilon + k + 1.0, params.mu + 1.0)
            assert abs(got - ref) <= 1e-11 * ref, (k, got, ref)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_mass_and_shape(self, params):
        rule = gauss_rule(params, 17)
        assert np.all(np.diff(rule.nodes) > 0)
        assert rule.nodes[0] > 0 and rule.nodes[-1] < 1
        assert np.all(rule.weights > 0)
        mass = beta(params.mu + 1.0, params.upsilon + 1.0)
        assert abs(float(rule.weights.sum()) - mass) <= 1e-12 * mass

    @pytest.mark.parametrize("mu", [-0.5, -0.25, 0.0, 0.7])
    def test_symmetry_for_equal_exponents(self, mu):
        rule = gauss_rule(JacobiParams(mu, mu), 9)
        z = rule.nodes
        w = rule.weights
        assert np.max(np.abs(z + z[::-1] - 1.0)) <= 1e-12
        assert np.max(np.abs(w - w[::-1])) <= 1e-12 * np.max(w)

    def test_orthogonality_of_shifted_polynomials(self):
        n = 12
        for mu in (-0.25, -0.5, 0.0, 0.3):
            for up in (-0.25, -0.5, 0.0, 0.3):
                params = JacobiParams(mu, up)
                rule = gauss_rule(params, n + 1)
                x = 2.0 * rule.nodes - 1.0
                basis = np.vstack([jacobi_eval(params, r, x) for r in range(n + 1)])
                gram = basis @ (rule.weights[:, None] * basis.T)
                for r in range(n + 1):
                    for s in range(n + 1):
                        if r == s:
                            ref = jacobi_norm(params, r)
                            assert abs(gram[r, s] - ref) <= 1e-11 * ref
                        else:
                            assert abs(gram[r, s]) <= 1e-11

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    @pytest.mark.parametrize("m", [3, 11, 33])
    def test_against_scipy_roots(self, params, m):
        # scipy works on [-1,1] with weight (1-x)^mu (1+x)^upsilon; the affine
        # shift halves the interval and rescales the mass by 2^(mu+upsilon+1)
        x_ref, w_ref = scipy.special.roots_jacobi(m, params.mu, params.upsilon)
        rule = gauss_rule(params, m)
        assert np.max(np.abs(rule.nodes - (x_ref + 1.0) / 2.0)) <= 1e-13
        # weight agreement is limited by scipy's own accuracy for strongly
        # asymmetric weights at larger m (its monomial-moment error reaches
        # ~5e-13 there while this rule stays at ~1e-15)
        scale = 2.0 ** (params.mu + params.upsilon + 1.0)
        assert np.max(np.abs(rule.weights - w_ref / scale)) <= 5e-12 * np.max(rule.weights)

    def test_rejects_bad_size(self):
        with pytest.raises(ValueError):
            gauss_rule(JacobiParams(0, 0), 0)

    def test_rule_is_immutable(self):
        rule = gauss_rule(JacobiParams(0, 0), 3)
        with pytest.raises(ValueError):
            rule.nodes[0] = 0.0
