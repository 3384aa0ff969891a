import math

import mpmath
import numpy as np
import pytest

from fbjacobi.backward_basis import BackwardSpec, fb_nodes
from fbjacobi.jacobi_core import JacobiParams, gauss_rule
from fbjacobi.problems import case_i
from fbjacobi.special_functions import beta
from fbjacobi.volterra_solver import (
    CollocationSolution,
    ProblemDefinition,
    SingularMatrixError,
    SourceEvaluationError,
    assemble,
    condition_1norm,
    discrete_operator,
    kernel_transform,
    lu_factor,
    lu_solve,
    singular_ratio,
    solve,
)


def spec_of(mu, up, rho):
    return BackwardSpec(JacobiParams(mu, up), rho)


def unit_problem(theta):
    return ProblemDefinition(theta=theta, kernel=lambda t, p: 1.0, source=lambda t: 0.0)


class TestProblemDefinition:
    def test_theta_bounds(self):
        with pytest.raises(ValueError):
            unit_problem(0.0)
        with pytest.raises(ValueError):
            unit_problem(1.0)

    def test_kernel_finiteness_sampled(self):
        with pytest.raises(ValueError):
            ProblemDefinition(
                theta=0.5,
                kernel=lambda t, p: 1.0 / (p - t + (0.0 if t < p else 0.0))
                if p > t else math.inf,
                source=lambda t: 0.0,
            )

    def test_source_w_preferred(self):
        prob = ProblemDefinition(
            theta=0.5,
            kernel=lambda t, p: 1.0,
            source=lambda t: -1.0,
            source_w=lambda w: float(w),
        )
        assert prob.source_at(0.75, 0.25) == 0.25


class TestKernelTransform:
    def test_ratio_limit_and_splice(self):
        # the bounded factor tends to 1/rho at eta -> 0 and the Taylor/direct
        # branches agree at the splice point
        for rho in (1.0, 0.5, 0.25, 1.0 / 3.0):
            assert abs(singular_ratio(rho, 0.0) - 1.0 / rho) < 1e-15
            lo = singular_ratio(rho, 1e-6 * (1 - 1e-10))
            hi = singular_ratio(rho, 1e-6 * (1 + 1e-10))
            assert abs(lo - hi) <= 1e-12 * abs(hi)

    def test_unit_rho_middle_factor_is_one(self):
        prob = unit_problem(0.5)
        spec = spec_of(-0.25, -0.25, 1.0)
        for eta in (0.1, 0.5, 0.9):
            val = kernel_transform(prob, spec, 0.25, eta)
            assert abs(val - (0.75) ** 0.5) <= 1e-14

    def test_transform_value(self):
        # rho=1/2, theta=1/2, K=1, t=0, eta=3/4:
        # prefactor (1-t)^{1/2}/rho = 2, ratio = (1-(1/4)^2)/(3/4) = 5/4
        prob = unit_problem(0.5)
        spec = spec_of(-0.25, -0.25, 0.5)
        ref = 2.0 * (5.0 / 4.0) ** -0.5
        assert abs(kernel_transform(prob, spec, 0.0, 0.75) - ref) <= 1e-14 * ref

    def test_terminal_point_rejected(self):
        with pytest.raises(ValueError):
            kernel_transform(unit_problem(0.5), spec_of(0, 0, 0.5), 1.0, 0.5)
        with pytest.raises(ValueError):
            kernel_transform(unit_problem(0.5), spec_of(0, 0, 0.5), 0.5, 1.0)

    def test_transform_reproduces_integral(self):
        # summing the transformed kernel against the Jacobi rule reproduces
        # int_t^1 (p-t)^{-theta} dp = (1-t)^{1-theta}/(1-theta)
        prob = unit_problem(0.5)
        for rho in (1.0, 0.5):
            spec = spec_of(-0.25, -0.25, rho)
            rule = gauss_rule(JacobiParams(1.0 / rho - 1.0, -prob.theta), 12)
            for t in (0.0, 0.4):
                got = sum(
                    w * kernel_transform(prob, spec, t, float(e))
                    for e, w in zip(rule.nodes, rule.weights)
                )
                ref = (1.0 - t) ** 0.5 / 0.5
                assert abs(got - ref) <= 1e-12 * ref


class TestDiscreteOperator:
    def test_zero_function(self):
        prob = unit_problem(0.5)
        spec = spec_of(-0.25, -0.25, 0.5)
        assert discrete_operator(prob, spec, 6, lambda p: 0.0, 3) == 0.0

    def test_constant_against_weight_mass(self):
        # with K=1 the rule integrates constants exactly:
        # value at node i is (1-t_i)^{1-theta} * B(1, 1-theta) for rho=1
        prob = unit_problem(0.5)
        spec = spec_of(-0.25, -0.25, 1.0)
        nodes = fb_nodes(spec, 6)
        for i in (0, 3, 6):
            got = discrete_operator(prob, spec, 6, lambda p: 1.0, i)
            ref = 2.0 * (1.0 - nodes[i]) ** 0.5
            assert abs(got - ref) <= 1e-13 * ref

    def test_polynomial_against_beta_closed_form(self):
        # int_{1/4}^1 (p-1/4)^{-1/2} (1-p)^2 dp = (3/4)^{5/2} B(1/2, 3),
        # cross-checked against adaptive quadrature
        ref = (0.75) ** 2.5 * beta(0.5, 3.0)
        with mpmath.workdps(30):
            ada = float(
                mpmath.quad(
                    lambda p: (p - mpmath.mpf("0.25")) ** mpmath.mpf("-0.5") * (1 - p) ** 2,
                    [mpmath.mpf("0.25"), 1],
                )
            )
        assert abs(ref - ada) <= 1e-12 * ref
        prob = unit_problem(0.5)
        spec = spec_of(-0.25, -0.25, 1.0)
        rule = gauss_rule(JacobiParams(0.0, -0.5), 5)
        got = sum(
            w * kernel_transform(prob, spec, 0.25, float(e)) * (1.0 - (0.25 + 0.75 * float(e))) ** 2
            for e, w in zip(rule.nodes, rule.weights)
        )
        assert abs(got - ref) <= 1e-13 * ref

    def test_refinement_consistency_for_entire_integrands(self):
        for theta, rho in ((0.5, 1.0), (0.5, 0.5), (2.0 / 3.0, 1.0 / 3.0)):
            prob = unit_problem(theta)
            spec = spec_of(-0.25, -0.25, rho)
            n = 24
            for i in (0, 12, 24):
                a = discrete_operator(prob, spec, n, math.exp, i)
                b = discrete_operator(prob, spec, n, math.exp, i, quad_size=2 * n + 1)
                assert abs(a - b) < 1e-8


class TestAssemble:
    def test_zero_kernel_gives_identity(self):
        prob = ProblemDefinition(theta=0.5, kernel=lambda t, p: 0.0,
                                 source=lambda t: math.sin(3.0 * t))
        spec = spec_of(-0.25, -0.25, 0.5)
        mat, rhs = assemble(prob, spec, 7)
        assert np.array_equal(mat, np.eye(8))
        nodes = fb_nodes(spec, 7)
        assert np.max(np.abs(rhs - np.sin(3.0 * nodes))) <= 1e-15

    def test_row_sums_match_operator_on_one(self):
        prob = unit_problem(0.4)
        spec = spec_of(-0.25, -0.25, 0.5)
        n = 9
        mat, _ = assemble(prob, spec, n)
        operator_part = np.eye(n + 1) - mat
        for i in range(n + 1):
            ref = discrete_operator(prob, spec, n, lambda p: 1.0, i)
            assert abs(operator_part[i, :].sum() - ref) <= 1e-13 * max(1.0, abs(ref))

    def test_source_failure_reports_node(self):
        def bad_source(t):
            raise RuntimeError("boom")

        prob = ProblemDefinition(theta=0.5, kernel=lambda t, p: 1.0, source=bad_source)
        with pytest.raises(SourceEvaluationError, match="node 0"):
            assemble(prob, spec_of(-0.25, -0.25, 0.5), 4)


class TestLU:
    def test_solves_random_system(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((12, 12))
        b = rng.standard_normal(12)
        lu, piv = lu_factor(a)
        x = lu_solve(lu, piv, b)
        assert np.max(np.abs(a @ x - b)) <= 1e-11

    def test_singular_matrix_reports_pivot(self):
        a = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.5, 1.0, 1.5]])
        with pytest.raises(SingularMatrixError) as err:
            lu_factor(a)
        assert err.value.pivot == 1

    def test_condition_matches_numpy(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((9, 9)) + 3.0 * np.eye(9)
        lu, piv = lu_factor(a)
        ref = np.linalg.cond(a, 1)
        assert abs(condition_1norm(a, lu, piv) - ref) <= 1e-8 * ref


class TestSolve:
    def test_zero_kernel_interpolates_source(self):
        prob = ProblemDefinition(theta=0.5, kernel=lambda t, p: 0.0,
                                 source=lambda t: math.cos(2.0 * t))
        spec = spec_of(-0.25, -0.25, 0.5)
        sol = solve(prob, spec, 8)
        assert np.max(np.abs(sol.values - np.cos(2.0 * sol.nodes_t))) <= 1e-15

    def test_manufactured_polynomial_recovery(self):
        spec = spec_of(-0.25, -0.25, 1.0)
        for theta in (0.3, 0.5, 0.7):
            for n in (6, 10, 14):
                prob = case_i(theta, 2.0, 5.0)
                sol = solve(prob, spec, n)
                err = np.max(np.abs(sol.values - prob.exact(sol.nodes_t)))
                assert err <= 1e-10, (theta, n, err)

    def test_nodal_evaluation_is_exact(self):
        prob = case_i(0.5, math.sqrt(2.0), 2.0)
        sol = solve(prob, spec_of(-0.25, -0.25, 0.5), 10)
        got = np.array([sol(float(t)) for t in sol.nodes_t])
        assert np.array_equal(got, sol.values)

    def test_discrete_residual(self):
        prob = case_i(0.5, math.sqrt(2.0), math.sqrt(3.0))
        spec = spec_of(-0.5, -0.5, 0.5)
        n = 12
        sol = solve(prob, spec, n)
        scale = 1.0 + float(np.max(np.abs(sol.values)))
        for i in range(n + 1):
            lhs = sol.values[i]
            rhs = prob.source_at(sol.nodes_t[i], 1.0 - sol.nodes_t[i]) + discrete_operator(
                prob, spec, n, sol.interpolant, i
            )
            assert abs(lhs - rhs) <= 1e-10 * scale
        assert sol.diagnostics.residual <= 1e-10 * scale

    def test_example1_reference_accuracy(self):
        from fbjacobi.problems import example1

        prob = example1(0.5)
        spec = spec_of(-0.25, -0.25, 0.5)
        sol = solve(prob, spec, 20)
        from fbjacobi.approximation import linf_error

        assert linf_error(prob.exact, sol.interpolant, 2001, rho=0.5) <= 1e-6

    def test_vanishing_singularity_limit(self):
        # theta -> 0 turns the problem into u = g + int_t^1 u, equivalent to
        # u' = g' - u with u(1) = g(1); integrate that by RK4 as the oracle
        prob = ProblemDefinition(theta=1e-6, kernel=lambda t, p: 1.0,
                                 source=lambda t: float(t))
        spec = spec_of(-0.25, -0.25, 1.0)
        sol = solve(prob, spec, 16)

        def rhs(t, u):
            return 1.0 - u

        steps = 20000
        h = -1.0 / steps
        u = 1.0  # u(1) = g(1)
        t = 1.0
        grid = {round(t, 12): u}
        for _ in range(steps):
            k1 = rhs(t, u)
            k2 = rhs(t + h / 2, u + h * k1 / 2)
            k3 = rhs(t + h / 2, u + h * k2 / 2)
            k4 = rhs(t + h, u + h * k3)
            u += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
            t += h
            grid[round(t, 12)] = u
        # the closed form of the limit equation is u = 1 everywhere
        assert abs(u - 1.0) <= 1e-12
        assert np.max(np.abs(sol.values - 1.0)) <= 1e-4

    def test_diagnostics_populated(self):
        prob = case_i(0.5, 1.0, 2.0)
        sol = solve(prob, spec_of(-0.25, -0.25, 1.0), 6)
        d = sol.diagnostics
        assert d.condition > 1.0 and math.isfinite(d.condition)
        assert d.assembly_seconds >= 0.0 and d.solve_seconds >= 0.0
        assert not d.near_singular

    def test_solution_matches_oracle_assembled_system(self):
        # independent route: build the same collocation system but integrate
        # the operator applied to each cardinal with the graded-panel oracle
        # instead of the transformed Gauss rule, then compare solutions
        from fbjacobi.approximation import Interpolant, barycentric_weights
        from fbjacobi.problems import example1, oracle_kr

        theta, rho, n = 0.5, 0.5, 8
        prob = example1(theta)
        spec = spec_of(-0.25, -0.25, rho)
        sol = solve(prob, spec, n)

        rule = gauss_rule(spec.params, n + 1)
        bary = barycentric_weights(rule.nodes)
        nodes_t = sol.nodes_t
        mat = np.eye(n + 1)
        for j in range(n + 1):
            values = np.zeros(n + 1)
            values[j] = 1.0
            card = Interpolant(spec, rule.nodes, nodes_t, values, bary)
            for i in range(n + 1):
                mat[i, j] -= oracle_kr(
                    lambda p: float(card(p)), theta, prob.kernel, float(nodes_t[i])
                )
        rhs = np.array([prob.source_at(t, 1.0 - t) for t in nodes_t])
        ref_values = np.linalg.solve(mat, rhs)
        assert np.max(np.abs(sol.values - ref_values)) <= 1e-9
