import time

import numpy as np
import pytest
from conftest import scalar_dare, scalar_sys
from scipy import linalg

from tsac.core.control.linalg import (solve_lyapunov, spectral_norm,
                                      spectral_radius, sym_sqrt)
from tsac.core.control.riccati import (DARE_TOL, ROUNDOFF_FLOOR,
                                       CostMatrices, SystemParams,
                                       closed_loop, cost_gradient,
                                       dare_defect, optimal_cost,
                                       policy_cost, solve_dare,
                                       state_covariance)
from tsac.core.errors import (DimensionMismatch, InvalidConfig,
                              NotStabilizable, NumericalFailure)
from tsac.core.sim.plant import boeing_plant


class TestLinalg:
    def test_spectral_radius_of_rotation(self):
        theta = 0.3
        rot = 0.5 * np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        assert spectral_radius(rot) == pytest.approx(0.5)

    def test_spectral_norm_matches_svd(self, rng):
        m = rng.standard_normal((3, 5))
        assert spectral_norm(m) == pytest.approx(np.linalg.svd(m, compute_uv=False)[0])

    def test_sym_sqrt_and_inverse(self, rng):
        g = rng.standard_normal((4, 4))
        v = g @ g.T + np.eye(4)
        root = sym_sqrt(v)
        inv_root = sym_sqrt(v, inverse=True)
        np.testing.assert_allclose(root @ root, v, atol=1e-10)
        np.testing.assert_allclose(inv_root @ v @ inv_root, np.eye(4), atol=1e-10)

    def test_lyapunov_closed_form_scalar(self):
        # x = a²x + q
        x = solve_lyapunov(np.array([[0.5]]), np.array([[3.0]]))
        assert x[0, 0] == pytest.approx(3.0 / (1.0 - 0.25))

    def test_lyapunov_rejects_unstable(self):
        with pytest.raises(NumericalFailure):
            solve_lyapunov(np.array([[1.2]]), np.eye(1))


class TestSystemParams:
    def test_theta_layout_round_trip(self, rng):
        sys = SystemParams(rng.standard_normal((3, 3)), rng.standard_normal((3, 2)))
        assert sys.theta.shape == (5, 3)
        np.testing.assert_array_equal(sys.theta[:3].T, sys.a)
        back = SystemParams.from_theta(sys.theta, 3)
        np.testing.assert_array_equal(back.a, sys.a)
        np.testing.assert_array_equal(back.b, sys.b)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            SystemParams(np.eye(2), np.ones((3, 1)))

    def test_cost_must_be_positive_definite(self):
        with pytest.raises(InvalidConfig):
            CostMatrices(np.eye(2), np.array([[0.0]]))

    def test_stage_cost(self):
        cost = CostMatrices(np.diag([1.0, 2.0]), np.array([[3.0]]))
        assert cost.stage(np.array([1.0, 1.0]), np.array([2.0])) == pytest.approx(1.0 + 2.0 + 12.0)


class TestSolveDare:
    def test_scalar_oracle(self, scalar_cost):
        start = time.perf_counter()
        sol = solve_dare(scalar_sys(0.9), scalar_cost)
        assert time.perf_counter() - start < 1.0
        assert sol.p[0, 0] == pytest.approx(1.48390, abs=1e-4)
        assert sol.k[0, 0] == pytest.approx(-0.53766, abs=1e-4)
        assert sol.p[0, 0] == pytest.approx(scalar_dare(0.9, 1.0), abs=1e-9)

    @pytest.mark.parametrize("a,b,q,r", [(1.2, 1.0, 1.0, 1.0), (0.5, 2.0, 3.0, 0.5), (-1.5, 0.3, 1.0, 2.0)])
    def test_scalar_quadratic_formula(self, a, b, q, r):
        cost = CostMatrices(np.array([[q]]), np.array([[r]]))
        sol = solve_dare(scalar_sys(a, b), cost)
        p = scalar_dare(a, b, q, r)
        assert sol.p[0, 0] == pytest.approx(p, rel=1e-8)
        assert sol.k[0, 0] == pytest.approx(-a * b * p / (r + b * b * p), rel=1e-8)

    def test_zero_dynamics(self, scalar_cost):
        sol = solve_dare(scalar_sys(0.0), scalar_cost)
        assert sol.p[0, 0] == pytest.approx(1.0)
        assert sol.k[0, 0] == pytest.approx(0.0)

    def test_unstabilizable_reports_not_stabilizable(self, scalar_cost):
        with pytest.raises(NotStabilizable):
            solve_dare(scalar_sys(2.0, 0.0), scalar_cost)

    def test_uncontrollable_but_stable_mode_is_fine(self):
        sys = SystemParams(np.diag([0.5, 1.1]), np.array([[0.0], [1.0]]))
        sol = solve_dare(sys, CostMatrices.identity(2, 1))
        assert spectral_radius(closed_loop(sys, sol.k)) < 1.0

    def test_boeing(self):
        plant = boeing_plant()
        start = time.perf_counter()
        sol = solve_dare(plant.sys, plant.cost)
        assert time.perf_counter() - start < 1.0
        assert sol.p.shape == (4, 4)
        assert dare_defect(plant.sys, plant.cost, sol.p) <= 1e-8
        assert spectral_radius(closed_loop(plant.sys, sol.k)) < 1.0
        oracle = linalg.solve_discrete_are(plant.sys.a, plant.sys.b, plant.cost.q, plant.cost.r)
        assert np.linalg.norm(sol.p - oracle) <= 1e-6

    def test_p_symmetric_positive_definite(self, rng):
        a = 0.4 * rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 2))
        sol = solve_dare(SystemParams(a, b), CostMatrices.identity(3, 2))
        np.testing.assert_allclose(sol.p, sol.p.T, atol=1e-12)
        assert np.all(np.linalg.eigvalsh(sol.p) > 0.0)

    def test_j_scales_with_noise(self, scalar_cost):
        sys = scalar_sys(0.9)
        assert solve_dare(sys, scalar_cost, sigma_w=2.0).j == pytest.approx(4.0 * solve_dare(sys, scalar_cost).j)

    def test_warm_start_agrees(self):
        plant = boeing_plant()
        cold = solve_dare(plant.sys, plant.cost)
        warm = solve_dare(plant.sys, plant.cost, p0=cold.p)
        assert warm.iterations <= cold.iterations
        np.testing.assert_allclose(warm.p, cold.p, atol=1e-8)

    def test_rejects_bad_tolerance(self, scalar_cost):
        with pytest.raises(InvalidConfig):
            solve_dare(scalar_sys(0.9), scalar_cost, tol=0.0)

    @pytest.mark.parametrize("a,b", [(0.999, 0.01), (1.0, 0.001), (0.99, 0.05)])
    def test_slowly_contracting_systems_meet_tolerance(self, scalar_cost, a, b):
        sys = scalar_sys(a, b)
        sol = solve_dare(sys, scalar_cost, tol=1e-10)
        assert sol.residual <= 1e-10
        assert dare_defect(sys, scalar_cost, sol.p) <= 1e-10
        assert sol.p[0, 0] == pytest.approx(scalar_dare(a, b), rel=1e-8)

    def test_residual_is_defect_of_returned_p(self):
        plant = boeing_plant()
        sol = solve_dare(plant.sys, plant.cost)
        assert sol.residual == pytest.approx(dare_defect(plant.sys, plant.cost, sol.p), abs=1e-15)
        assert sol.residual <= max(DARE_TOL, ROUNDOFF_FLOOR * np.linalg.norm(sol.p))


class TestCosts:
    def test_policy_cost_at_optimum_equals_j(self):
        plant = boeing_plant()
        sol = solve_dare(plant.sys, plant.cost)
        assert policy_cost(plant.sys, plant.cost, sol.k) == pytest.approx(sol.j, rel=1e-8)

    def test_suboptimal_gain_costs_more(self, scalar_cost):
        sys = scalar_sys(0.9)
        sol = solve_dare(sys, scalar_cost)
        assert policy_cost(sys, scalar_cost, sol.k + 0.1) > sol.j

    def test_optimal_gain_beats_random_stabilizing_gains(self, rng):
        plant = boeing_plant()
        sol = solve_dare(plant.sys, plant.cost)
        costs = []
        while len(costs) < 100:
            k = sol.k + 0.05 * rng.standard_normal(sol.k.shape)
            if spectral_radius(closed_loop(plant.sys, k)) < 0.999:
                costs.append(policy_cost(plant.sys, plant.cost, k))
        assert min(costs) >= sol.j * (1.0 - 1e-9)

    def test_policy_cost_unstable_gain(self, scalar_cost):
        with pytest.raises(NotStabilizable):
            policy_cost(scalar_sys(0.9), scalar_cost, np.array([[0.5]]))

    def test_optimal_cost(self, scalar_cost):
        assert optimal_cost(scalar_sys(0.9), scalar_cost) == pytest.approx(scalar_dare(0.9, 1.0))

    def test_state_covariance(self):
        sigma = state_covariance(np.array([[0.5]]), sigma_w=2.0)
        assert sigma[0, 0] == pytest.approx(4.0 / 0.75)

    def test_closed_loop_shape_check(self, scalar_cost):
        with pytest.raises(DimensionMismatch):
            closed_loop(scalar_sys(0.9), np.zeros((2, 1)))


class TestCostGradient:
    @pytest.mark.parametrize("seed", range(4))
    def test_matches_central_differences(self, seed):
        rng = np.random.default_rng(seed)
        a = 0.5 * rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 1))
        sys = SystemParams(a, b)
        cost = CostMatrices.identity(2, 1)
        grad = cost_gradient(sys, cost, sigma_w=1.5)

        h = 1e-4
        fd = np.zeros_like(sys.theta)
        for idx in np.ndindex(*fd.shape):
            bump = np.zeros_like(fd)
            bump[idx] = h
            up = solve_dare(SystemParams.from_theta(sys.theta + bump, 2), cost, sigma_w=1.5).j
            down = solve_dare(SystemParams.from_theta(sys.theta - bump, 2), cost, sigma_w=1.5).j
            fd[idx] = (up - down) / (2 * h)
        np.testing.assert_allclose(grad, fd, rtol=1e-4, atol=1e-5)

    def test_scalar_sign(self, scalar_cost):
        # Larger |a| costs more, larger b helps
        grad = cost_gradient(scalar_sys(0.9), scalar_cost)
        assert grad[0, 0] > 0.0
        assert grad[1, 0] < 0.0
