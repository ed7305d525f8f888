"""
Monte-Carlo acceptance experiments. Deselected by default; run with
`pytest -m slow`.
"""

import numpy as np
import pytest
from conftest import make_config
from scipy import stats

from tsac.core.agents.registry import build_controller
from tsac.core.bench.runner import bench
from tsac.core.bench.slope import fit_regret_slope
from tsac.core.config import Configuration
from tsac.core.control.riccati import SystemParams
from tsac.core.control.stability import membership_in_S
from tsac.core.control.theory import recovery_time, state_bound
from tsac.core.learning.rls import in_confidence_set, rls_new, rls_update
from tsac.core.learning.sampling import candidate_draw, ts_sample
from tsac.core.sim.episode import run_episode
from tsac.core.sim.plant import boeing_plant, scalar_plant

pytestmark = pytest.mark.slow


def _episode(plant, name, horizon, diagnostics=True, **overrides):
    config = make_config(plant, horizon=horizon, **overrides)
    return run_episode(plant, build_controller(name, config, plant.sys), horizon, diagnostics)


def test_rls_coverage():
    covered = 0
    for seed in range(200):
        rng = np.random.default_rng(seed)
        plant = scalar_plant(a=0.9, b=1.0, seed=seed)
        theta = plant.sys.theta
        state = rls_new(1, 1, mu=1.0, sigma_w=1.0, s_bound=2.0, delta=0.05)
        x = np.zeros(1)
        inside = True
        for _ in range(1000):
            u = rng.standard_normal(1)
            x_next = plant.sys.a @ x + plant.sys.b @ u + rng.standard_normal(1)
            rls_update(state, np.concatenate((x, u)), x_next)
            if not in_confidence_set(state, theta):
                inside = False
                break
            x = x_next
        covered += inside
    assert covered >= 180


def test_exploration_excites_every_direction():
    horizon = 500
    plant = boeing_plant()
    passed = 0
    for seed in range(20):
        config = make_config(plant, horizon=horizon, t_w=horizon)
        controller = build_controller("tsac", config, plant.sys)
        run_plant = plant.with_seed(seed)
        log = run_episode(run_plant, controller, horizon)
        ratios = [r.lambda_min_v / (r.t + 1) for r in log.records if r.t + 1 >= 100]
        passed += log.steps == horizon and min(ratios) >= 0.005 * plant.sigma_w ** 2
    assert passed >= 18


def test_sampled_gains_stabilize_boeing():
    plant = boeing_plant()
    rhos = []
    for seed in range(50):
        log = _episode(plant.with_seed(seed), "tsac", 200, t_w=50, tau0=10)
        rhos.extend(u.rho_true for u in log.updates if u.deployed and u.step >= log.t_w)
    assert rhos
    assert np.mean(np.array(rhos) < 1.0) >= 0.95


def test_scalar_regret_is_sublinear():
    horizon = 10_000
    curves = []
    for seed in range(20):
        log = _episode(scalar_plant(a=0.9, b=1.0, seed=seed), "tsac", horizon, diagnostics=False)
        assert log.steps == horizon
        curves.append(log.cum_regret)
    fit = fit_regret_slope(np.vstack(curves), t_min=1000, bootstrap=200)
    assert fit.slope < 0.9
    assert fit.ci_low <= fit.slope <= fit.ci_high


def test_optimistic_probability_floor():
    flags = []
    for seed in range(50):
        log = _episode(scalar_plant(a=0.9, b=1.0, seed=seed), "tsac", 500)
        flags.extend(log.optimism_flags(log.t_w))
    assert len(flags) > 100
    assert np.mean(flags) >= 0.05


def test_accepted_samples_follow_truncated_gaussian(scalar_cost):
    state = rls_new(1, 1, mu=1.0, sigma_w=1.0, s_bound=5.0, delta=0.05)
    state.v = np.diag([4.0, 1e8])
    state.theta_hat = np.array([[0.9], [1.0]])
    params = make_config(scalar_plant(a=0.9), horizon=100).stabilizability
    rng = np.random.default_rng(5)

    accepted = np.array([ts_sample(state, params, scalar_cost, rng, beta=1.0).theta[0, 0]
                         for _ in range(2000)])
    truncated = []
    while len(truncated) < 2000:
        theta = candidate_draw(state, 1.0, rng)
        if membership_in_S(SystemParams.from_theta(theta, 1), scalar_cost, params):
            truncated.append(theta[0, 0])
    assert stats.ks_2samp(accepted, truncated).pvalue > 1e-3


def test_boeing_ordering(tmp_path):
    config = Configuration(tmp_path / "tsac.toml")
    cfg = config.bench_config(runs=200, horizon=200, controllers=["tsac", "ofulq", "ts-lqr"], write=False)
    summary, _ = bench(cfg)
    tsac, ofulq, ts_lqr = (summary.controllers[n] for n in ("tsac", "ofulq", "ts-lqr"))
    assert tsac.regret.average < ofulq.regret.average
    assert tsac.regret.average < ts_lqr.regret.average
    assert tsac.max_state_norm.average < ts_lqr.max_state_norm.average


def test_theory_radius_stabilizes_scalar():
    rhos, flags = [], []
    for seed in range(5):
        log = _episode(scalar_plant(a=0.9, b=1.0, seed=seed), "tsac", 2000, radius="theory")
        assert log.aborted is None
        assert not log.diverged
        rhos.extend(u.rho_true for u in log.updates if u.deployed and u.step >= log.t_w)
        flags.extend(log.optimism_flags(log.t_w))
    assert rhos
    assert np.mean(np.array(rhos) < 1.0) >= 0.75
    assert len(flags) > 100
    assert np.mean(flags) >= 0.05


def test_estimates_are_consistent():
    improved = 0
    for seed in range(20):
        log = _episode(scalar_plant(a=0.9, b=1.0, seed=seed), "tsac", 2000, t_w=50)
        assert log.steps == 2000
        improved += log.records[1999].est_error < log.records[199].est_error
    assert improved >= 18


def test_state_stays_within_bound_after_recovery():
    horizon = 500
    plant = boeing_plant()
    config = make_config(plant, horizon=horizon, t_w=50, tau0=10)
    x_s = state_bound(config.kappa, config.gamma, plant.sigma_w, plant.n, horizon, config.t_w, config.delta)
    t_r = recovery_time(config.t_w, config.tau0, plant.n, plant.d)
    for seed in range(20):
        log = run_episode(plant.with_seed(seed), build_controller("tsac", config, plant.sys), horizon)
        assert log.steps == horizon
        late = [float(np.linalg.norm(r.x)) for r in log.records if r.t >= t_r]
        assert late
        assert max(late) < 10.0 * x_s
