import math

import numpy as np
import pytest

from tsac.core.agents.base import TsacConfig
from tsac.core.control.linalg import spectral_norm
from tsac.core.control.riccati import CostMatrices, SystemParams, solve_dare
from tsac.core.control.stability import StabilizabilityParams
from tsac.core.learning.optimism import PgdConfig
from tsac.core.sim.plant import boeing_plant, scalar_plant


def scalar_dare(a: float, b: float, q: float = 1.0, r: float = 1.0) -> float:
    """Positive root of b²p² + (r − qb² − a²r)p − qr = 0."""
    lin = r - q * b ** 2 - a ** 2 * r
    if b == 0.0:
        return -q * r / lin
    return (-lin + math.sqrt(lin ** 2 + 4.0 * b ** 2 * q * r)) / (2.0 * b ** 2)


def scalar_sys(a: float, b: float = 1.0) -> SystemParams:
    return SystemParams(np.array([[a]]), np.array([[b]]))


def loose_params(sys: SystemParams, cost: CostMatrices) -> StabilizabilityParams:
    """Bounds that admit sys with margin, derived from its own Riccati solution."""
    sol = solve_dare(sys, cost)
    rho = float(np.max(np.abs(np.linalg.eigvals(sys.a + sys.b @ sol.k))))
    return StabilizabilityParams(
        kappa=max(1.0, 2.0 * spectral_norm(sol.k)),
        gamma=(1.0 - rho) / 4.0,
        s_bound=2.0 * sys.frobenius() + 1.0,
    )


def make_config(plant, horizon: int = 200, **overrides) -> TsacConfig:
    """TsacConfig with bounds derived from the plant and short schedules."""
    params = loose_params(plant.sys, plant.cost)
    options = dict(
        kappa=params.kappa,
        gamma=params.gamma,
        s_bound=params.s_bound,
        delta=0.05,
        t_w=min(20, horizon),
        tau0=5,
        mu=1.0,
        radius="oracle",
        pgd=PgdConfig(iterations=10),
    )
    options.update(overrides)
    return TsacConfig.resolve(plant.n, plant.d, plant.sigma_w, plant.cost, horizon, **options)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def scalar_cost() -> CostMatrices:
    return CostMatrices(np.eye(1), np.eye(1))


@pytest.fixture
def scalar():
    return scalar_plant(a=0.9, b=1.0, seed=7)


@pytest.fixture
def boeing():
    return boeing_plant(seed=11)


@pytest.fixture
def scalar_config(scalar) -> TsacConfig:
    return make_config(scalar)


@pytest.fixture
def boeing_config(boeing) -> TsacConfig:
    return make_config(boeing)
