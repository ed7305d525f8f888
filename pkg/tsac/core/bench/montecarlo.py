"""Monte-Carlo estimate of the probability that a Thompson sample is optimistic."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from tsac.core.agents.base import ControllerRng, TsacConfig
from tsac.core.control.riccati import solve_dare
from tsac.core.control.theory import q_function
from tsac.core.errors import InvalidConfig, SamplingExhausted
from tsac.core.learning.rls import (confidence_radii, min_eigenvalue_V,
                                    rls_new, rls_update, weighted_distance)
from tsac.core.learning.sampling import ts_sample
from tsac.core.sim.plant import (PlantConfig, controller_seed_sequence,
                                 plant_rng, plant_step)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimismEstimate:
    p_opt: float
    samples: int
    optimistic: int
    exhausted: int
    steps: int
    beta: float
    lambda_min_v: float
    q1: float

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def monte_carlo_p_opt(plant: PlantConfig, config: TsacConfig, samples: int = 1000, steps: int = 200) -> OptimismEstimate:
    """
    Build a confidence ellipsoid from `steps` steps of u = K(Θ_*)x + ν, then
    draw `samples` Thompson samples from it and count how many have
    J(Θ̃) ≤ J(Θ_*).
    """
    if samples < 1 or steps < 1:
        raise InvalidConfig("samples and steps must be at least 1")

    star = solve_dare(plant.sys, plant.cost, sigma_w=plant.sigma_w)
    rls = rls_new(plant.n, plant.d, config.mu, plant.sigma_w, config.s_bound, config.delta)
    w_rng = plant_rng(plant.seed)
    c_rng = ControllerRng.from_seed(controller_seed_sequence(plant.seed))
    sigma_nu = config.sigma_nu if config.sigma_nu > 0.0 else plant.sigma_w

    x = plant.x_init.copy()
    for t in range(steps):
        u = star.k @ x + c_rng.exploration.normal(0.0, sigma_nu, plant.d)
        x_next, _ = plant_step(plant, x, u, w_rng, step=t)
        rls_update(rls, np.concatenate((x, u)), x_next)
        x = x_next

    if config.radius == "oracle":
        beta = weighted_distance(rls, plant.sys.theta)
    else:
        beta = confidence_radii(rls).beta
    beta *= config.beta_scale

    optimistic = exhausted = 0
    for _ in range(samples):
        try:
            sample = ts_sample(rls, config.stabilizability, config.cost, c_rng.sampling,
                               config.max_attempts, config.scale_levels, beta=beta)
        except SamplingExhausted:
            exhausted += 1
            continue
        optimistic += sample.cost <= star.j

    drawn = samples - exhausted
    p_opt = optimistic / drawn if drawn else 0.0
    logger.info("p_opt %.4f from %d samples (Q(1) = %.4f)", p_opt, drawn, q_function(1.0))
    return OptimismEstimate(p_opt, drawn, optimistic, exhausted, steps, beta, min_eigenvalue_V(rls), q_function(1.0))
