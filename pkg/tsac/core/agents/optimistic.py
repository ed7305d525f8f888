"""Optimism-based baselines: OFULQ and StabL."""

from __future__ import annotations

import logging

from tsac.core.agents.base import (Controller, ControllerRng, PolicyChoice,
                                   TsacConfig)
from tsac.core.control.riccati import SystemParams
from tsac.core.control.stability import membership_in_S
from tsac.core.errors import NumericalFailure, OptimisticSearchFailed
from tsac.core.learning.optimism import optimistic_search

logger = logging.getLogger(__name__)


class Ofulq(Controller):
    """Plays K(Θ) for an approximately optimistic Θ found by projected gradient descent."""

    name = "ofulq"
    explores = False

    def __init__(self, n: int, d: int, config: TsacConfig):
        super().__init__(n, d, config if self.explores else config.with_overrides(t_w=0))

    def choose_policy(self, rng: ControllerRng) -> PolicyChoice:
        cfg = self.config
        rls = self.state.rls
        try:
            theta = optimistic_search(rls, cfg.stabilizability, cfg.cost, cfg.pgd, beta=self.radius())
            member = membership_in_S(SystemParams.from_theta(theta, self.n), cfg.cost, cfg.stabilizability,
                                     cfg.sigma_w)
        except (OptimisticSearchFailed, NumericalFailure) as e:
            logger.warning("%s step %d: %s; keeping previous gain", self.name, self.state.step, e)
            return PolicyChoice(gain=None)
        if member.solution is None:
            logger.warning("%s step %d: optimistic model lost its Riccati solution; keeping previous gain",
                           self.name, self.state.step)
            return PolicyChoice(gain=None)
        return PolicyChoice(gain=member.solution.k, j_model=member.solution.j)


class Stabl(Ofulq):
    """OFULQ with TSAC's isotropic exploration for the first t_w steps."""

    name = "stabl"
    explores = True
