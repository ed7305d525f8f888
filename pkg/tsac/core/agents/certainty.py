"""Certainty-equivalence and fixed-gain controllers."""

from __future__ import annotations

import logging

import numpy as np

from tsac.core.agents.base import (Controller, ControllerRng, PolicyChoice,
                                   TsacConfig)
from tsac.core.control.riccati import SystemParams, solve_dare
from tsac.core.errors import (DimensionMismatch, NotStabilizable,
                              NumericalFailure)

logger = logging.getLogger(__name__)


class CertaintyEquivalence(Controller):
    """
    Plays K(Θ̂) re-solved every τ₀ steps.

    The first t_w steps are a warmup of pure random inputs u = ν; the first
    gain is computed at the first policy boundary after the warmup, and the
    noise continues until then.
    """

    name = "cec"
    explores = True

    @property
    def exploration_steps(self) -> int:
        if self.state.policy_id >= 0:
            return self.config.t_w
        tau0 = self.config.tau0
        return -(-self.config.t_w // tau0) * tau0

    def wants_policy(self) -> bool:
        return self.state.step >= self.config.t_w

    def choose_policy(self, rng: ControllerRng) -> PolicyChoice:
        rls = self.state.rls
        sys = SystemParams.from_theta(rls.theta_hat, self.n)
        try:
            solution = solve_dare(sys, self.config.cost, sigma_w=self.config.sigma_w)
        except (NotStabilizable, NumericalFailure) as e:
            logger.warning("cec step %d: %s; keeping previous gain", self.state.step, e)
            return PolicyChoice(gain=None)
        return PolicyChoice(gain=solution.k, j_model=solution.j)


class FixedGain(Controller):
    """Always plays the same gain. Used for the oracle and open-loop baselines."""

    name = "fixed"

    def __init__(self, n: int, d: int, config: TsacConfig, gain: np.ndarray, name: str | None = None):
        gain = np.asarray(gain, dtype=float)
        if gain.shape != (d, n):
            raise DimensionMismatch(f"gain has shape {gain.shape}, expected {(d, n)}")
        super().__init__(n, d, config.with_overrides(t_w=0))
        self._gain = gain
        if name is not None:
            self.name = name

    def choose_policy(self, rng: ControllerRng) -> PolicyChoice:
        return PolicyChoice(gain=self._gain)

    def wants_policy(self) -> bool:
        return self.state.policy_id < 0
