"""Thompson-sampling controllers: TSAC and plain TS-LQR."""

from __future__ import annotations

import logging

from tsac.core.agents.base import (Controller, ControllerRng, PolicyChoice,
                                   TsacConfig)
from tsac.core.learning.sampling import ts_sample

logger = logging.getLogger(__name__)


class Tsac(Controller):
    """
    Thompson sampling with an improved-exploration phase.

    For the first t_w steps isotropic noise ν ~ 𝒩(0, σ_ν²I) is added to the
    input; afterwards the controller plays K(Θ̃) for a sample Θ̃ drawn from
    the confidence ellipsoid and rejected onto the admissible set.
    """

    name = "tsac"
    explores = True

    def choose_policy(self, rng: ControllerRng) -> PolicyChoice:
        cfg = self.config
        sample = ts_sample(
            self.state.rls,
            cfg.stabilizability,
            cfg.cost,
            rng.sampling,
            max_attempts=cfg.max_attempts,
            scale_levels=cfg.scale_levels,
            beta=self.radius(),
        )
        return PolicyChoice(
            gain=sample.gain,
            j_model=sample.cost,
            sample=sample,
            attempts=sample.attempts,
            scale=sample.scale_used,
        )


class TsLqr(Tsac):
    """TSAC without the exploration phase."""

    name = "ts-lqr"
    explores = False

    def __init__(self, n: int, d: int, config: TsacConfig):
        super().__init__(n, d, config.with_overrides(t_w=0))
