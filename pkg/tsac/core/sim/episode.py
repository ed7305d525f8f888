"""
Closed-loop episodes: act → step → observe, with regret bookkeeping.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from tsac.core.agents.base import Controller, ControllerRng, PolicyUpdate
from tsac.core.control.riccati import solve_dare
from tsac.core.errors import (DimensionMismatch, Diverged, EmptyWindow,
                              InvalidConfig, NumericalFailure,
                              SamplingExhausted)
from tsac.core.learning.rls import estimation_error, min_eigenvalue_V
from tsac.core.learning.sampling import estimate_p_opt
from tsac.core.sim.plant import (PlantConfig, controller_seed_sequence,
                                 plant_rng, plant_step)

logger = logging.getLogger(__name__)

CSV_HEADER = ("t", "cost", "cum_regret", "state_norm", "policy_id", "est_error", "lambda_min_v", "optimistic")


@dataclass(frozen=True, eq=False)
class StepRecord:
    t: int
    x: np.ndarray
    u: np.ndarray
    cost: float
    cum_regret: float
    state_norm: float
    policy_id: int
    est_error: float
    lambda_min_v: float
    optimistic: bool | None = None

    def csv_row(self) -> tuple[Any, ...]:
        flag = "" if self.optimistic is None else int(self.optimistic)
        return (self.t, repr(float(self.cost)), repr(float(self.cum_regret)), repr(float(self.state_norm)),
                self.policy_id, repr(float(self.est_error)), repr(float(self.lambda_min_v)), flag)


@dataclass(eq=False)
class RunLog:
    """Everything recorded about one episode."""
    controller: str
    seed: int
    horizon: int
    j_star: float
    t_w: int
    records: list[StepRecord] = field(default_factory=list)
    updates: list[PolicyUpdate] = field(default_factory=list)
    rts_trace: list[float] = field(default_factory=list)
    regret: float = 0.0
    max_state_norm: float = 0.0
    diverged: bool = False
    aborted: str | None = None

    @property
    def steps(self) -> int:
        return len(self.records)

    @property
    def costs(self) -> np.ndarray:
        return np.array([r.cost for r in self.records])

    @property
    def cum_regret(self) -> np.ndarray:
        return np.array([r.cum_regret for r in self.records])

    @property
    def rts_total(self) -> float:
        return self.rts_trace[-1] if self.rts_trace else 0.0

    def optimism_flags(self, after: int = 0) -> list[bool]:
        return [u.optimistic for u in self.updates
                if u.deployed and u.optimistic is not None and u.step >= after]

    def p_opt(self, after: int | None = None) -> float | None:
        """Share of optimistic deployed samples at or after step `after` (default t_w)."""
        try:
            return estimate_p_opt(self.optimism_flags(self.t_w if after is None else after))
        except EmptyWindow:
            return None

    def as_dict(self) -> dict[str, Any]:
        flags = self.optimism_flags(self.t_w)
        return {
            "controller": self.controller,
            "seed": self.seed,
            "horizon": self.horizon,
            "steps": self.steps,
            "j_star": self.j_star,
            "regret": self.regret,
            "max_state_norm": self.max_state_norm,
            "diverged": self.diverged,
            "aborted": self.aborted,
            "rts_total": self.rts_total,
            "p_opt": {
                "after": self.t_w,
                "updates": len(flags),
                "optimistic": sum(flags),
                "estimate": self.p_opt(),
            },
            "updates": [u.as_dict() for u in self.updates],
        }

    def pack(self) -> dict[str, Any]:
        """Plain-data form for the msgpack run cache."""
        return {
            "controller": self.controller,
            "seed": self.seed,
            "horizon": self.horizon,
            "j_star": self.j_star,
            "t_w": self.t_w,
            "records": [
                [r.t, r.x.tolist(), r.u.tolist(), r.cost, r.cum_regret, r.state_norm,
                 r.policy_id, r.est_error, r.lambda_min_v, r.optimistic]
                for r in self.records
            ],
            "updates": [u.as_dict() for u in self.updates],
            "rts_trace": list(self.rts_trace),
            "regret": self.regret,
            "max_state_norm": self.max_state_norm,
            "diverged": self.diverged,
            "aborted": self.aborted,
        }

    @classmethod
    def unpack(cls, data: dict[str, Any]) -> RunLog:
        records = [
            StepRecord(t, np.array(x), np.array(u), cost, cum, norm, pid, err, lam, flag)
            for t, x, u, cost, cum, norm, pid, err, lam, flag in data["records"]
        ]
        return cls(
            controller=data["controller"],
            seed=data["seed"],
            horizon=data["horizon"],
            j_star=data["j_star"],
            t_w=data["t_w"],
            records=records,
            updates=[PolicyUpdate(**u) for u in data["updates"]],
            rts_trace=list(data["rts_trace"]),
            regret=data["regret"],
            max_state_norm=data["max_state_norm"],
            diverged=data["diverged"],
            aborted=data["aborted"],
        )


def run_episode(
    plant: PlantConfig,
    controller: Controller,
    horizon: int,
    diagnostics: bool = True,
    controller_seed: int | None = None,
) -> RunLog:
    """
    Run one closed-loop episode of `horizon` steps.

    Plant noise comes from the plant seed's stream; the controller's
    generators come from controller_seed (defaults to the plant seed), so
    changing the controller seed leaves the noise sequence unchanged.
    Divergence and sampling failures end the run early and are recorded.
    """
    if horizon < 1:
        raise InvalidConfig(f"horizon must be >= 1, got {horizon}")
    if (controller.n, controller.d) != (plant.n, plant.d):
        raise DimensionMismatch("controller and plant dimensions differ")

    j_star = solve_dare(plant.sys, plant.cost, sigma_w=plant.sigma_w).j
    if controller.truth is None:
        controller.attach_truth(plant.sys, j_star)

    w_rng = plant_rng(plant.seed)
    c_rng = ControllerRng.from_seed(controller_seed_sequence(
        plant.seed if controller_seed is None else controller_seed))
    theta_star = plant.sys.theta

    log = RunLog(controller=controller.name, seed=plant.seed, horizon=horizon, j_star=j_star,
                 t_w=controller.exploration_steps)
    x = plant.x_init.copy()
    max_norm = float(np.linalg.norm(x))
    cum = 0.0
    rts = 0.0
    seen_updates = 0
    active_j: float | None = None
    active_flag: bool | None = None

    for t in range(horizon):
        try:
            u = controller.act(x, c_rng)
        except (SamplingExhausted, NumericalFailure) as e:
            log.aborted = f"{type(e).__name__}: {e}"
            logger.warning("%s seed %d aborted at step %d: %s", controller.name, plant.seed, t, e)
            break

        st = controller.state
        new_updates = st.diag[seen_updates:]
        seen_updates = len(st.diag)
        log.updates.extend(upd for upd in new_updates if upd.deployed or diagnostics)
        for upd in new_updates:
            if upd.deployed:
                active_j, active_flag = upd.j_model, upd.optimistic

        diverged = False
        try:
            x_next, cost = plant_step(plant, x, u, w_rng, step=t)
        except Diverged as e:
            logger.warning("%s seed %d diverged: %s", controller.name, plant.seed, e)
            x_next, cost = None, plant.cost.stage(x, u)
            diverged = True

        cum += cost - j_star
        if active_j is not None:
            rts += active_j - j_star
        if any(upd.deployed for upd in new_updates):
            log.rts_trace.append(rts)

        if x_next is not None:
            try:
                controller.observe(np.concatenate((x, u)), x_next)
            except NumericalFailure as e:
                log.aborted = f"{type(e).__name__}: {e}"
                logger.warning("%s seed %d aborted at step %d: %s", controller.name, plant.seed, t, e)
                x_next = None

        if diagnostics:
            est_error = estimation_error(st.rls, theta_star)
            lam = min_eigenvalue_V(st.rls)
            optimistic = active_flag
        else:
            est_error, lam, optimistic = math.nan, math.nan, None

        norm = float(np.linalg.norm(x))
        max_norm = max(max_norm, norm)
        log.records.append(StepRecord(t, x, u, cost, cum, norm, st.policy_id, est_error, lam, optimistic))

        if diverged:
            log.diverged = True
            break
        if x_next is None:
            break
        x = x_next
        max_norm = max(max_norm, float(np.linalg.norm(x)))

    if log.rts_trace and log.rts_trace[-1] != rts:
        log.rts_trace.append(rts)
    log.regret = cum
    log.max_state_norm = max_norm
    logger.debug("%s seed %d: regret %.4g, max |x| %.4g", controller.name, plant.seed, cum, max_norm)
    return log
