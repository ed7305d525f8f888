"""
Shared controller machinery: configuration, per-run state and the
act/observe loop with a fixed policy-holding period.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, ClassVar

import numpy as np

from tsac.core.control.linalg import spectral_radius
from tsac.core.control.riccati import CostMatrices, SystemParams, closed_loop
from tsac.core.control.stability import StabilizabilityParams
from tsac.core.control.theory import (default_mu, default_sigma_nu,
                                      default_t_w, default_tau0, state_bound)
from tsac.core.errors import DimensionMismatch, InvalidConfig, NumericalFailure
from tsac.core.learning.optimism import PgdConfig
from tsac.core.learning.rls import (RlsState, confidence_radii, log_det_ratio,
                                    min_eigenvalue_V, rls_new, rls_update,
                                    weighted_distance)
from tsac.core.learning.sampling import MAX_ATTEMPTS, SCALE_LEVELS, TsSample

logger = logging.getLogger(__name__)

RADIUS_MODES = ("theory", "oracle")
UPDATE_RULES = ("fixed", "doubling")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TsacConfig:
    """Hyperparameters shared by every adaptive controller."""
    kappa: float
    gamma: float
    s_bound: float
    sigma_w: float
    cost: CostMatrices
    delta: float
    horizon: int
    t_w: int
    tau0: int
    mu: float
    sigma_nu: float
    beta_scale: float = 1.0
    radius: str = "theory"
    max_attempts: int = MAX_ATTEMPTS
    scale_levels: int = SCALE_LEVELS
    update_rule: str = "fixed"
    pgd: PgdConfig = field(default_factory=PgdConfig)

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise InvalidConfig(f"horizon must be >= 1, got {self.horizon}")
        if self.tau0 < 1:
            raise InvalidConfig(f"tau0 must be >= 1, got {self.tau0}")
        if not 0 <= self.t_w <= self.horizon:
            raise InvalidConfig(f"t_w must be in [0, horizon], got {self.t_w}")
        if self.t_w > 0 and self.sigma_nu <= 0.0:
            raise InvalidConfig("sigma_nu must be positive when t_w > 0")
        if self.sigma_w <= 0.0 or self.mu <= 0.0:
            raise InvalidConfig("sigma_w and mu must be positive")
        if self.beta_scale < 0.0:
            raise InvalidConfig(f"beta_scale must be non-negative, got {self.beta_scale}")
        if self.radius not in RADIUS_MODES:
            raise InvalidConfig(f"radius must be one of {RADIUS_MODES}, got '{self.radius}'")
        if self.update_rule not in UPDATE_RULES:
            raise InvalidConfig(f"update_rule must be one of {UPDATE_RULES}, got '{self.update_rule}'")
        StabilizabilityParams(self.kappa, self.gamma, self.s_bound)

    @property
    def stabilizability(self) -> StabilizabilityParams:
        return StabilizabilityParams(self.kappa, self.gamma, self.s_bound)

    @property
    def q(self) -> np.ndarray:
        return self.cost.q

    @property
    def r(self) -> np.ndarray:
        return self.cost.r

    @classmethod
    def resolve(
        cls,
        n: int,
        d: int,
        sigma_w: float,
        cost: CostMatrices,
        horizon: int,
        kappa: float,
        gamma: float,
        s_bound: float,
        delta: float = 0.05,
        t_w: int | None = None,
        tau0: int | None = None,
        mu: float | None = None,
        sigma_nu: float | None = None,
        t_w_scale: float = 0.5,
        t_w_schedule: str = "sqrt",
        **extra: Any,
    ) -> TsacConfig:
        """
        Build a config, filling every None with its formula default. An
        explicit t_w is capped at the horizon.

        τ₀ = ceil(2γ⁻¹·ln(2κ√2)), T_w from the chosen schedule,
        σ_ν = √2·κ·σ_w and μ = (1+κ²)X_s².
        """
        tau0 = default_tau0(kappa, gamma) if tau0 is None else tau0
        t_w = default_t_w(horizon, n, d, t_w_scale, t_w_schedule) if t_w is None else min(t_w, horizon)
        sigma_nu = default_sigma_nu(kappa, sigma_w) if sigma_nu is None else sigma_nu
        if mu is None:
            mu = default_mu(kappa, state_bound(kappa, gamma, sigma_w, n, horizon, t_w, delta))
        return cls(
            kappa=kappa, gamma=gamma, s_bound=s_bound, sigma_w=sigma_w, cost=cost,
            delta=delta, horizon=horizon, t_w=t_w, tau0=tau0, mu=mu, sigma_nu=sigma_nu,
            **extra,
        )

    def with_overrides(self, **changes: Any) -> TsacConfig:
        return replace(self, **changes)

    def as_dict(self) -> dict[str, Any]:
        return {
            "kappa": self.kappa,
            "gamma": self.gamma,
            "s_bound": self.s_bound,
            "sigma_w": self.sigma_w,
            "q": self.cost.q.tolist(),
            "r": self.cost.r.tolist(),
            "delta": self.delta,
            "horizon": self.horizon,
            "t_w": self.t_w,
            "tau0": self.tau0,
            "mu": self.mu,
            "sigma_nu": self.sigma_nu,
            "beta_scale": self.beta_scale,
            "radius": self.radius,
            "max_attempts": self.max_attempts,
            "scale_levels": self.scale_levels,
            "update_rule": self.update_rule,
            "pgd": {
                "step_scale": self.pgd.step_scale,
                "iterations": self.pgd.iterations,
                "fd_step": self.pgd.fd_step,
                "gradient": self.pgd.gradient,
            },
        }


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------

class Phase(str, Enum):
    IMPROVED_EXPLORATION = "ImprovedExploration"
    STABILIZING_TS = "StabilizingTs"


@dataclass(frozen=True)
class PolicyUpdate:
    """Diagnostics recorded at every policy boundary."""
    step: int
    policy_id: int
    deployed: bool
    j_model: float | None
    lambda_min_v: float
    attempts: int = 0
    scale: float = 1.0
    optimistic: bool | None = None
    rho_true: float | None = None

    def as_dict(self) -> dict[str, Any]:
        return {
            "step": self.step,
            "policy_id": self.policy_id,
            "deployed": self.deployed,
            "j_model": self.j_model,
            "lambda_min_v": self.lambda_min_v,
            "attempts": self.attempts,
            "scale": self.scale,
            "optimistic": self.optimistic,
            "rho_true": self.rho_true,
        }


@dataclass(eq=False)
class ControllerState:
    """Mutable per-run controller state. step counts act calls from 0."""
    rls: RlsState
    current_gain: np.ndarray
    current_sample: TsSample | None = None
    policy_age: int = 0
    policy_id: int = -1
    phase: Phase = Phase.STABILIZING_TS
    step: int = 0
    diag: list[PolicyUpdate] = field(default_factory=list)


@dataclass
class ControllerRng:
    """Independent generators for model sampling and exploration noise."""
    sampling: np.random.Generator
    exploration: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int | np.random.SeedSequence) -> ControllerRng:
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        sampling, exploration = ss.spawn(2)
        return cls(np.random.default_rng(sampling), np.random.default_rng(exploration))


@dataclass(frozen=True)
class Truth:
    """True plant parameters, used only for diagnostics and oracle radii."""
    sys: SystemParams
    j_star: float


@dataclass(frozen=True)
class PolicyChoice:
    """What a controller's policy hook decided at a boundary."""
    gain: np.ndarray | None
    j_model: float | None = None
    sample: TsSample | None = None
    attempts: int = 0
    scale: float = 1.0


# ---------------------------------------------------------------------------
# Controller interface
# ---------------------------------------------------------------------------

class Controller(ABC):
    """
    Linear state-feedback controller that re-plans every τ₀ steps.

    Subclasses provide the policy hook; exploration noise and the holding
    period are handled here.
    """

    name: ClassVar[str] = "controller"
    explores: ClassVar[bool] = False

    def __init__(self, n: int, d: int, config: TsacConfig):
        if config.cost.q.shape != (n, n) or config.cost.r.shape != (d, d):
            raise DimensionMismatch(f"cost matrices do not match n={n}, d={d}")
        self.n = n
        self.d = d
        self.config = config
        self.truth: Truth | None = None
        self._last_log_det: float | None = None
        rls = rls_new(n, d, config.mu, config.sigma_w, config.s_bound, config.delta)
        self.state = ControllerState(rls=rls, current_gain=np.zeros((d, n)))
        self.state.phase = self._phase_at(0)

    def attach_truth(self, sys: SystemParams, j_star: float) -> None:
        self.truth = Truth(sys, j_star)

    @property
    def exploration_steps(self) -> int:
        return self.config.t_w if self.explores else 0

    def _phase_at(self, step: int) -> Phase:
        return Phase.IMPROVED_EXPLORATION if step < self.exploration_steps else Phase.STABILIZING_TS

    def radius(self) -> float:
        """Confidence radius used for sampling or optimism, scaled by beta_scale."""
        rls = self.state.rls
        if self.config.radius == "oracle":
            if self.truth is None:
                raise InvalidConfig("oracle radius needs the true system attached")
            base = weighted_distance(rls, self.truth.sys.theta)
        else:
            base = confidence_radii(rls).beta
        return self.config.beta_scale * base

    def _boundary_due(self) -> bool:
        """Whether a policy boundary should re-plan under the update rule."""
        if self.config.update_rule == "fixed" or self._last_log_det is None:
            return True
        return log_det_ratio(self.state.rls) >= self._last_log_det + math.log(2.0)

    @abstractmethod
    def choose_policy(self, rng: ControllerRng) -> PolicyChoice:
        """Compute the gain for the next holding period, or None to keep the current one."""

    def wants_policy(self) -> bool:
        return True

    def act(self, x: np.ndarray, rng: ControllerRng) -> np.ndarray:
        """
        Input for state x at the current step.

        Raises:
            SamplingExhausted: propagated from the sampling hook.
            NumericalFailure: non-finite state.
        """
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.n:
            raise DimensionMismatch(f"state has size {x.shape[0]}, expected {self.n}")
        if not np.all(np.isfinite(x)):
            raise NumericalFailure("non-finite state")

        st = self.state
        if st.policy_age == 0 and self.wants_policy() and self._boundary_due():
            self._replan(rng)

        u = st.current_gain @ x
        if st.step < self.exploration_steps:
            u = u + rng.exploration.normal(0.0, self.config.sigma_nu, self.d)

        st.policy_age = (st.policy_age + 1) % self.config.tau0
        st.step += 1
        st.phase = self._phase_at(st.step)
        return u

    def observe(self, z: np.ndarray, x_next: np.ndarray) -> None:
        rls_update(self.state.rls, z, x_next)

    def _replan(self, rng: ControllerRng) -> None:
        st = self.state
        choice = self.choose_policy(rng)
        deployed = choice.gain is not None
        if deployed:
            st.current_gain = np.array(choice.gain, dtype=float)
            st.current_sample = choice.sample
            st.policy_id += 1
            self._last_log_det = log_det_ratio(st.rls)
        st.diag.append(self._diagnose(choice, deployed))

    def _diagnose(self, choice: PolicyChoice, deployed: bool) -> PolicyUpdate:
        st = self.state
        optimistic = None
        rho_true = None
        if self.truth is not None:
            if choice.j_model is not None:
                optimistic = choice.j_model <= self.truth.j_star
            rho_true = spectral_radius(closed_loop(self.truth.sys, st.current_gain))
        if choice.sample is not None and deployed:
            choice.sample.optimistic_flag = optimistic
        return PolicyUpdate(
            step=st.step,
            policy_id=st.policy_id,
            deployed=deployed,
            j_model=choice.j_model,
            lambda_min_v=min_eigenvalue_V(st.rls),
            attempts=choice.attempts,
            scale=choice.scale,
            optimistic=optimistic,
            rho_true=rho_true,
        )
