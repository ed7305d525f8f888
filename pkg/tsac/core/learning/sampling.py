"""
Thompson sampling with rejection onto the stabilizable set.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from tsac.core.control.riccati import CostMatrices, SystemParams, solve_dare
from tsac.core.control.stability import (Membership, StabilizabilityParams,
                                         membership_in_S)
from tsac.core.errors import (EmptyWindow, InvalidConfig, NumericalFailure,
                              SamplingExhausted)
from tsac.core.learning.rls import RlsState, confidence_radii, v_sqrt

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 1000
SCALE_LEVELS = 6


@dataclass(eq=False)
class TsSample:
    """An accepted draw Θ̃ together with how it was obtained."""
    theta: np.ndarray
    attempts: int
    scale_used: float
    membership: Membership
    optimistic_flag: bool | None = None

    @property
    def gain(self) -> np.ndarray:
        assert self.membership.solution is not None
        return self.membership.solution.k

    @property
    def cost(self) -> float:
        assert self.membership.solution is not None
        return self.membership.solution.j


def candidate_draw(
    state: RlsState,
    beta: float,
    rng: np.random.Generator,
    root: np.ndarray | None = None,
) -> np.ndarray:
    """Θ̂ + β·V^{-1/2}·η with η having independent standard normal entries."""
    if root is None:
        root = v_sqrt(state, inverse=True)
    eta = rng.standard_normal(state.theta_hat.shape)
    return state.theta_hat + beta * (root @ eta)


def _membership(theta: np.ndarray, state: RlsState, params: StabilizabilityParams,
                cost: CostMatrices) -> Membership | None:
    """Membership of a candidate, or None when its Riccati iteration broke down."""
    try:
        return membership_in_S(SystemParams.from_theta(theta, state.n), cost, params, state.sigma_w)
    except NumericalFailure as e:
        logger.debug("Candidate rejected: %s", e)
        return None


def ts_sample(
    state: RlsState,
    params: StabilizabilityParams,
    cost: CostMatrices,
    rng: np.random.Generator,
    max_attempts: int = MAX_ATTEMPTS,
    scale_levels: int = SCALE_LEVELS,
    beta: float | None = None,
) -> TsSample:
    """
    Draw Θ̃ = Θ̂ + β·V^{-1/2}·η until it passes the membership test.

    After max_attempts rejections the perturbation is halved, for up to
    scale_levels halvings; the last resort is Θ̂ itself (scale 0).

    Raises:
        SamplingExhausted: Θ̂ fails the membership test as well.
    """
    if max_attempts < 1:
        raise InvalidConfig("max_attempts must be at least 1")

    radius = confidence_radii(state).beta if beta is None else beta
    root = v_sqrt(state, inverse=True)
    center = state.theta_hat
    attempts = 0

    if radius > 0.0:
        for level in range(scale_levels + 1):
            scale = 0.5 ** level
            for _ in range(max_attempts):
                attempts += 1
                candidate = candidate_draw(state, scale * radius, rng, root)
                member = _membership(candidate, state, params, cost)
                if member:
                    if level:
                        logger.info("Sample accepted at reduced scale %.4g after %d draws", scale, attempts)
                    return TsSample(candidate, attempts, scale, member)
            logger.debug("No member after %d draws at scale %.4g", max_attempts, scale)

    attempts += 1
    member = _membership(center, state, params, cost)
    if member:
        logger.info("Sampling fell back to the point estimate after %d draws", attempts)
        return TsSample(center.copy(), attempts, 0.0, member)

    reason = "NumericalFailure" if member is None else member.reason.value
    logger.warning("Sampling exhausted: estimate rejected (%s)", reason)
    raise SamplingExhausted(f"no member of the admissible set after {attempts} draws ({reason})")


def is_optimistic(
    sample: TsSample,
    true_sys: SystemParams,
    cost: CostMatrices,
    sigma_w: float,
    j_star: float | None = None,
) -> bool:
    """
    J(Θ̃) ≤ J(Θ_*).

    Raises:
        NotStabilizable: either model has no DARE solution.
    """
    n = true_sys.n
    j_sample = solve_dare(SystemParams.from_theta(sample.theta, n), cost, sigma_w=sigma_w).j
    if j_star is None:
        j_star = solve_dare(true_sys, cost, sigma_w=sigma_w).j
    return j_sample <= j_star


def _flag(item: TsSample | bool | None) -> bool:
    value = item.optimistic_flag if isinstance(item, TsSample) else item
    if value is None:
        raise InvalidConfig("optimism flag missing from trace")
    return bool(value)


def estimate_p_opt(
    trace: Sequence[TsSample | bool | None],
    window: range | slice | None = None,
) -> float:
    """
    Fraction of optimistic samples among the policy updates in window.

    Raises:
        EmptyWindow: no policy update falls in the window.
    """
    if window is None:
        selected = list(trace)
    elif isinstance(window, range):
        selected = [trace[i] for i in window if 0 <= i < len(trace)]
    else:
        selected = list(trace[window])

    if not selected:
        raise EmptyWindow("no policy updates in the requested window")

    return sum(_flag(item) for item in selected) / len(selected)
