"""
Heuristic optimistic model search by projected gradient descent.

The descent runs in whitened coordinates Y = V^{1/2}(Θ − Θ̂), where the
confidence ellipsoid is the Frobenius ball of radius β and rescaling onto it
is an exact projection.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from tsac.core.control.riccati import (CostMatrices, RiccatiSolution,
                                       SystemParams, cost_gradient, solve_dare)
from tsac.core.control.stability import StabilizabilityParams, membership_in_S
from tsac.core.errors import (InvalidConfig, NotStabilizable, NumericalFailure,
                              OptimisticSearchFailed)
from tsac.core.learning.rls import RlsState, confidence_radii, v_sqrt

logger = logging.getLogger(__name__)

GRADIENTS = ("analytic", "finite_difference")


@dataclass(frozen=True)
class PgdConfig:
    step_scale: float = 0.05
    iterations: int = 50
    fd_step: float = 1e-5
    gradient: str = "analytic"

    def __post_init__(self) -> None:
        if self.step_scale < 0.0 or self.iterations < 0 or self.fd_step <= 0.0:
            raise InvalidConfig("PGD step, iterations and fd_step must be non-negative")
        if self.gradient not in GRADIENTS:
            raise InvalidConfig(f"gradient must be one of {GRADIENTS}, got '{self.gradient}'")


def finite_difference_gradient(
    sys: SystemParams,
    cost: CostMatrices,
    sigma_w: float,
    step: float,
    solution: RiccatiSolution | None = None,
) -> np.ndarray:
    """Central differences of J over every entry of Θ, warm-starting each DARE."""
    theta = sys.theta
    p0 = solution.p if solution is not None else None
    grad = np.zeros_like(theta)
    for idx in np.ndindex(*theta.shape):
        bump = np.zeros_like(theta)
        bump[idx] = step
        j_plus = solve_dare(SystemParams.from_theta(theta + bump, sys.n), cost, sigma_w=sigma_w, p0=p0).j
        j_minus = solve_dare(SystemParams.from_theta(theta - bump, sys.n), cost, sigma_w=sigma_w, p0=p0).j
        grad[idx] = (j_plus - j_minus) / (2.0 * step)
    return grad


def project_to_ellipsoid(state: RlsState, theta: np.ndarray, beta: float) -> np.ndarray:
    """Pull Θ back onto {‖V^{1/2}(Θ−Θ̂)‖_F ≤ β} by rescaling the deviation."""
    diff = theta - state.theta_hat
    dist = math.sqrt(max(float(np.sum(diff * (state.v @ diff))), 0.0))
    if dist <= beta:
        return theta
    if beta <= 0.0:
        return state.theta_hat.copy()
    return state.theta_hat + diff * (beta / dist)


def optimistic_search(
    state: RlsState,
    params: StabilizabilityParams,
    cost: CostMatrices,
    pgd: PgdConfig = PgdConfig(),
    beta: float | None = None,
) -> np.ndarray:
    """
    Approximately minimize J(Θ) over the confidence ellipsoid intersected with
    the admissible set.

    The start point Θ̂ counts as an iterate, so the result never costs more
    than Θ̂ when Θ̂ is admissible.

    Raises:
        OptimisticSearchFailed: no iterate passed the membership test.
    """
    radius = confidence_radii(state).beta if beta is None else beta
    root = v_sqrt(state)
    root_inv = v_sqrt(state, inverse=True)
    sigma_w = state.sigma_w
    step = pgd.step_scale * radius

    y = np.zeros_like(state.theta_hat)
    theta = state.theta_hat.copy()
    best: np.ndarray | None = None
    best_j = math.inf

    for it in range(pgd.iterations + 1):
        sys = SystemParams.from_theta(theta, state.n)
        try:
            member = membership_in_S(sys, cost, params, sigma_w)
        except NumericalFailure as e:
            logger.debug("PGD stopped at iteration %d: %s", it, e)
            break
        if member and member.solution is not None and member.solution.j < best_j:
            best, best_j = theta.copy(), member.solution.j

        if it == pgd.iterations or step <= 0.0:
            break

        try:
            solution = member.solution or solve_dare(sys, cost, sigma_w=sigma_w)
            if pgd.gradient == "analytic":
                grad = cost_gradient(sys, cost, sigma_w, solution)
            else:
                grad = finite_difference_gradient(sys, cost, sigma_w, pgd.fd_step, solution)
        except (NotStabilizable, NumericalFailure) as e:
            logger.debug("PGD stopped at iteration %d: %s", it, e)
            break

        grad_y = root_inv @ grad
        norm = float(np.linalg.norm(grad_y))
        if not math.isfinite(norm) or norm == 0.0:
            break

        y = y - step * grad_y / norm
        y_norm = float(np.linalg.norm(y))
        if y_norm > radius:
            y = y * (radius / y_norm)
        theta = state.theta_hat + root_inv @ y

    if best is None:
        raise OptimisticSearchFailed("no admissible iterate in the confidence set")

    logger.debug("PGD best J=%.6g (radius %.4g, |V^1/2 dTheta|=%.4g)",
                 best_j, radius, float(np.linalg.norm(root @ (best - state.theta_hat))))
    return best
