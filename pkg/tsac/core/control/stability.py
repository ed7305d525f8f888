"""
Membership test for the (κ, γ)-stabilizable set and the closed-loop cost
Jacobian at the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from tsac.core.control.linalg import spectral_norm, spectral_radius
from tsac.core.control.riccati import (DARE_MAX_ITER, DARE_TOL, CostMatrices,
                                       RiccatiSolution, SystemParams,
                                       closed_loop, solve_dare,
                                       state_covariance)
from tsac.core.errors import InvalidConfig, NotStabilizable


@dataclass(frozen=True)
class StabilizabilityParams:
    """Bounds (κ, γ, S) describing the admissible set of models."""
    kappa: float
    gamma: float
    s_bound: float

    def __post_init__(self) -> None:
        if self.kappa < 1.0:
            raise InvalidConfig(f"kappa must be >= 1, got {self.kappa}")
        if not 0.0 < self.gamma <= 1.0:
            raise InvalidConfig(f"gamma must be in (0, 1], got {self.gamma}")
        if self.s_bound <= 0.0:
            raise InvalidConfig(f"s_bound must be positive, got {self.s_bound}")

    def p_bound(self, cost: CostMatrices) -> float:
        """D = ᾱγ⁻¹κ²(1+κ²), with ᾱ the larger of ‖Q‖ and ‖R‖."""
        alpha = max(spectral_norm(cost.q), spectral_norm(cost.r))
        return alpha / self.gamma * self.kappa ** 2 * (1.0 + self.kappa ** 2)

    def iteration_budget(self) -> int:
        """
        Riccati iterations a member can need.

        Members contract at rate at most (1−γ)² per iteration.
        """
        if self.gamma >= 1.0:
            return 200
        return min(DARE_MAX_ITER, int(math.ceil(60.0 / (-2.0 * math.log1p(-self.gamma)))) + 200)


class Reason(str, Enum):
    MEMBER = "Member"
    FROBENIUS_BOUND = "FrobeniusBound"
    NOT_STABILIZABLE = "NotStabilizable"
    GAIN_BOUND = "GainBound"
    STABILITY_MARGIN = "StabilityMargin"


@dataclass(frozen=True, eq=False)
class Membership:
    """Outcome of the membership test; truthy when the model is a member."""
    ok: bool
    reason: Reason
    frobenius: float
    solution: RiccatiSolution | None = None
    gain_norm: float | None = None
    rho_cl: float | None = None

    def __bool__(self) -> bool:
        return self.ok


def membership_in_S(
    sys: SystemParams,
    cost: CostMatrices,
    params: StabilizabilityParams,
    sigma_w: float = 1.0,
    tol: float = DARE_TOL,
) -> Membership:
    """
    Check ‖[A B]‖_F ≤ S, DARE solvable, ‖K‖ ≤ κ and ρ(A+BK) ≤ 1−γ, in order.

    The reason code names the first failed test.

    Raises:
        NumericalFailure: propagated from the Riccati solver.
    """
    frob = sys.frobenius()
    if frob > params.s_bound:
        return Membership(False, Reason.FROBENIUS_BOUND, frob)

    try:
        sol = solve_dare(sys, cost, tol=tol, max_iter=params.iteration_budget(), sigma_w=sigma_w)
    except NotStabilizable:
        return Membership(False, Reason.NOT_STABILIZABLE, frob)

    gain_norm = spectral_norm(sol.k)
    if gain_norm > params.kappa:
        return Membership(False, Reason.GAIN_BOUND, frob, sol, gain_norm)

    rho = spectral_radius(closed_loop(sys, sol.k))
    if rho > 1.0 - params.gamma:
        return Membership(False, Reason.STABILITY_MARGIN, frob, sol, gain_norm, rho)

    return Membership(True, Reason.MEMBER, frob, sol, gain_norm, rho)


def grad_L_at_optimum(sys: SystemParams, cost: CostMatrices, sigma_w: float = 1.0) -> np.ndarray:
    """
    Jacobian 2·P·A_c·Σ of the closed-loop cost map at the optimal closed loop.

    Σ solves Σ − A_c Σ A_cᵀ = σ_w² I.
    """
    sol = solve_dare(sys, cost, sigma_w=sigma_w)
    a_c = closed_loop(sys, sol.k)
    return 2.0 * sol.p @ a_c @ state_covariance(a_c, sigma_w)


def series_cost(a_c: np.ndarray, q_star: np.ndarray, sigma_w: float = 1.0, terms: int = 10_000) -> float:
    """σ_w² Σ_t tr((A_cᵗ)ᵀ Q* A_cᵗ), truncated after `terms` powers."""
    total = 0.0
    power = np.eye(a_c.shape[0])
    for _ in range(terms):
        total += float(np.sum(power * (q_star @ power)))
        power = a_c @ power
    return sigma_w ** 2 * total
