"""Deterministic control-theoretic numerics."""

from tsac.core.control.linalg import (solve_lyapunov, spectral_norm,
                                      spectral_radius, sym_sqrt)
from tsac.core.control.riccati import (CostMatrices, RiccatiSolution,
                                       SystemParams, closed_loop,
                                       cost_gradient, dare_defect,
                                       optimal_cost, policy_cost, solve_dare,
                                       state_covariance)
from tsac.core.control.stability import (Membership, Reason,
                                         StabilizabilityParams,
                                         grad_L_at_optimum, membership_in_S,
                                         series_cost)
from tsac.core.control.theory import (TheoryReport, default_sigma_nu,
                                      default_t_w, default_tau0, q_function,
                                      theory_report)

__all__: list[str] = [
    # Linear algebra
    "spectral_radius",
    "spectral_norm",
    "sym_sqrt",
    "solve_lyapunov",
    # Riccati
    "SystemParams",
    "CostMatrices",
    "RiccatiSolution",
    "solve_dare",
    "dare_defect",
    "closed_loop",
    "state_covariance",
    "policy_cost",
    "optimal_cost",
    "cost_gradient",
    # Stabilizability
    "StabilizabilityParams",
    "Membership",
    "Reason",
    "membership_in_S",
    "grad_L_at_optimum",
    "series_cost",
    # Theory
    "TheoryReport",
    "theory_report",
    "default_tau0",
    "default_t_w",
    "default_sigma_nu",
    "q_function",
]
