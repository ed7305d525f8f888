"""
Schedules and bound formulas from the regret analysis.

Most of these are diagnostics: at desk scale the bounds are far larger than
any practical horizon, so they are reported, not enforced.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from scipy import stats

from tsac.core.errors import InvalidConfig


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x) = 1 − Φ(x)."""
    return float(stats.norm.sf(x))


def default_tau0(kappa: float, gamma: float) -> int:
    """Policy-holding period ceil(2γ⁻¹·ln(2κ√2))."""
    return max(1, math.ceil(2.0 / gamma * math.log(2.0 * kappa * math.sqrt(2.0))))


def default_t_w(horizon: int, n: int, d: int, scale: float = 0.5, schedule: str = "sqrt") -> int:
    """
    Length of the improved-exploration phase.

    "sqrt" is the general schedule c·√T·ln T, "log" the schedule c·ln T that
    suffices when the optimal closed loop is non-singular. Both are floored at
    10·(n+d) and capped at the horizon.
    """
    log_t = math.log(max(horizon, 2))
    if schedule == "sqrt":
        raw = scale * math.sqrt(horizon) * log_t
    elif schedule == "log":
        raw = scale * log_t
    else:
        raise InvalidConfig(f"unknown exploration schedule '{schedule}'")
    return min(horizon, max(math.ceil(raw), 10 * (n + d)))


def default_sigma_nu(kappa: float, sigma_w: float) -> float:
    """Exploration std √2·κ·σ_w."""
    return math.sqrt(2.0) * kappa * sigma_w


def state_bound(kappa: float, gamma: float, sigma_w: float, n: int, horizon: int, t_w: int, delta: float) -> float:
    """X_s = (12κ²+2κ√2)γ⁻¹σ_w·√(2n·log(n(T−T_w)/δ))."""
    remaining = max(horizon - t_w, 1)
    lead = (12.0 * kappa ** 2 + 2.0 * kappa * math.sqrt(2.0)) * sigma_w / gamma
    return lead * math.sqrt(2.0 * n * max(math.log(n * remaining / delta), 0.0))


def recovery_time(t_w: int, tau0: int, n: int, d: int) -> float:
    """T_r = T_w + (n+d)·τ₀·log(n+d)."""
    return t_w + (n + d) * tau0 * math.log(n + d)


def default_mu(kappa: float, x_s: float) -> float:
    """Regularizer (1+κ²)X_s²."""
    return (1.0 + kappa ** 2) * x_s ** 2


def excitation_start(n: int, d: int, delta: float) -> float:
    """Step after which λ_min(V_t) grows linearly: 200(n+d)·log(12/δ)."""
    return 200.0 * (n + d) * math.log(12.0 / delta)


def upsilon_factor(n: int, d: int, delta: float) -> float:
    """υ_t/β_t = n·√((n+d)·log(n(n+d)/δ))."""
    return n * math.sqrt((n + d) * math.log(n * (n + d) / delta))


def beta_horizon_bound(
    n: int, d: int, sigma_w: float, mu: float, s_bound: float, delta: float, horizon: int, z_bound: float
) -> float:
    """
    Upper bound on β_T with log det(V_T)/det(μI) ≤ (n+d)·log(1 + T·Z²/(μ(n+d))).

    z_bound is a bound Z on ‖z_t‖.
    """
    log_det_ratio = (n + d) * math.log1p(horizon * z_bound ** 2 / (mu * (n + d)))
    inner = 0.5 * log_det_ratio + math.log(1.0 / delta)
    return sigma_w * math.sqrt(2.0 * n * inner) + math.sqrt(mu) * s_bound


def exploration_floor(beta_t: float, upsilon_t: float, sigma_w: float, n: int, p_bound: float) -> float:
    """T₀ = 49(β_T+υ_T)² / (σ_w·min{σ_w²n/(142D⁷), 1/(54²D¹⁰)})."""
    try:
        denom = sigma_w * min(sigma_w ** 2 * n / (142.0 * p_bound ** 7), 1.0 / (54.0 ** 2 * p_bound ** 10))
    except OverflowError:
        return math.inf
    if denom <= 0.0:
        return math.inf
    return 49.0 * (beta_t + upsilon_t) ** 2 / denom


@dataclass(frozen=True)
class TheoryReport:
    tau0: int
    t_w: int
    p_bound: float
    state_bound: float
    recovery_time: float
    excitation_start: float
    beta_horizon: float
    upsilon_horizon: float
    exploration_floor: float
    q1: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def theory_report(
    n: int,
    d: int,
    kappa: float,
    gamma: float,
    s_bound: float,
    sigma_w: float,
    delta: float,
    mu: float,
    horizon: int,
    p_bound: float,
    tau0: int | None = None,
    t_w: int | None = None,
) -> TheoryReport:
    tau0 = tau0 or default_tau0(kappa, gamma)
    t_w = default_t_w(horizon, n, d) if t_w is None else t_w
    x_s = state_bound(kappa, gamma, sigma_w, n, horizon, t_w, delta)
    z_bound = math.sqrt(1.0 + kappa ** 2) * x_s
    beta_t = beta_horizon_bound(n, d, sigma_w, mu, s_bound, delta, horizon, z_bound)
    upsilon_t = beta_t * upsilon_factor(n, d, delta)
    return TheoryReport(
        tau0=tau0,
        t_w=t_w,
        p_bound=p_bound,
        state_bound=x_s,
        recovery_time=recovery_time(t_w, tau0, n, d),
        excitation_start=excitation_start(n, d, delta),
        beta_horizon=beta_t,
        upsilon_horizon=upsilon_t,
        exploration_floor=exploration_floor(beta_t, upsilon_t, sigma_w, n, p_bound),
        q1=q_function(1.0),
    )
