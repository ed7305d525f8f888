"""
Regularized least-squares identification of Θ with self-normalized
confidence radii.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from tsac.core.control.linalg import spectral_norm, sym_sqrt
from tsac.core.control.theory import upsilon_factor
from tsac.core.errors import DimensionMismatch, InvalidConfig, NumericalFailure

logger = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# Data models
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class RlsState:
    """Running design matrix V_t, cross moments and the estimate Θ̂_t."""
    n: int
    d: int
    mu: float
    sigma_w: float
    s_bound: float
    delta: float
    v: np.ndarray = field(repr=False)
    cross: np.ndarray = field(repr=False)
    theta_hat: np.ndarray = field(repr=False)
    t: int = 0

    @property
    def dim(self) -> int:
        return self.n + self.d

    def copy(self) -> RlsState:
        return RlsState(
            n=self.n, d=self.d, mu=self.mu, sigma_w=self.sigma_w,
            s_bound=self.s_bound, delta=self.delta,
            v=self.v.copy(), cross=self.cross.copy(),
            theta_hat=self.theta_hat.copy(), t=self.t,
        )


@dataclass(frozen=True)
class ConfidenceRadii:
    beta: float
    upsilon: float


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def rls_new(n: int, d: int, mu: float, sigma_w: float, s_bound: float, delta: float) -> RlsState:
    """Fresh estimator with V₀ = μI and Θ̂₀ = 0."""
    if n < 1 or d < 1:
        raise InvalidConfig(f"dimensions must be positive, got n={n}, d={d}")
    if mu <= 0.0:
        raise InvalidConfig(f"mu must be positive, got {mu}")
    if sigma_w <= 0.0:
        raise InvalidConfig(f"sigma_w must be positive, got {sigma_w}")
    if not 0.0 < delta < 1.0:
        raise InvalidConfig(f"delta must be in (0, 1), got {delta}")
    if s_bound <= 0.0:
        raise InvalidConfig(f"s_bound must be positive, got {s_bound}")

    dim = n + d
    return RlsState(
        n=n, d=d, mu=mu, sigma_w=sigma_w, s_bound=s_bound, delta=delta,
        v=mu * np.eye(dim),
        cross=np.zeros((dim, n)),
        theta_hat=np.zeros((dim, n)),
    )


def rls_update(state: RlsState, z: np.ndarray, x_next: np.ndarray) -> RlsState:
    """
    Add one regression pair (z_t, x_{t+1}) in place and return the state.

    Θ̂ is re-solved from V through a Cholesky factorization on every update.
    When round-off has pushed V off positive definiteness (very large
    regressors swamp μI) the solve falls back to an eigen-decomposition with
    eigenvalues floored at μ, since V ⪰ μI holds exactly.
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    x_next = np.asarray(x_next, dtype=float).reshape(-1)
    if z.shape[0] != state.dim or x_next.shape[0] != state.n:
        raise DimensionMismatch(f"expected z of size {state.dim} and x of size {state.n}")
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(x_next))):
        raise NumericalFailure("non-finite regression data")

    v = state.v + np.outer(z, z)
    v = (v + v.T) / 2.0
    cross = state.cross + np.outer(z, x_next)
    try:
        theta_hat = linalg.cho_solve(linalg.cho_factor(v), cross)
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.debug("Cholesky failed at t=%d (%s); flooring eigenvalues at mu", state.t + 1, e)
        w, u = _floored_eigh(v, state.mu)
        theta_hat = (u / w) @ (u.T @ cross)

    state.v = v
    state.cross = cross
    state.theta_hat = theta_hat
    state.t += 1
    return state


def _floored_eigh(v: np.ndarray, mu: float) -> tuple[np.ndarray, np.ndarray]:
    try:
        w, u = linalg.eigh(v)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalFailure(f"design matrix eigen-decomposition failed: {e}") from e
    return np.maximum(w, mu), u


def log_det_ratio(state: RlsState) -> float:
    """log(det V_t / det μI)."""
    sign, logdet = np.linalg.slogdet(state.v)
    if sign <= 0 or not math.isfinite(logdet):
        w, _ = _floored_eigh(state.v, state.mu)
        logdet = float(np.sum(np.log(w)))
    return float(logdet - state.dim * math.log(state.mu))


def confidence_radii(state: RlsState) -> ConfidenceRadii:
    """
    β_t = σ_w·√(2n·log(det(V_t)^{1/2} / (δ·det(μI)^{1/2}))) + √μ·S
    and υ_t = β_t·n·√((n+d)·log(n(n+d)/δ)).
    """
    inner = 0.5 * log_det_ratio(state) + math.log(1.0 / state.delta)
    beta = state.sigma_w * math.sqrt(2.0 * state.n * max(inner, 0.0)) + math.sqrt(state.mu) * state.s_bound
    return ConfidenceRadii(beta=beta, upsilon=beta * upsilon_factor(state.n, state.d, state.delta))


def weighted_distance(state: RlsState, theta: np.ndarray) -> float:
    """‖V_t^{1/2}(Θ − Θ̂_t)‖_F."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != state.theta_hat.shape:
        raise DimensionMismatch(f"theta has shape {theta.shape}, expected {state.theta_hat.shape}")
    diff = theta - state.theta_hat
    return float(math.sqrt(max(float(np.sum(diff * (state.v @ diff))), 0.0)))


def in_confidence_set(state: RlsState, theta: np.ndarray, beta: float | None = None) -> bool:
    """Whether Θ lies in the ellipsoid of radius β_t (or the given radius)."""
    radius = confidence_radii(state).beta if beta is None else beta
    return weighted_distance(state, theta) <= radius


def min_eigenvalue_V(state: RlsState) -> float:
    """λ_min(V_t), never below μ."""
    try:
        return max(float(np.linalg.eigvalsh(state.v)[0]), state.mu)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure(f"eigenvalue routine failed: {e}") from e


def v_sqrt(state: RlsState, inverse: bool = False) -> np.ndarray:
    """V_t^{1/2} or V_t^{-1/2}, eigenvalues floored at μ."""
    return sym_sqrt(state.v, inverse=inverse, floor=state.mu)


def estimation_error(state: RlsState, theta: np.ndarray) -> float:
    """‖Θ̂_t − Θ‖₂."""
    return spectral_norm(state.theta_hat - theta)
