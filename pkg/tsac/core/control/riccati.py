"""
Discrete algebraic Riccati equation, optimal gains and average costs.

Models are stored as Θ with Θᵀ = [A B], so Θ has shape (n+d)×n.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from tsac.core.control.linalg import (as_matrix, require_square, solve_lyapunov,
                                     spectral_radius)
from tsac.core.errors import (DimensionMismatch, InvalidConfig,
                              NotStabilizable, NumericalFailure)

logger = logging.getLogger(__name__)

DARE_TOL = 1e-12
# Defects below ROUNDOFF_FLOOR·‖P‖_F are not resolvable in double precision
ROUNDOFF_FLOOR = 64 * float(np.finfo(float).eps)
DARE_MAX_ITER = 100_000
OVERFLOW_GUARD = 1e12
SYMMETRY_TOL = 1e-10


# ---------------------------------------------------------------------------
# Data models
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SystemParams:
    """A linear plant x' = A x + B u."""
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        a = as_matrix(self.a, "A")
        b = as_matrix(self.b, "B")
        require_square(a, "A")
        if b.shape[0] != a.shape[0]:
            raise DimensionMismatch(f"B has {b.shape[0]} rows, A is {a.shape[0]}x{a.shape[0]}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def d(self) -> int:
        return self.b.shape[1]

    @property
    def theta(self) -> np.ndarray:
        return np.vstack((self.a.T, self.b.T))

    @classmethod
    def from_theta(cls, theta: np.ndarray, n: int) -> SystemParams:
        theta = np.asarray(theta, dtype=float)
        if theta.ndim != 2 or theta.shape[1] != n or theta.shape[0] <= n:
            raise DimensionMismatch(f"theta of shape {theta.shape} does not stack [A B] for n={n}")
        return cls(a=theta[:n].T, b=theta[n:].T)

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self.a ** 2) + np.sum(self.b ** 2)))

    def __repr__(self) -> str:
        return f"SystemParams(n={self.n}, d={self.d})"


@dataclass(frozen=True, eq=False)
class CostMatrices:
    """Quadratic stage cost xᵀQx + uᵀRu."""
    q: np.ndarray
    r: np.ndarray

    def __post_init__(self) -> None:
        q = as_matrix(self.q, "Q")
        r = as_matrix(self.r, "R")
        for name, m in (("Q", q), ("R", r)):
            require_square(m, name)
            if np.linalg.norm(m - m.T) > SYMMETRY_TOL:
                raise InvalidConfig(f"{name} is not symmetric")
            if np.linalg.eigvalsh(m)[0] <= 0.0:
                raise InvalidConfig(f"{name} is not positive definite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @classmethod
    def identity(cls, n: int, d: int) -> CostMatrices:
        return cls(q=np.eye(n), r=np.eye(d))

    def stage(self, x: np.ndarray, u: np.ndarray) -> float:
        return float(x @ self.q @ x + u @ self.r @ u)

    def check(self, sys: SystemParams) -> None:
        if self.q.shape[0] != sys.n or self.r.shape[0] != sys.d:
            raise DimensionMismatch(
                f"cost is {self.q.shape[0]}/{self.r.shape[0]}, system is n={sys.n}, d={sys.d}"
            )


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    p: np.ndarray
    k: np.ndarray
    j: float
    iterations: int
    residual: float


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------

def dare_defect(sys: SystemParams, cost: CostMatrices, p: np.ndarray) -> float:
    """Frobenius norm of P − AᵀPA − Q + AᵀPB(R+BᵀPB)⁻¹BᵀPA."""
    a, b = sys.a, sys.b
    btpa = b.T @ p @ a
    rhs = a.T @ p @ a + cost.q - btpa.T @ np.linalg.solve(cost.r + b.T @ p @ b, btpa)
    return float(np.linalg.norm(p - rhs))


def solve_dare(
    sys: SystemParams,
    cost: CostMatrices,
    tol: float = DARE_TOL,
    max_iter: int = DARE_MAX_ITER,
    sigma_w: float = 1.0,
    p0: np.ndarray | None = None,
) -> RiccatiSolution:
    """
    Solve the DARE by value iteration from P₀ = Q (or a warm start p0).

    Iteration stops at the first iterate whose DARE defect is at most tol,
    or at most ROUNDOFF_FLOOR·‖P‖_F when that is larger. The iterate is
    returned with its own gain and defect.

    Raises:
        NotStabilizable: trace(P) passed the overflow guard or the iteration
            did not converge within max_iter.
        NumericalFailure: non-finite entries or a singular R + BᵀPB.
    """
    if tol <= 0:
        raise InvalidConfig("DARE tolerance must be positive")
    cost.check(sys)

    a, b, q, r = sys.a, sys.b, cost.q, cost.r
    at, bt = a.T, b.T
    p = q.copy() if p0 is None else np.array(p0, dtype=float)
    p = (p + p.T) / 2.0

    for it in range(1, max_iter + 1):
        btp = bt @ p
        btpa = btp @ a
        try:
            gain = np.linalg.solve(r + btp @ b, btpa)
        except np.linalg.LinAlgError as e:
            raise NumericalFailure(f"singular R + BᵀPB at iteration {it}") from e

        p_next = at @ p @ a + q - btpa.T @ gain
        p_next = (p_next + p_next.T) / 2.0

        if not np.all(np.isfinite(p_next)):
            raise NumericalFailure(f"non-finite Riccati iterate at iteration {it}")
        if np.trace(p_next) > OVERFLOW_GUARD:
            logger.debug("DARE diverged after %d iterations", it)
            raise NotStabilizable(f"trace(P) exceeded {OVERFLOW_GUARD:.0e} after {it} iterations")

        # P_{k+1} is the Riccati map of P_k, so the step is P_k's defect
        limit = max(tol, ROUNDOFF_FLOOR * max(1.0, float(np.linalg.norm(p))))
        if float(np.linalg.norm(p_next - p)) <= limit:
            residual = dare_defect(sys, cost, p)
            if residual <= limit:
                return RiccatiSolution(
                    p=p,
                    k=-gain,
                    j=float(sigma_w ** 2 * np.trace(p)),
                    iterations=it,
                    residual=residual,
                )
        p = p_next

    logger.debug("DARE did not converge within %d iterations", max_iter)
    raise NotStabilizable(f"no convergence within {max_iter} iterations")


def closed_loop(sys: SystemParams, k: np.ndarray) -> np.ndarray:
    """A + B·K."""
    k = np.asarray(k, dtype=float)
    if k.shape != (sys.d, sys.n):
        raise DimensionMismatch(f"gain has shape {k.shape}, expected {(sys.d, sys.n)}")
    return sys.a + sys.b @ k


def state_covariance(a_c: np.ndarray, sigma_w: float = 1.0) -> np.ndarray:
    """Stationary covariance Σ = A_c Σ A_cᵀ + σ_w² I of a stable closed loop."""
    return solve_lyapunov(a_c, sigma_w ** 2 * np.eye(a_c.shape[0]))


def policy_cost(sys: SystemParams, cost: CostMatrices, k: np.ndarray, sigma_w: float = 1.0) -> float:
    """
    Average cost of playing u = K x on sys.

    Raises:
        NotStabilizable: K does not stabilize sys.
    """
    a_c = closed_loop(sys, k)
    if spectral_radius(a_c) >= 1.0:
        raise NotStabilizable("gain does not stabilize the system")
    sigma = state_covariance(a_c, sigma_w)
    return float(np.trace((cost.q + k.T @ cost.r @ k) @ sigma))


def optimal_cost(sys: SystemParams, cost: CostMatrices, sigma_w: float = 1.0) -> float:
    """J(Θ) = σ_w²·tr P(Θ)."""
    return solve_dare(sys, cost, sigma_w=sigma_w).j


def cost_gradient(
    sys: SystemParams,
    cost: CostMatrices,
    sigma_w: float = 1.0,
    solution: RiccatiSolution | None = None,
) -> np.ndarray:
    """
    ∇_Θ J(Θ) in the (n+d)×n layout of Θ.

    At the optimal gain the derivative through K vanishes, leaving
    ∂J/∂A = 2σ_w² P A_c Σ₀ and ∂J/∂B = 2σ_w² P A_c Σ₀ Kᵀ with Σ₀ = A_c Σ₀ A_cᵀ + I.
    """
    sol = solution or solve_dare(sys, cost, sigma_w=sigma_w)
    a_c = closed_loop(sys, sol.k)
    sigma0 = state_covariance(a_c)
    grad_a = 2.0 * sigma_w ** 2 * sol.p @ a_c @ sigma0
    grad_b = grad_a @ sol.k.T
    return np.vstack((grad_a.T, grad_b.T))
