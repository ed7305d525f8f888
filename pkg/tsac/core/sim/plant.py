"""
Seeded linear plant x_{t+1} = A·x_t + B·u_t + w_t and the builtin
benchmark systems.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from tsac.core.control.linalg import as_matrix
from tsac.core.control.riccati import CostMatrices, SystemParams
from tsac.core.errors import DimensionMismatch, Diverged, InvalidConfig

DIVERGENCE_GUARD = 1e30

BOEING_A = (
    (0.99, 0.03, -0.02, -0.32),
    (0.01, 0.47, 4.7, 0.0),
    (0.02, -0.06, 0.4, 0.0),
    (0.01, -0.04, 0.72, 0.99),
)
BOEING_B = (
    (0.01, 0.99),
    (-3.44, 1.66),
    (-0.83, 0.44),
    (-0.47, 0.25),
)

PLANTS = ("boeing747", "scalar", "inline")


@dataclass(frozen=True, eq=False)
class PlantConfig:
    """True system, cost, noise level, initial state and seed of one run."""
    sys: SystemParams
    cost: CostMatrices
    sigma_w: float = 1.0
    x0: np.ndarray | None = None
    seed: int = 0
    name: str = "inline"
    guard: float = DIVERGENCE_GUARD
    x_init: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.sigma_w <= 0.0:
            raise InvalidConfig(f"sigma_w must be positive, got {self.sigma_w}")
        self.cost.check(self.sys)
        x0 = np.zeros(self.sys.n) if self.x0 is None else np.asarray(self.x0, dtype=float).reshape(-1)
        if x0.shape[0] != self.sys.n:
            raise DimensionMismatch(f"x0 has size {x0.shape[0]}, expected {self.sys.n}")
        if not np.all(np.isfinite(x0)):
            raise InvalidConfig("x0 must be finite")
        object.__setattr__(self, "x_init", x0)

    @property
    def n(self) -> int:
        return self.sys.n

    @property
    def d(self) -> int:
        return self.sys.d

    def with_seed(self, seed: int) -> PlantConfig:
        return PlantConfig(self.sys, self.cost, self.sigma_w, self.x_init, seed, self.name, self.guard)

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "a": self.sys.a.tolist(),
            "b": self.sys.b.tolist(),
            "q": self.cost.q.tolist(),
            "r": self.cost.r.tolist(),
            "sigma_w": self.sigma_w,
            "x0": self.x_init.tolist(),
            "seed": self.seed,
        }


def plant_step(
    cfg: PlantConfig,
    x: np.ndarray,
    u: np.ndarray,
    rng: np.random.Generator,
    step: int = -1,
) -> tuple[np.ndarray, float]:
    """
    Advance the plant one step.

    Returns:
        The next state and the stage cost xᵀQx + uᵀRu of the current pair.

    Raises:
        Diverged: ‖x_next‖ exceeded the guard.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    if x.shape[0] != cfg.n or u.shape[0] != cfg.d:
        raise DimensionMismatch(f"expected x of size {cfg.n} and u of size {cfg.d}")

    cost = cfg.cost.stage(x, u)
    w = rng.normal(0.0, cfg.sigma_w, cfg.n)
    x_next = cfg.sys.a @ x + cfg.sys.b @ u + w

    norm = float(np.linalg.norm(x_next))
    if not np.isfinite(norm) or norm > cfg.guard:
        raise Diverged(step, norm)
    return x_next, cost


def boeing_plant(seed: int = 0, sigma_w: float = 1.0, x0: np.ndarray | None = None) -> PlantConfig:
    """Linearized longitudinal Boeing 747 dynamics at cruise, 1 s discretization, Q = I, R = I."""
    sys = SystemParams(np.array(BOEING_A), np.array(BOEING_B))
    return PlantConfig(sys, CostMatrices.identity(4, 2), sigma_w, x0, seed, "boeing747")


def scalar_plant(
    a: float = 0.9,
    b: float = 1.0,
    q: float = 1.0,
    r: float = 1.0,
    sigma_w: float = 1.0,
    seed: int = 0,
    x0: float = 0.0,
) -> PlantConfig:
    sys = SystemParams(np.array([[a]]), np.array([[b]]))
    return PlantConfig(sys, CostMatrices(np.array([[q]]), np.array([[r]])), sigma_w, np.array([x0]), seed, "scalar")


def inline_plant(
    a: Any,
    b: Any,
    q: Any = None,
    r: Any = None,
    sigma_w: float = 1.0,
    seed: int = 0,
    x0: Any = None,
) -> PlantConfig:
    """Plant from row-major nested lists. Q and R default to identities."""
    sys = SystemParams(as_matrix(a, "a"), as_matrix(b, "b"))
    cost = CostMatrices(
        np.eye(sys.n) if q is None else as_matrix(q, "q"),
        np.eye(sys.d) if r is None else as_matrix(r, "r"),
    )
    return PlantConfig(sys, cost, sigma_w, None if x0 is None else np.asarray(x0, dtype=float), seed, "inline")


# ---------------------------------------------------------------------------
# Seed streams
# ---------------------------------------------------------------------------

PLANT_STREAM = 0
CONTROLLER_STREAM = 1


def derive_seed(base_seed: int, *key: int) -> int:
    """Deterministic 63-bit seed for a (run, controller, ...) key."""
    ss = np.random.SeedSequence(base_seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def plant_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(PLANT_STREAM,)))


def controller_seed_sequence(seed: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(CONTROLLER_STREAM,))
