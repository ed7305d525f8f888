"""Name → controller lookup used by the harness."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from tsac.core.agents.base import Controller, TsacConfig
from tsac.core.agents.certainty import CertaintyEquivalence, FixedGain
from tsac.core.agents.optimistic import Ofulq, Stabl
from tsac.core.agents.thompson import Tsac, TsLqr
from tsac.core.control.riccati import SystemParams, solve_dare
from tsac.core.errors import InvalidConfig

ADAPTIVE: dict[str, Callable[[int, int, TsacConfig], Controller]] = {
    Tsac.name: Tsac,
    TsLqr.name: TsLqr,
    Ofulq.name: Ofulq,
    Stabl.name: Stabl,
    CertaintyEquivalence.name: CertaintyEquivalence,
}

FIXED = ("oracle", "zero")

CONTROLLERS: tuple[str, ...] = (*ADAPTIVE, *FIXED)


def build_controller(name: str, config: TsacConfig, plant_sys: SystemParams) -> Controller:
    """
    Instantiate a controller by name for a plant of plant_sys's dimensions.

    The true system is attached for diagnostics and oracle radii; the
    adaptive controllers never use it to choose inputs unless
    config.radius is "oracle".
    """
    n, d = plant_sys.n, plant_sys.d
    optimum = solve_dare(plant_sys, config.cost, sigma_w=config.sigma_w)

    if name in ADAPTIVE:
        controller = ADAPTIVE[name](n, d, config)
    elif name == "oracle":
        controller = FixedGain(n, d, config, optimum.k, name="oracle")
    elif name == "zero":
        controller = FixedGain(n, d, config, np.zeros((d, n)), name="zero")
    else:
        raise InvalidConfig(f"unknown controller '{name}' (choose from {', '.join(CONTROLLERS)})")

    controller.attach_truth(plant_sys, optimum.j)
    return controller
