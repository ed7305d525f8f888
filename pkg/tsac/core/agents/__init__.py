"""Adaptive LQR controllers behind one act/observe interface."""

from tsac.core.agents.base import (Controller, ControllerRng, ControllerState,
                                   Phase, PolicyChoice, PolicyUpdate,
                                   TsacConfig)
from tsac.core.agents.certainty import CertaintyEquivalence, FixedGain
from tsac.core.agents.optimistic import Ofulq, Stabl
from tsac.core.agents.registry import CONTROLLERS, build_controller
from tsac.core.agents.thompson import Tsac, TsLqr

__all__: list[str] = [
    "TsacConfig",
    "Phase",
    "ControllerState",
    "ControllerRng",
    "PolicyChoice",
    "PolicyUpdate",
    "Controller",
    "Tsac",
    "TsLqr",
    "Ofulq",
    "Stabl",
    "CertaintyEquivalence",
    "FixedGain",
    "CONTROLLERS",
    "build_controller",
]
