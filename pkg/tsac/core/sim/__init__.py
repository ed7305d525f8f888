"""Seeded plant simulation and episode runner."""

from tsac.core.sim.episode import CSV_HEADER, RunLog, StepRecord, run_episode
from tsac.core.sim.plant import (DIVERGENCE_GUARD, PLANTS, PlantConfig,
                                 boeing_plant, derive_seed, inline_plant,
                                 plant_step, scalar_plant)

__all__: list[str] = [
    "PlantConfig",
    "plant_step",
    "boeing_plant",
    "scalar_plant",
    "inline_plant",
    "derive_seed",
    "PLANTS",
    "DIVERGENCE_GUARD",
    "StepRecord",
    "RunLog",
    "run_episode",
    "CSV_HEADER",
]
