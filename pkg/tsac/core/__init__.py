"""Core functionality for tsac."""

# Expose main classes and functions
# Controllers
from tsac.core.agents import (CONTROLLERS, CertaintyEquivalence, Controller,
                              ControllerRng, FixedGain, Ofulq, Stabl, Tsac,
                              TsacConfig, TsLqr, build_controller)
# args
from tsac.core.args import APP_DESC, APP_NAME, parse_args
# Benchmarks
from tsac.core.bench import (BenchConfig, BenchSummary, ControllerSpec,
                             bench, fit_regret_slope, monte_carlo_p_opt,
                             truncated_mean)
from tsac.core.cache import CacheManager
from tsac.core.config import Configuration, get_config
# Control numerics
from tsac.core.control import (CostMatrices, Membership, Reason,
                               RiccatiSolution, StabilizabilityParams,
                               SystemParams, grad_L_at_optimum,
                               membership_in_S, policy_cost, solve_dare)
# Learning
from tsac.core.learning import (PgdConfig, RlsState, TsSample,
                                confidence_radii, estimate_p_opt,
                                optimistic_search, rls_new, rls_update,
                                ts_sample)
from tsac.core.logs import setup_logging
# Simulation
from tsac.core.sim import (PlantConfig, RunLog, StepRecord, boeing_plant,
                           plant_step, run_episode, scalar_plant)

__all__ = [
    # Control
    "SystemParams",
    "CostMatrices",
    "RiccatiSolution",
    "solve_dare",
    "policy_cost",
    "StabilizabilityParams",
    "Membership",
    "Reason",
    "membership_in_S",
    "grad_L_at_optimum",
    # Learning
    "RlsState",
    "rls_new",
    "rls_update",
    "confidence_radii",
    "TsSample",
    "ts_sample",
    "estimate_p_opt",
    "PgdConfig",
    "optimistic_search",
    # Controllers
    "TsacConfig",
    "Controller",
    "ControllerRng",
    "Tsac",
    "TsLqr",
    "Ofulq",
    "Stabl",
    "CertaintyEquivalence",
    "FixedGain",
    "CONTROLLERS",
    "build_controller",
    # Simulation
    "PlantConfig",
    "plant_step",
    "boeing_plant",
    "scalar_plant",
    "StepRecord",
    "RunLog",
    "run_episode",
    # Benchmarks
    "BenchConfig",
    "ControllerSpec",
    "BenchSummary",
    "bench",
    "truncated_mean",
    "fit_regret_slope",
    "monte_carlo_p_opt",
    # Cache
    "CacheManager",
    # Configuration
    "get_config",
    "Configuration",
    # Logging
    "setup_logging",
    # args
    "parse_args",
    "APP_NAME",
    "APP_DESC"
]
