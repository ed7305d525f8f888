"""Benchmark orchestration, aggregation and artifact output."""

from tsac.core.bench.montecarlo import OptimismEstimate, monte_carlo_p_opt
from tsac.core.bench.output import (atomic_write_text, read_regret_curve,
                                    write_json, write_steps_csv)
from tsac.core.bench.runner import BenchConfig, ControllerSpec, bench
from tsac.core.bench.slope import SlopeFit, fit_regret_slope
from tsac.core.bench.summary import (BenchSummary, ControllerSummary,
                                     MetricSummary, truncated_mean)

__all__: list[str] = [
    "BenchConfig",
    "ControllerSpec",
    "bench",
    "BenchSummary",
    "ControllerSummary",
    "MetricSummary",
    "truncated_mean",
    "SlopeFit",
    "fit_regret_slope",
    "OptimismEstimate",
    "monte_carlo_p_opt",
    "atomic_write_text",
    "write_json",
    "write_steps_csv",
    "read_regret_curve",
]
