"""Cross-run aggregation: averages and best-p% truncated means."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from tsac.core.errors import InsufficientData, InvalidConfig
from tsac.core.sim.episode import RunLog


def truncated_mean(values: Iterable[float], percent: float) -> float:
    """
    Mean of the best (smallest) ceil(percent·N/100) values.

    Raises:
        InsufficientData: no values.
    """
    if not 0.0 < percent <= 100.0:
        raise InvalidConfig(f"percent must be in (0, 100], got {percent}")
    ordered = np.sort(np.asarray(list(values), dtype=float))
    if ordered.size == 0:
        raise InsufficientData("no values to aggregate")
    keep = math.ceil(percent * ordered.size / 100.0)
    return float(np.mean(ordered[:keep]))


@dataclass(frozen=True)
class MetricSummary:
    average: float
    top95: float
    top90: float

    @classmethod
    def of(cls, values: Sequence[float]) -> MetricSummary:
        return cls(
            average=truncated_mean(values, 100.0),
            top95=truncated_mean(values, 95.0),
            top90=truncated_mean(values, 90.0),
        )


@dataclass(frozen=True)
class ControllerSummary:
    runs: int
    regret: MetricSummary
    max_state_norm: MetricSummary
    diverged: int
    aborted: int
    p_opt: float | None
    rts_mean: float

    @classmethod
    def of(cls, logs: Sequence[RunLog]) -> ControllerSummary:
        flags = [flag for log in logs for flag in log.optimism_flags(log.t_w)]
        return cls(
            runs=len(logs),
            regret=MetricSummary.of([log.regret for log in logs]),
            max_state_norm=MetricSummary.of([log.max_state_norm for log in logs]),
            diverged=sum(log.diverged for log in logs),
            aborted=sum(log.aborted is not None for log in logs),
            p_opt=sum(flags) / len(flags) if flags else None,
            rts_mean=float(np.mean([log.rts_total for log in logs])),
        )


@dataclass(frozen=True)
class BenchSummary:
    """Per-controller summary keyed by controller name, in configured order."""
    plant: str
    runs: int
    horizon: int
    base_seed: int
    controllers: dict[str, ControllerSummary]

    @classmethod
    def from_logs(
        cls, plant: str, horizon: int, base_seed: int, logs: dict[str, list[RunLog]]
    ) -> BenchSummary:
        runs = max((len(v) for v in logs.values()), default=0)
        return cls(
            plant=plant,
            runs=runs,
            horizon=horizon,
            base_seed=base_seed,
            controllers={name: ControllerSummary.of(v) for name, v in logs.items()},
        )

    def as_dict(self) -> dict[str, Any]:
        return {
            "plant": self.plant,
            "runs": self.runs,
            "horizon": self.horizon,
            "base_seed": self.base_seed,
            "controllers": {name: asdict(s) for name, s in self.controllers.items()},
        }

    def table(self) -> str:
        """Plain-text table of the regret and max-norm columns."""
        head = f"{'controller':<10} {'avg regret':>12} {'top95':>12} {'top90':>12} " \
               f"{'avg max|x|':>12} {'top95':>12} {'top90':>12} {'div':>4}"
        lines = [head, "-" * len(head)]
        for name, s in self.controllers.items():
            lines.append(
                f"{name:<10} {s.regret.average:>12.4g} {s.regret.top95:>12.4g} {s.regret.top90:>12.4g} "
                f"{s.max_state_norm.average:>12.4g} {s.max_state_norm.top95:>12.4g} "
                f"{s.max_state_norm.top90:>12.4g} {s.diverged:>4d}"
            )
        return "\n".join(lines)
