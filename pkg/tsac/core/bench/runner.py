"""
Multi-run benchmark orchestration.

Each (run, controller) pair is an independent task; tasks run in a process
pool when threads > 1 and results are kept in run order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from tsac.core.agents.base import TsacConfig
from tsac.core.agents.registry import build_controller
from tsac.core.bench.output import step_dicts, write_json, write_steps_csv
from tsac.core.bench.summary import BenchSummary
from tsac.core.cache import CacheManager, cache_key
from tsac.core.errors import ConfigError
from tsac.core.sim.episode import RunLog, run_episode
from tsac.core.sim.plant import PlantConfig, derive_seed

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ControllerSpec:
    name: str
    config: TsacConfig


@dataclass(frozen=True, eq=False)
class BenchConfig:
    """A full benchmark protocol: which plant, which controllers, how many runs."""
    plant: PlantConfig
    controllers: tuple[ControllerSpec, ...]
    runs: int = 200
    horizon: int = 200
    base_seed: int = 0
    paired_seeds: bool = True
    diagnostics: bool = True
    out_dir: Path | None = None
    threads: int = 1
    fmt: str = "csv"
    use_cache: bool = False
    cache_dir: Path | None = None

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ConfigError(f"must be >= 1, got {self.runs}", field="bench.runs")
        if self.horizon < 1:
            raise ConfigError(f"must be >= 1, got {self.horizon}", field="bench.horizon")
        if not self.controllers:
            raise ConfigError("controller list is empty", field="bench.controllers")
        if self.threads < 1:
            raise ConfigError(f"must be >= 1, got {self.threads}", field="global.threads")
        if self.fmt not in FORMATS:
            raise ConfigError(f"must be one of {FORMATS}, got '{self.fmt}'", field="global.format")

    def seeds(self, run: int, controller_index: int) -> tuple[int, int]:
        """(plant seed, controller seed) for one task."""
        plant_key = (run,) if self.paired_seeds else (run, controller_index + 1)
        return (derive_seed(self.base_seed, *plant_key),
                derive_seed(self.base_seed, run, controller_index + 1, 1))

    def as_dict(self) -> dict[str, Any]:
        return {
            "plant": self.plant.as_dict(),
            "controllers": {s.name: s.config.as_dict() for s in self.controllers},
            "runs": self.runs,
            "horizon": self.horizon,
            "base_seed": self.base_seed,
            "paired_seeds": self.paired_seeds,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True, eq=False)
class RunTask:
    run: int
    spec: ControllerSpec
    plant: PlantConfig
    controller_seed: int
    horizon: int
    diagnostics: bool

    def key(self) -> str:
        return cache_key({
            "plant": self.plant.as_dict(),
            "controller": self.spec.name,
            "config": self.spec.config.as_dict(),
            "controller_seed": self.controller_seed,
            "horizon": self.horizon,
            "diagnostics": self.diagnostics,
        })


def execute(task: RunTask) -> RunLog:
    controller = build_controller(task.spec.name, task.spec.config, task.plant.sys)
    return run_episode(task.plant, controller, task.horizon, task.diagnostics, task.controller_seed)


def _tasks(cfg: BenchConfig) -> list[RunTask]:
    tasks = []
    for run in range(cfg.runs):
        for index, spec in enumerate(cfg.controllers):
            plant_seed, controller_seed = cfg.seeds(run, index)
            tasks.append(RunTask(run, spec, cfg.plant.with_seed(plant_seed), controller_seed,
                                 cfg.horizon, cfg.diagnostics))
    return tasks


def run_tasks(tasks: list[RunTask], threads: int = 1, cache: CacheManager | None = None) -> list[RunLog]:
    """Execute tasks, reusing cached results, and return logs in task order."""
    results: list[RunLog | None] = [None] * len(tasks)
    pending: list[int] = []
    for i, task in enumerate(tasks):
        hit = cache.get(task.key()) if cache is not None else None
        if hit is not None:
            results[i] = RunLog.unpack(hit)
        else:
            pending.append(i)

    if pending:
        logger.info("Running %d episodes (%d cached) on %d worker(s)",
                    len(pending), len(tasks) - len(pending), threads)
        todo = [tasks[i] for i in pending]
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                fresh = list(pool.map(execute, todo))
        else:
            fresh = [execute(task) for task in todo]

        for i, log in zip(pending, fresh):
            results[i] = log
            if cache is not None:
                cache.set(tasks[i].key(), log.pack())

    return [log for log in results if log is not None]


def write_run(out_dir: Path, log: RunLog, run: int, spec: ControllerSpec, plant: PlantConfig, fmt: str) -> None:
    stem = out_dir / spec.name / f"run_{run:04d}"
    data: dict[str, Any] = {
        "run": run,
        "config": spec.config.as_dict(),
        "plant": plant.as_dict(),
        **log.as_dict(),
    }
    if fmt == "json":
        data["steps"] = step_dicts(log.records)
    else:
        write_steps_csv(stem.with_suffix(".csv"), log.records)
    write_json(stem.with_suffix(".json"), data)


def bench(cfg: BenchConfig, cache: CacheManager | None = None) -> tuple[BenchSummary, dict[str, list[RunLog]]]:
    """
    Run every controller on every seed, write artifacts when out_dir is set,
    and aggregate.

    Raises:
        OutputError: an artifact could not be written.
    """
    if cache is None and cfg.use_cache:
        cache = CacheManager(cfg.cache_dir)

    tasks = _tasks(cfg)
    logs = run_tasks(tasks, cfg.threads, cache)

    by_controller: dict[str, list[RunLog]] = {spec.name: [] for spec in cfg.controllers}
    for task, log in zip(tasks, logs):
        by_controller[task.spec.name].append(log)
        if cfg.out_dir is not None:
            write_run(cfg.out_dir, log, task.run, task.spec, task.plant, cfg.fmt)

    summary = BenchSummary.from_logs(cfg.plant.name, cfg.horizon, cfg.base_seed, by_controller)
    if cfg.out_dir is not None:
        write_json(cfg.out_dir / "summary.json", summary.as_dict())

    for name, s in summary.controllers.items():
        logger.info("%s: average regret %.4g, diverged %d/%d", name, s.regret.average, s.diverged, s.runs)
    return summary, by_controller
