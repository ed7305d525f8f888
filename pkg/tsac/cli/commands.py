"""One handler per subcommand. Each returns the process exit code."""

from __future__ import annotations

import argparse
import json
import logging
from datetime import timedelta
from pathlib import Path

import numpy as np

from tsac.core.agents.registry import build_controller
from tsac.core.bench.montecarlo import monte_carlo_p_opt
from tsac.core.bench.output import (dump_json, read_regret_curve,
                                    step_dicts, write_json, write_steps_csv)
from tsac.core.bench.runner import bench
from tsac.core.bench.slope import fit_regret_slope
from tsac.core.cache import CacheManager
from tsac.core.config import Configuration
from tsac.core.control.linalg import spectral_norm, spectral_radius
from tsac.core.control.riccati import closed_loop, dare_defect, solve_dare
from tsac.core.control.stability import membership_in_S
from tsac.core.control.theory import theory_report
from tsac.core.errors import ConfigError, InsufficientData
from tsac.core.sim.episode import run_episode
from tsac.core.sim.plant import PlantConfig, derive_seed, inline_plant

logger = logging.getLogger(__name__)


def _matrix(text: str, name: str) -> list:
    try:
        value = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"not a nested array: {e}", field=name) from e
    if not isinstance(value, list):
        raise ConfigError("expected row-major nested arrays", field=name)
    return value


def select_plant(args: argparse.Namespace, config: Configuration, seed: int) -> PlantConfig:
    """Plant from --a/--b when given, otherwise from the configuration."""
    a, b = getattr(args, "matrix_a", None), getattr(args, "matrix_b", None)
    if a is None and b is None:
        return config.plant(seed)
    if a is None or b is None:
        raise ConfigError("--a and --b must be given together", field="plant")
    try:
        return inline_plant(_matrix(a, "a"), _matrix(b, "b"), sigma_w=config.sigma_w, seed=seed)
    except ConfigError:
        raise
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e), field="plant") from e


def _fmt(m: np.ndarray) -> str:
    return np.array2string(np.asarray(m), precision=6, suppress_small=True, max_line_width=120)


def cmd_run(args: argparse.Namespace, config: Configuration) -> int:
    seed = config.seed
    plant = select_plant(args, config, derive_seed(seed, 0))
    horizon = args.horizon or config.horizon
    tsac_cfg = config.tsac_config(args.controller, plant, horizon)
    controller = build_controller(args.controller, tsac_cfg, plant.sys)
    log = run_episode(plant, controller, horizon, config.diagnostics, derive_seed(seed, 0, 1, 1))

    stem = config.out_dir / f"{args.controller}_{seed}"
    data = {"config": tsac_cfg.as_dict(), "plant": plant.as_dict(), **log.as_dict()}
    if config.output_format == "json":
        data["steps"] = step_dicts(log.records)
    else:
        write_steps_csv(stem.with_suffix(".csv"), log.records)
    write_json(stem.with_suffix(".json"), data)

    status = "diverged" if log.diverged else (f"aborted ({log.aborted})" if log.aborted else "ok")
    print(f"{args.controller}: {log.steps} steps, regret {log.regret:.6g}, "
          f"max |x| {log.max_state_norm:.6g}, {status}")
    return 0


def cmd_bench(args: argparse.Namespace, config: Configuration) -> int:
    cfg = config.bench_config(runs=args.runs, horizon=args.horizon, controllers=args.controllers)
    summary, _ = bench(cfg)
    print(summary.table())
    if cfg.out_dir is not None:
        print(f"\nArtifacts in {cfg.out_dir}")
    return 0


def cmd_dare(args: argparse.Namespace, config: Configuration) -> int:
    plant = select_plant(args, config, config.seed)
    sol = solve_dare(plant.sys, plant.cost, sigma_w=plant.sigma_w)
    rho = spectral_radius(closed_loop(plant.sys, sol.k))
    print(f"P =\n{_fmt(sol.p)}")
    print(f"K =\n{_fmt(sol.k)}")
    print(f"J = {sol.j:.10g}")
    print(f"rho(A+BK) = {rho:.10g}")
    print(f"residual = {dare_defect(plant.sys, plant.cost, sol.p):.3e} ({sol.iterations} iterations)")
    return 0


def cmd_check_system(args: argparse.Namespace, config: Configuration) -> int:
    plant = select_plant(args, config, config.seed)
    horizon = args.horizon or config.horizon
    tsac_cfg = config.tsac_config("tsac", plant, horizon)
    params = tsac_cfg.stabilizability
    member = membership_in_S(plant.sys, plant.cost, params, plant.sigma_w)

    print(f"membership: {member.reason.value}")
    print(f"|Theta|_F = {member.frobenius:.6g} (S = {params.s_bound:g})")
    if member.gain_norm is not None:
        print(f"|K| = {member.gain_norm:.6g} (kappa = {params.kappa:g})")
    if member.rho_cl is not None:
        print(f"rho(A+BK) = {member.rho_cl:.6g} (1 - gamma = {1.0 - params.gamma:g})")

    p_bound = params.p_bound(plant.cost)
    if member.solution is not None:
        print(f"|P| = {spectral_norm(member.solution.p):.6g} (D = {p_bound:.6g})")

    report = theory_report(plant.n, plant.d, params.kappa, params.gamma, params.s_bound, plant.sigma_w,
                           tsac_cfg.delta, tsac_cfg.mu, horizon, p_bound,
                           tau0=tsac_cfg.tau0, t_w=tsac_cfg.t_w)
    for key, value in report.as_dict().items():
        print(f"{key} = {value:.6g}")
    return 0


def cmd_optimism(args: argparse.Namespace, config: Configuration) -> int:
    plant = select_plant(args, config, config.seed)
    steps = args.steps or config.optimism_steps
    tsac_cfg = config.tsac_config("tsac", plant, max(steps, 1))
    result = monte_carlo_p_opt(plant, tsac_cfg, args.samples or config.optimism_samples, steps)
    print(f"p_opt = {result.p_opt:.4f} over {result.samples} samples "
          f"({result.exhausted} exhausted); Q(1) = {result.q1:.6f}")
    print(f"beta = {result.beta:.6g}, lambda_min(V) = {result.lambda_min_v:.6g}")
    return 0


def _curve_files(paths: list[Path]) -> list[Path]:
    files: list[Path] = []
    for path in paths:
        if path.is_dir():
            csvs = sorted(path.rglob("*.csv"))
            files.extend(csvs or sorted(p for p in path.rglob("*.json") if p.name != "summary.json"))
        else:
            files.append(path)
    return files


def cmd_slope(args: argparse.Namespace, config: Configuration) -> int:
    files = _curve_files(args.paths)
    if not files:
        raise InsufficientData("no step files found")
    curves = [read_regret_curve(path) for path in files]
    length = min(len(c) for c in curves)
    if any(len(c) != length for c in curves):
        logger.warning("Curves differ in length; truncating to %d steps", length)
    fit = fit_regret_slope(np.vstack([c[:length] for c in curves]),
                           t_min=args.t_min or config.slope_t_min, bootstrap=args.bootstrap,
                           seed=config.seed)
    print(dump_json(fit.as_dict()), end="")
    return 0


def cmd_cache(args: argparse.Namespace, config: Configuration) -> int:
    manager = CacheManager()
    if args.action == "clear":
        print(f"Removed {manager.clear()} cached runs from {manager.cache_dir}")
        return 0

    keys = sorted(manager.list_keys())
    if args.action == "prune":
        max_age = timedelta(days=args.max_age_days)
        removed = sum(manager.delete(key) for key in keys if manager.is_stale(key, max_age))
        print(f"Removed {removed} of {len(keys)} cached runs older than {args.max_age_days:g} days")
        return 0

    for key in keys:
        age = manager.get_age(key)
        days = "?" if age is None else f"{age.total_seconds() / 86400:.1f}d"
        print(f"{key}  {days}")
    print(f"{len(keys)} cached runs in {manager.cache_dir}")
    return 0


COMMANDS = {
    "run": cmd_run,
    "bench": cmd_bench,
    "dare": cmd_dare,
    "check-system": cmd_check_system,
    "optimism": cmd_optimism,
    "slope": cmd_slope,
    "cache": cmd_cache,
}
