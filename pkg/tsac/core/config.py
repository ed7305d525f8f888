"""Configuration management for tsac using TOML."""

from __future__ import annotations

import copy
import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any

import tomlkit
from tomlkit import TOMLDocument
from tomlkit.exceptions import ParseError, TOMLKitError
from tomlkit.items import Table

from tsac.core.agents.base import RADIUS_MODES, UPDATE_RULES, TsacConfig
from tsac.core.agents.registry import CONTROLLERS
from tsac.core.bench.runner import FORMATS, BenchConfig, ControllerSpec
from tsac.core.errors import ConfigError, TsacError
from tsac.core.learning.optimism import GRADIENTS, PgdConfig
from tsac.core.sim.plant import (PLANTS, PlantConfig, boeing_plant,
                                 inline_plant, scalar_plant)

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path.home() / ".config" / "tsac" / "tsac.toml"
AUTO = "auto"

TSAC_KEYS = ("kappa", "gamma", "s_bound", "delta", "mu", "t_w", "tau0", "sigma_nu", "beta_scale", "radius",
             "t_w_scale", "t_w_schedule", "max_attempts", "scale_levels", "update_rule")
PGD_KEYS = ("step_scale", "iterations", "fd_step", "gradient")


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class Configuration:
    """Manages tsac configuration with TOML files."""

    def __init__(self, config_path: Path | None = None):
        """
        Initialize configuration.

        Args:
            config_path: Path to config file. Defaults to ~/.config/tsac/tsac.toml

        Raises:
            ConfigError: the file is not valid TOML.
        """
        self.config_path = config_path or DEFAULT_CONFIG_PATH
        self._config: dict[str, Any] = {}
        self._toml_doc: TOMLDocument | None = None
        self._load_config()

    @staticmethod
    def _get_default_config() -> dict[str, Any]:
        """Get the default configuration."""
        return {
            "global": {
                "seed": 0,
                "threads": 1,
                "out_dir": "out",
                "format": "csv",
                "log_level": "INFO",
                "cache": False,
            },
            "plant": {
                "name": "boeing747",
                "sigma_w": 1.0,
                "x0": [],
                "a": [[0.9]],
                "b": [[1.0]],
                "q": [[1.0]],
                "r": [[1.0]],
            },
            "bench": {
                "runs": 200,
                "horizon": 200,
                "paired_seeds": True,
                "controllers": ["tsac", "stabl", "ofulq", "ts-lqr"],
                "diagnostics": True,
            },
            "tsac": {
                "kappa": 10.0,
                "gamma": 0.01,
                "s_bound": 15.0,
                "delta": 0.05,
                "mu": 1.0,
                "t_w": 50,
                "tau0": 10,
                "sigma_nu": AUTO,
                "beta_scale": 1.0,
                "radius": "oracle",
                "t_w_scale": 0.5,
                "t_w_schedule": "sqrt",
                "max_attempts": 1000,
                "scale_levels": 6,
                "update_rule": "fixed",
            },
            "pgd": {
                "step_scale": 0.05,
                "iterations": 50,
                "fd_step": 1e-5,
                "gradient": "analytic",
            },
            "controllers": {
                "ofulq": {"update_rule": "doubling"},
            },
            "slope": {
                "t_min": AUTO,
            },
            "optimism": {
                "samples": 1000,
                "steps": 200,
            },
        }

    def _create_default_config(self) -> None:
        """Create default configuration file with comments."""
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        doc: TOMLDocument = tomlkit.document()

        doc.add(tomlkit.comment("tsac configuration file"))
        doc.add(tomlkit.comment("This file was automatically generated"))
        doc.add(tomlkit.comment('"auto" selects the formula default where a key allows it'))
        doc.add(tomlkit.nl())

        global_section: Table = tomlkit.table()
        global_section.add(tomlkit.comment("Base seed for every run; identical seeds reproduce identical output"))
        global_section.add("seed", 0)
        global_section.add(tomlkit.comment("Worker processes for bench (1 runs serially)"))
        global_section.add("threads", 1)
        global_section.add(tomlkit.comment("Directory for CSV/JSON artifacts"))
        global_section.add("out_dir", "out")
        global_section.add(tomlkit.comment("Per-step output format. Options: csv, json"))
        global_section.add("format", "csv")
        global_section.add(tomlkit.comment("Options: DEBUG, INFO, WARNING, ERROR"))
        global_section.add("log_level", "INFO")
        global_section.add(tomlkit.comment("Reuse finished episodes from ~/.cache/tsac/runs"))
        global_section.add("cache", False)
        doc.add("global", global_section)

        plant_section: Table = tomlkit.table()
        plant_section.add(tomlkit.comment("Options: boeing747, scalar (a=0.9, b=1, q=r=1), inline"))
        plant_section.add("name", "boeing747")
        plant_section.add(tomlkit.comment("Process noise standard deviation"))
        plant_section.add("sigma_w", 1.0)
        plant_section.add(tomlkit.comment("Initial state; empty means the origin"))
        plant_section.add("x0", tomlkit.array())
        plant_section.add(tomlkit.nl())
        plant_section.add(tomlkit.comment("Row-major matrices, read only when name = \"inline\""))
        plant_section.add("a", [[0.9]])
        plant_section.add("b", [[1.0]])
        plant_section.add("q", [[1.0]])
        plant_section.add("r", [[1.0]])
        doc.add("plant", plant_section)

        bench_section: Table = tomlkit.table()
        bench_section.add("runs", 200)
        bench_section.add("horizon", 200)
        bench_section.add(tomlkit.comment("Same plant noise for every controller within a run"))
        bench_section.add("paired_seeds", True)
        bench_section.add(tomlkit.comment(f"Options: {', '.join(CONTROLLERS)}"))
        bench_section.add("controllers", ["tsac", "stabl", "ofulq", "ts-lqr"])
        bench_section.add(tomlkit.comment("Record estimation error, lambda_min(V) and optimism flags"))
        bench_section.add("diagnostics", True)
        doc.add("bench", bench_section)

        tsac_section: Table = tomlkit.table()
        tsac_section.add(tomlkit.comment("Admissible set: |Theta|_F <= s_bound, |K| <= kappa, rho(A+BK) <= 1 - gamma"))
        tsac_section.add("kappa", 10.0)
        tsac_section.add("gamma", 0.01)
        tsac_section.add("s_bound", 15.0)
        tsac_section.add("delta", 0.05)
        tsac_section.add(tomlkit.comment("Regularizer; auto = (1 + kappa^2) X_s^2"))
        tsac_section.add("mu", 1.0)
        tsac_section.add(tomlkit.comment("Exploration steps; auto follows t_w_schedule scaled by t_w_scale"))
        tsac_section.add("t_w", 50)
        tsac_section.add(tomlkit.comment("Policy-holding period; auto = ceil(2/gamma * ln(2 kappa sqrt 2))"))
        tsac_section.add("tau0", 10)
        tsac_section.add(tomlkit.comment("Exploration noise std; auto = sqrt(2) kappa sigma_w"))
        tsac_section.add("sigma_nu", AUTO)
        tsac_section.add(tomlkit.comment("Multiplier on the confidence radius"))
        tsac_section.add("beta_scale", 1.0)
        tsac_section.add(tomlkit.comment("theory: beta_t formula, oracle: actual weighted estimation error"))
        tsac_section.add("radius", "oracle")
        tsac_section.add("t_w_scale", 0.5)
        tsac_section.add(tomlkit.comment("Options: sqrt, log"))
        tsac_section.add("t_w_schedule", "sqrt")
        tsac_section.add(tomlkit.comment("Rejection draws per scale level and number of halvings"))
        tsac_section.add("max_attempts", 1000)
        tsac_section.add("scale_levels", 6)
        tsac_section.add(tomlkit.comment("fixed: every tau0 steps, doubling: also wait for det V to double"))
        tsac_section.add("update_rule", "fixed")
        doc.add("tsac", tsac_section)

        pgd_section: Table = tomlkit.table()
        pgd_section.add(tomlkit.comment("Optimistic search for ofulq and stabl"))
        pgd_section.add(tomlkit.comment("Each step moves step_scale * beta in whitened coordinates"))
        pgd_section.add("step_scale", 0.05)
        pgd_section.add("iterations", 50)
        pgd_section.add("fd_step", 1e-5)
        pgd_section.add(tomlkit.comment("Options: analytic, finite_difference"))
        pgd_section.add("gradient", "analytic")
        doc.add("pgd", pgd_section)

        controllers_section: Table = tomlkit.table(is_super_table=True)
        ofulq: Table = tomlkit.table()
        ofulq.add(tomlkit.comment("Per-controller overrides of any [tsac] or [pgd] key"))
        ofulq.add("update_rule", "doubling")
        controllers_section.add("ofulq", ofulq)
        doc.add("controllers", controllers_section)

        slope_section: Table = tomlkit.table()
        slope_section.add(tomlkit.comment("First step of the log-log fit; auto = horizon / 10"))
        slope_section.add("t_min", AUTO)
        doc.add("slope", slope_section)

        optimism_section: Table = tomlkit.table()
        optimism_section.add(tomlkit.comment("Thompson samples drawn, after this many exploration steps"))
        optimism_section.add("samples", 1000)
        optimism_section.add("steps", 200)
        doc.add("optimism", optimism_section)

        with open(self.config_path, "w", encoding="utf-8") as f:
            f.write(tomlkit.dumps(doc))
        logger.info("Created default configuration at %s", self.config_path)

    def _load_config(self) -> None:
        """Load configuration from file or create default."""
        if not self.config_path.exists():
            try:
                self._create_default_config()
            except OSError as e:
                logger.warning("Cannot create %s: %s; using defaults", self.config_path, e)
            self._config = self._get_default_config()
            return

        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                self._toml_doc = tomlkit.parse(f.read())
        except ParseError as e:
            raise ConfigError(f"{self.config_path}: {e}", line=e.line) from e
        except (TOMLKitError, OSError) as e:
            raise ConfigError(f"{self.config_path}: {e}") from e

        self._config = self._toml_doc.unwrap()
        self._fill_defaults()

    def _fill_defaults(self) -> None:
        """Fill missing sections and options from defaults, in memory only."""
        for section, options in self._get_default_config().items():
            current = self._config.setdefault(section, {})
            if not isinstance(current, dict):
                raise ConfigError("expected a table", field=section)
            for option, default_value in options.items():
                current.setdefault(option, copy.deepcopy(default_value))

    def _get_nested_value(self, keys: list[str], default: Any = None) -> Any:
        current: Any = self._config
        for key in keys:
            if isinstance(current, dict) and key in current:
                current = current[key]
            else:
                return default
        return current

    def _set_nested_value(self, keys: list[str], value: Any) -> None:
        current = self._config
        for key in keys[:-1]:
            if key not in current or not isinstance(current[key], dict):
                current[key] = {}
            current = current[key]
        current[keys[-1]] = value

    def get(self, key: str, default: Any = None) -> Any:
        return self._get_nested_value(key.split("."), default)

    def override(self, key: str, value: Any) -> None:
        """Set a dotted option in memory (command-line flags); None is ignored."""
        if value is not None:
            self._set_nested_value(key.split("."), value)

    def _require(
        self,
        key: str,
        kind: type,
        check: Callable[[Any], bool] | None = None,
        expect: str = "",
        allow_auto: bool = False,
        value: Any = None,
    ) -> Any:
        """Typed, validated lookup. Returns None for "auto" when allowed."""
        if value is None:
            value = self.get(key)
        if allow_auto and value == AUTO:
            return None
        if kind is float and _is_number(value):
            value = float(value)
        elif kind is int and isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, kind) or (kind is not bool and isinstance(value, bool)):
            also = ' or "auto"' if allow_auto else ""
            raise ConfigError(f"expected {kind.__name__}{also}, got {value!r}", field=key)
        if check is not None and not check(value):
            raise ConfigError(f"expected {expect}, got {value!r}", field=key)
        return value

    # Global settings
    @property
    def seed(self) -> int:
        return self._require("global.seed", int, lambda v: v >= 0, "a non-negative integer")

    @property
    def threads(self) -> int:
        return self._require("global.threads", int, lambda v: v >= 1, "at least 1")

    @property
    def out_dir(self) -> Path:
        return Path(self._require("global.out_dir", str)).expanduser()

    @property
    def output_format(self) -> str:
        return self._require("global.format", str, lambda v: v in FORMATS, f"one of {FORMATS}")

    @property
    def log_level(self) -> str:
        return self._require("global.log_level", str).upper()

    @property
    def cache(self) -> bool:
        return self._require("global.cache", bool)

    # Plant
    @property
    def plant_name(self) -> str:
        return self._require("plant.name", str, lambda v: v in PLANTS, f"one of {PLANTS}")

    @property
    def sigma_w(self) -> float:
        return self._require("plant.sigma_w", float, lambda v: v > 0.0, "a positive number")

    def plant(self, seed: int = 0) -> PlantConfig:
        """
        Build the configured plant.

        Raises:
            ConfigError: an inline matrix is malformed or the system is invalid.
        """
        name = self.plant_name
        x0 = self.get("plant.x0") or None
        try:
            if name == "boeing747":
                return boeing_plant(seed, self.sigma_w, x0)
            if name == "scalar":
                return scalar_plant(sigma_w=self.sigma_w, seed=seed, x0=float(x0[0]) if x0 else 0.0)
            return inline_plant(self.get("plant.a"), self.get("plant.b"), self.get("plant.q"),
                                self.get("plant.r"), self.sigma_w, seed, x0)
        except TsacError as e:
            raise ConfigError(str(e), field="plant") from e
        except (TypeError, ValueError) as e:
            raise ConfigError(f"malformed matrix: {e}", field="plant") from e

    # Bench
    @property
    def runs(self) -> int:
        return self._require("bench.runs", int, lambda v: v >= 1, "at least 1")

    @property
    def horizon(self) -> int:
        return self._require("bench.horizon", int, lambda v: v >= 1, "at least 1")

    @property
    def paired_seeds(self) -> bool:
        return self._require("bench.paired_seeds", bool)

    @property
    def diagnostics(self) -> bool:
        return self._require("bench.diagnostics", bool)

    @property
    def controller_names(self) -> list[str]:
        names = self._require("bench.controllers", list, bool, "a non-empty list")
        for name in names:
            if name not in CONTROLLERS:
                raise ConfigError(f"unknown controller '{name}' (choose from {', '.join(CONTROLLERS)})",
                                  field="bench.controllers")
        return list(names)

    # Slope and optimism
    @property
    def slope_t_min(self) -> int | None:
        return self._require("slope.t_min", int, lambda v: v >= 1, "at least 1", allow_auto=True)

    @property
    def optimism_samples(self) -> int:
        return self._require("optimism.samples", int, lambda v: v >= 1, "at least 1")

    @property
    def optimism_steps(self) -> int:
        return self._require("optimism.steps", int, lambda v: v >= 1, "at least 1")

    # Controllers
    def _controller_options(self, name: str) -> dict[str, Any]:
        options = dict(self.get("tsac", {}))
        options.update(self.get("pgd", {}))
        override = self.get(f"controllers.{name}", {})
        if not isinstance(override, dict):
            raise ConfigError("expected a table", field=f"controllers.{name}")
        for key in override:
            if key not in TSAC_KEYS and key not in PGD_KEYS:
                raise ConfigError(f"unknown option '{key}'", field=f"controllers.{name}")
        options.update(override)
        return options

    def tsac_config(self, name: str, plant: PlantConfig, horizon: int | None = None) -> TsacConfig:
        """
        Hyperparameters for one controller: [tsac] and [pgd] merged with
        [controllers.<name>].

        Raises:
            ConfigError: a value has the wrong type or range.
        """
        horizon = self.horizon if horizon is None else horizon
        opts = self._controller_options(name)
        override = self.get(f"controllers.{name}", {})

        def field_of(key: str) -> str:
            if key in override:
                return f"controllers.{name}.{key}"
            return f"pgd.{key}" if key in PGD_KEYS else f"tsac.{key}"

        def num(key: str, check: Callable[[Any], bool] = lambda v: v > 0.0, expect: str = "a positive number",
                kind: type = float, allow_auto: bool = False) -> Any:
            return self._require(field_of(key), kind, check, expect, allow_auto, value=opts.get(key))

        try:
            pgd = PgdConfig(
                step_scale=num("step_scale", lambda v: v >= 0.0, "a non-negative number"),
                iterations=num("iterations", lambda v: v >= 0, "a non-negative integer", int),
                fd_step=num("fd_step"),
                gradient=self._require(field_of("gradient"), str, lambda v: v in GRADIENTS, f"one of {GRADIENTS}",
                                       value=opts.get("gradient")),
            )
            return TsacConfig.resolve(
                n=plant.n,
                d=plant.d,
                sigma_w=plant.sigma_w,
                cost=plant.cost,
                horizon=horizon,
                kappa=num("kappa", lambda v: v >= 1.0, "at least 1"),
                gamma=num("gamma", lambda v: 0.0 < v <= 1.0, "a number in (0, 1]"),
                s_bound=num("s_bound"),
                delta=num("delta", lambda v: 0.0 < v < 1.0, "a number in (0, 1)"),
                t_w=num("t_w", lambda v: v >= 0, "a non-negative integer", int, True),
                tau0=num("tau0", lambda v: v >= 1, "at least 1", int, True),
                mu=num("mu", allow_auto=True),
                sigma_nu=num("sigma_nu", allow_auto=True),
                t_w_scale=num("t_w_scale"),
                t_w_schedule=self._require(field_of("t_w_schedule"), str, lambda v: v in ("sqrt", "log"),
                                           "sqrt or log", value=opts.get("t_w_schedule")),
                beta_scale=num("beta_scale", lambda v: v >= 0.0, "a non-negative number"),
                radius=self._require(field_of("radius"), str, lambda v: v in RADIUS_MODES, f"one of {RADIUS_MODES}",
                                     value=opts.get("radius")),
                max_attempts=num("max_attempts", lambda v: v >= 1, "at least 1", int),
                scale_levels=num("scale_levels", lambda v: v >= 0, "a non-negative integer", int),
                update_rule=self._require(field_of("update_rule"), str, lambda v: v in UPDATE_RULES,
                                          f"one of {UPDATE_RULES}", value=opts.get("update_rule")),
                pgd=pgd,
            )
        except ConfigError:
            raise
        except TsacError as e:
            raise ConfigError(str(e), field=f"controllers.{name}" if override else "tsac") from e

    def bench_config(
        self,
        runs: int | None = None,
        horizon: int | None = None,
        seed: int | None = None,
        out_dir: Path | None = None,
        threads: int | None = None,
        fmt: str | None = None,
        controllers: list[str] | None = None,
        write: bool = True,
    ) -> BenchConfig:
        """BenchConfig from the file, with command-line overrides applied."""
        horizon = self.horizon if horizon is None else horizon
        plant = self.plant(self.seed if seed is None else seed)
        names = controllers or self.controller_names
        for name in names:
            if name not in CONTROLLERS:
                raise ConfigError(f"unknown controller '{name}'", field="bench.controllers")
        return BenchConfig(
            plant=plant,
            controllers=tuple(ControllerSpec(name, self.tsac_config(name, plant, horizon)) for name in names),
            runs=self.runs if runs is None else runs,
            horizon=horizon,
            base_seed=self.seed if seed is None else seed,
            paired_seeds=self.paired_seeds,
            diagnostics=self.diagnostics,
            out_dir=(out_dir or self.out_dir) if write else None,
            threads=self.threads if threads is None else threads,
            fmt=fmt or self.output_format,
            use_cache=self.cache,
        )

    def as_dict(self) -> dict[str, Any]:
        """Plain-data copy of the effective configuration."""
        return copy.deepcopy(self._config)

    def reload(self) -> None:
        self._load_config()


# Global configuration instance
_config_instance: Configuration | None = None


def get_config(config_path: Path | None = None) -> Configuration:
    global _config_instance
    if _config_instance is None or (config_path is not None and _config_instance.config_path != config_path):
        _config_instance = Configuration(config_path)
    return _config_instance
