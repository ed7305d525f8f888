import json

import pytest
from conftest import make_config

from tsac.core.bench.output import read_json
from tsac.core.bench.runner import BenchConfig, ControllerSpec, RunTask, bench
from tsac.core.cache import CacheManager
from tsac.core.errors import ConfigError
from tsac.core.sim.plant import derive_seed, scalar_plant


def bench_config(tmp_path=None, runs=2, horizon=50, names=("tsac", "stabl"), **kwargs):
    plant = scalar_plant(seed=0)
    specs = tuple(ControllerSpec(name, make_config(plant, horizon=horizon)) for name in names)
    return BenchConfig(plant=plant, controllers=specs, runs=runs, horizon=horizon, base_seed=7,
                       out_dir=tmp_path, **kwargs)


class TestBenchConfig:
    @pytest.mark.parametrize("kwargs,field", [
        (dict(runs=0), "bench.runs"),
        (dict(horizon=0), "bench.horizon"),
        (dict(threads=0), "global.threads"),
        (dict(fmt="xml"), "global.format"),
    ])
    def test_validation(self, kwargs, field):
        with pytest.raises(ConfigError) as info:
            bench_config(**kwargs)
        assert info.value.field == field

    def test_empty_controllers(self):
        with pytest.raises(ConfigError):
            BenchConfig(plant=scalar_plant(), controllers=())

    def test_paired_seeds_share_plant_noise(self):
        paired = bench_config()
        assert paired.seeds(3, 0)[0] == paired.seeds(3, 1)[0] == derive_seed(7, 3)
        assert paired.seeds(3, 0)[1] != paired.seeds(3, 1)[1]
        unpaired = bench_config(paired_seeds=False)
        assert unpaired.seeds(3, 0)[0] != unpaired.seeds(3, 1)[0]


class TestBench:
    def test_artifacts(self, tmp_path):
        summary, logs = bench(bench_config(tmp_path))
        for name in ("tsac", "stabl"):
            assert sorted(p.name for p in (tmp_path / name).iterdir()) == [
                "run_0000.csv", "run_0000.json", "run_0001.csv", "run_0001.json"]
            assert len(logs[name]) == 2
            lines = (tmp_path / name / "run_0000.csv").read_text().splitlines()
            assert len(lines) == 51
        data = read_json(tmp_path / "summary.json")
        assert list(data["controllers"]) == ["tsac", "stabl"]
        assert data["runs"] == 2
        assert summary.controllers["tsac"].runs == 2

    def test_json_format_embeds_steps(self, tmp_path):
        bench(bench_config(tmp_path, runs=1, names=("tsac",), fmt="json"))
        data = read_json(tmp_path / "tsac" / "run_0000.json")
        assert len(data["steps"]) == 50
        assert not list((tmp_path / "tsac").glob("*.csv"))

    def test_deterministic_summary(self, tmp_path):
        bench(bench_config(tmp_path / "a"))
        bench(bench_config(tmp_path / "b"))
        first = (tmp_path / "a" / "summary.json").read_text()
        assert first == (tmp_path / "b" / "summary.json").read_text()
        assert (tmp_path / "a" / "tsac" / "run_0001.csv").read_bytes() == \
            (tmp_path / "b" / "tsac" / "run_0001.csv").read_bytes()

    def test_no_output_dir(self):
        summary, logs = bench(bench_config(None, runs=1, horizon=20, names=("oracle",)))
        assert summary.controllers["oracle"].diverged == 0
        assert logs["oracle"][0].steps == 20

    def test_cache_hits_reproduce_logs(self, tmp_path):
        cache = CacheManager(tmp_path / "cache")
        cfg = bench_config(None, runs=1, horizon=30)
        first, _ = bench(cfg, cache)
        assert len(cache.list_keys()) == 2
        second, _ = bench(cfg, cache)
        assert json.dumps(first.as_dict(), sort_keys=True) == json.dumps(second.as_dict(), sort_keys=True)

    def test_task_key_depends_on_seed(self):
        cfg = bench_config()
        spec = cfg.controllers[0]
        a = RunTask(0, spec, cfg.plant, 1, 50, True)
        b = RunTask(0, spec, cfg.plant, 2, 50, True)
        assert a.key() != b.key()
        assert a.key() == RunTask(0, spec, cfg.plant, 1, 50, True).key()
