import pytest

from tsac.core.config import Configuration
from tsac.core.control.theory import default_tau0
from tsac.core.errors import ConfigError


def write(tmp_path, text):
    path = tmp_path / "tsac.toml"
    path.write_text(text)
    return Configuration(path)


class TestDefaults:
    def test_creates_commented_file(self, tmp_path):
        path = tmp_path / "sub" / "tsac.toml"
        config = Configuration(path)
        text = path.read_text()
        assert "# tsac configuration file" in text
        assert "[controllers.ofulq]" in text
        assert config.seed == 0
        assert config.controller_names == ["tsac", "stabl", "ofulq", "ts-lqr"]

    def test_generated_file_reads_back(self, tmp_path):
        path = tmp_path / "tsac.toml"
        Configuration(path)
        again = Configuration(path)
        assert again.as_dict() == Configuration._get_default_config()

    def test_missing_keys_are_filled(self, tmp_path):
        config = write(tmp_path, "[global]\nseed = 5\n")
        assert config.seed == 5
        assert config.runs == 200
        assert config.get("pgd.iterations") == 50

    def test_shipped_controller_configs(self, tmp_path):
        config = write(tmp_path, "")
        plant = config.plant()
        tsac = config.tsac_config("tsac", plant)
        assert (tsac.kappa, tsac.gamma, tsac.s_bound, tsac.t_w, tsac.tau0) == (10.0, 0.01, 15.0, 50, 10)
        assert tsac.sigma_nu == pytest.approx(2 ** 0.5 * 10.0)
        assert config.tsac_config("ofulq", plant).update_rule == "doubling"


class TestErrors:
    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "tsac.toml"
        path.write_text("[global]\nseed = 1\nthreads = = 2\n")
        with pytest.raises(ConfigError) as info:
            Configuration(path)
        assert info.value.line == 3
        assert info.value.exit_code == 2

    def test_wrong_type_names_field(self, tmp_path):
        config = write(tmp_path, '[tsac]\nkappa = "big"\n')
        with pytest.raises(ConfigError) as info:
            config.tsac_config("tsac", config.plant())
        assert info.value.field == "tsac.kappa"

    def test_out_of_range(self, tmp_path):
        config = write(tmp_path, "[pgd]\niterations = -1\n")
        with pytest.raises(ConfigError) as info:
            config.tsac_config("stabl", config.plant())
        assert info.value.field == "pgd.iterations"

    def test_controller_override_field(self, tmp_path):
        config = write(tmp_path, "[controllers.tsac]\ngamma = 2.0\n")
        with pytest.raises(ConfigError) as info:
            config.tsac_config("tsac", config.plant())
        assert info.value.field == "controllers.tsac.gamma"

    def test_unknown_controller_option(self, tmp_path):
        config = write(tmp_path, "[controllers.tsac]\nwarp = 1\n")
        with pytest.raises(ConfigError):
            config.tsac_config("tsac", config.plant())

    def test_unknown_controller_name(self, tmp_path):
        config = write(tmp_path, '[bench]\ncontrollers = ["tsac", "lqg"]\n')
        with pytest.raises(ConfigError) as info:
            config.controller_names
        assert info.value.field == "bench.controllers"

    def test_bool_is_not_int(self, tmp_path):
        config = write(tmp_path, "[global]\nseed = true\n")
        with pytest.raises(ConfigError):
            config.seed

    def test_malformed_inline_plant(self, tmp_path):
        config = write(tmp_path, '[plant]\nname = "inline"\na = [[1.0, 2.0]]\nb = [[1.0]]\n')
        with pytest.raises(ConfigError) as info:
            config.plant()
        assert info.value.field == "plant"


class TestValues:
    def test_auto_values(self, tmp_path):
        config = write(tmp_path, '[tsac]\ntau0 = "auto"\nt_w = "auto"\nmu = "auto"\n')
        cfg = config.tsac_config("tsac", config.plant(), horizon=1000)
        assert cfg.tau0 == default_tau0(10.0, 0.01)
        assert 0 < cfg.t_w <= 1000
        assert cfg.mu > 1.0
        assert config.slope_t_min is None

    def test_t_w_capped_at_horizon(self, tmp_path):
        config = write(tmp_path, "")
        assert config.tsac_config("tsac", config.plant(), horizon=20).t_w == 20

    def test_inline_plant(self, tmp_path):
        config = write(tmp_path, '[plant]\nname = "inline"\na = [[0.5, 0.1], [0.0, 0.7]]\nb = [[1.0], [0.5]]\n')
        plant = config.plant(seed=3)
        assert (plant.n, plant.d, plant.seed) == (2, 1, 3)

    def test_overrides(self, tmp_path):
        config = write(tmp_path, "")
        config.override("bench.runs", 3)
        config.override("global.seed", None)
        assert config.runs == 3
        assert config.seed == 0

    def test_bench_config(self, tmp_path):
        config = write(tmp_path, '[global]\nout_dir = "results"\n')
        cfg = config.bench_config(runs=2, horizon=30, controllers=["tsac", "oracle"], write=False)
        assert cfg.runs == 2
        assert [s.name for s in cfg.controllers] == ["tsac", "oracle"]
        assert cfg.out_dir is None
        assert config.bench_config(runs=1).out_dir.name == "results"
