import json

import pytest

import tsac
from tsac.cli.app import run
from tsac.core.args import parse_args


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.setattr("tsac.core.logs.LOG_FILE", tmp_path / "logs" / "tsac.log")
    monkeypatch.setattr("tsac.core.cache.DEFAULT_CACHE_DIR", tmp_path / "cache")


@pytest.fixture
def cfg(tmp_path):
    return str(tmp_path / "tsac.toml")


class TestArgs:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            parse_args(["-V"])
        assert info.value.code == 0
        assert tsac.__version__ in capsys.readouterr().out

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as info:
            parse_args(["bench", "--runs", "many"])
        assert info.value.code == 2

    def test_command_required(self):
        with pytest.raises(SystemExit):
            parse_args([])

    def test_global_options(self):
        args = parse_args(["--seed", "4", "--format", "json", "--plant", "scalar", "bench", "--runs", "3"])
        assert (args.seed, args.fmt, args.plant, args.command, args.runs) == (4, "json", "scalar", "bench", 3)


class TestCommands:
    def test_dare_boeing(self, cfg, capsys):
        assert run(["-c", cfg, "dare"]) == 0
        out = capsys.readouterr().out
        assert "P =" in out and "K =" in out
        assert "rho(A+BK)" in out

    def test_dare_not_stabilizable(self, cfg, capsys):
        assert run(["-c", cfg, "dare", "--a", "[[2.0]]", "--b", "[[0.0]]"]) == 4
        assert "error" in capsys.readouterr().err

    def test_check_system_reports_reason(self, cfg, capsys):
        assert run(["-c", cfg, "check-system", "--a", "[[2]]", "--b", "[[0]]"]) == 0
        assert "membership: NotStabilizable" in capsys.readouterr().out

    def test_check_system_member(self, cfg, capsys):
        assert run(["-c", cfg, "check-system", "--a", "[[0.9]]", "--b", "[[1.0]]"]) == 0
        out = capsys.readouterr().out
        assert "membership: Member" in out
        assert "tau0 = 10" in out

    def test_check_system_uses_configured_schedule(self, tmp_path, capsys):
        path = tmp_path / "schedule.toml"
        path.write_text("[tsac]\ntau0 = 7\nt_w = 33\n")
        assert run(["-c", str(path), "check-system", "--a", "[[0.9]]", "--b", "[[1.0]]"]) == 0
        out = capsys.readouterr().out
        assert "tau0 = 7\n" in out
        assert "t_w = 33\n" in out

    def test_optimism_reports_fraction(self, cfg, capsys):
        assert run(["-c", cfg, "--plant", "scalar", "optimism", "--samples", "20", "--steps", "30"]) == 0
        out = capsys.readouterr().out
        assert "p_opt = " in out
        assert "Q(1) = 0.158655" in out

    def test_bad_inline_matrix(self, cfg, capsys):
        assert run(["-c", cfg, "dare", "--a", "[[1", "--b", "[[1]]"]) == 2
        assert "field 'a'" in capsys.readouterr().err

    def test_half_inline_system(self, cfg):
        assert run(["-c", cfg, "dare", "--a", "[[1.0]]"]) == 2

    def test_bad_config_exits_2(self, tmp_path, capsys):
        path = tmp_path / "broken.toml"
        path.write_text("[global\n")
        assert run(["-c", str(path), "dare"]) == 2
        assert "line" in capsys.readouterr().err

    def test_run_writes_artifacts(self, cfg, tmp_path, capsys):
        out = tmp_path / "out"
        code = run(["-c", cfg, "--out-dir", str(out), "--plant", "scalar", "run",
                    "--controller", "oracle", "--horizon", "40"])
        assert code == 0
        assert "oracle: 40 steps" in capsys.readouterr().out
        lines = (out / "oracle_0.csv").read_text().splitlines()
        assert lines[0] == "t,cost,cum_regret,state_norm,policy_id,est_error,lambda_min_v,optimistic"
        assert len(lines) == 41
        assert json.loads((out / "oracle_0.json").read_text())["steps"] == 40

    def test_bench_then_slope(self, cfg, tmp_path, capsys):
        out = tmp_path / "bench"
        assert run(["-c", cfg, "--out-dir", str(out), "--plant", "scalar", "bench",
                    "--runs", "2", "--horizon", "30", "--controllers", "tsac", "oracle"]) == 0
        assert "avg regret" in capsys.readouterr().out
        assert (out / "summary.json").exists()
        assert len(list((out / "tsac").glob("*.csv"))) == 2

        assert run(["-c", cfg, "slope", str(out / "oracle")]) == 0
        fit = json.loads(capsys.readouterr().out)
        assert fit["runs"] == 2
        assert fit["t_max"] == 30

    def test_slope_insufficient_data(self, cfg, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text("t,cost,cum_regret,state_norm,policy_id,est_error,lambda_min_v,optimistic\n0,1,1,1,0,0,1,\n")
        assert run(["-c", cfg, "slope", str(path)]) == 2

    def test_unwritable_output(self, cfg, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        code = run(["-c", cfg, "--out-dir", str(blocker / "out"), "--plant", "scalar", "run",
                    "--controller", "zero", "--horizon", "5"])
        assert code == 3

    def test_cache_list_and_clear(self, cfg, tmp_path, capsys):
        cache_dir = tmp_path / "cache"
        cache_dir.mkdir()
        (cache_dir / "abc.msgpack").write_bytes(b"\x90")
        assert run(["-c", cfg, "cache", "list"]) == 0
        assert "1 cached runs" in capsys.readouterr().out
        assert run(["-c", cfg, "cache", "prune", "--max-age-days", "1"]) == 0
        assert "Removed 1 of 1" in capsys.readouterr().out
        assert run(["-c", cfg, "cache", "clear"]) == 0
        assert "Removed 0" in capsys.readouterr().out
