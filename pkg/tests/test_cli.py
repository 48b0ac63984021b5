import json

import pytest

from pgopt.cli import ConfigError, config_from_dict, load_config, main
from pgopt.experiments import EXPERIMENTS

FAST = """
experiment = "simple-misspec"
methods = ["eto", "pgb"]
n_list = [60]
trials = 2
seed = 11
test_size = 300

[train]
epochs = 3
val_size = 40
h_grid = [0.1]
"""


@pytest.fixture()
def fast_toml(tmp_path):
    path = tmp_path / "fast.toml"
    path.write_text(FAST)
    return path


class TestConfigLoading:
    def test_round_trip(self, fast_toml):
        cfg = load_config(str(fast_toml))
        assert cfg.experiment == "simple-misspec"
        assert cfg.methods == ("eto", "pgb")
        assert cfg.train.epochs == 3

    def test_unknown_top_level_key_named(self):
        with pytest.raises(ConfigError, match="tirals"):
            config_from_dict({"experiment": "simple-misspec", "tirals": 3})

    def test_unknown_train_key_named(self):
        with pytest.raises(ConfigError, match="train.epohcs"):
            config_from_dict({"experiment": "simple-misspec", "train": {"epohcs": 3}})

    def test_invalid_toml(self, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text("experiment = [unclosed")
        with pytest.raises(ConfigError):
            load_config(str(bad))

    def test_bad_value_carries_source(self, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text('experiment = "nope"\n')
        with pytest.raises(ConfigError, match="bad.toml"):
            load_config(str(bad))


class TestCommands:
    def test_list_experiments(self, capsys):
        assert main(["list-experiments"]) == 0
        out = capsys.readouterr().out.split()
        assert out == list(EXPERIMENTS)

    def test_validate_good(self, fast_toml, capsys):
        assert main(["validate-config", str(fast_toml)]) == 0
        assert "ok" in capsys.readouterr().out

    def test_validate_bad_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text('experiment = "simple-misspec"\ntirals = 2\n')
        assert main(["validate-config", str(bad)]) == 2
        assert "tirals" in capsys.readouterr().err

    def test_missing_file_exits_2(self, capsys):
        assert main(["validate-config", "/no/such/file.toml"]) == 2

    def test_run_needs_experiment_or_config(self, capsys):
        assert main(["run"]) == 2


class TestRunCommand:
    def test_run_from_config(self, fast_toml, tmp_path, capsys):
        out_dir = tmp_path / "out"
        assert main(["run", "--config", str(fast_toml), "--out-dir", str(out_dir)]) == 0
        lines = (out_dir / "results.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 2 * 2  # header + methods x trials
        stdout = capsys.readouterr().out
        assert "eto" in stdout and "pgb" in stdout

    def test_run_with_flag_overrides(self, tmp_path):
        out_dir = tmp_path / "out"
        rc = main([
            "run", "--experiment", "simple-misspec", "--methods", "eto",
            "--n", "50", "--trials", "1", "--test-size", "200", "--seed", "4",
            "--epochs", "2", "--out-dir", str(out_dir),
        ])
        assert rc == 0
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["config"]["trials"] == 1
        assert summary["config"]["seed"] == 4
        assert summary["config"]["train"]["epochs"] == 2

    def test_env_seed_used(self, fast_toml, tmp_path, monkeypatch):
        monkeypatch.setenv("PGOPT_SEED", "99")
        out_dir = tmp_path / "out"
        assert main(["run", "--config", str(fast_toml), "--out-dir", str(out_dir)]) == 0
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["config"]["seed"] == 99

    def test_flag_beats_env_seed(self, fast_toml, tmp_path, monkeypatch):
        monkeypatch.setenv("PGOPT_SEED", "99")
        out_dir = tmp_path / "out"
        rc = main(["run", "--config", str(fast_toml), "--seed", "7",
                   "--out-dir", str(out_dir)])
        assert rc == 0
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["config"]["seed"] == 7

    def test_bad_env_seed(self, fast_toml, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("PGOPT_SEED", "not-a-number")
        rc = main(["run", "--config", str(fast_toml), "--out-dir", str(tmp_path / "o")])
        assert rc == 2
        assert "PGOPT_SEED" in capsys.readouterr().err

    def test_experiment_flag_must_match_config(self, fast_toml, tmp_path, capsys):
        rc = main(["run", "--config", str(fast_toml), "--experiment", "portfolio",
                   "--out-dir", str(tmp_path / "o")])
        assert rc == 2
