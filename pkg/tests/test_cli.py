"""
End-to-end tests for the capg-lab command line.
"""

import pandas as pd
import pytest

from src.main import main
from src.policy import gaussian

pytestmark = pytest.mark.integration

SMALL_CONFIG = """\
# quick settings
batch_size = 5
updates = 20
seeds = 0, 1
mc_batches = 200
grid_means = 0.0, 1.0
grid_vars = 0.1, 1.0
mc_samples = 20000
fd_configs = 20
horizon = 5
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "small.conf"
    path.write_text(SMALL_CONFIG)
    return path


def run_cli(experiment, config, out, *extra):
    return main([experiment, "--config", str(config), "--out", str(out), *extra])


class TestCli:
    """Tests for main()"""

    @pytest.mark.parametrize("experiment", ["variance", "bandit", "mdp"])
    def test_experiments_succeed(self, config_file, tmp_path, experiment):
        out = tmp_path / f"{experiment}.csv"
        assert run_cli(experiment, config_file, out) == 0
        assert len(pd.read_csv(out)) > 0

    def test_alias(self, config_file, tmp_path):
        assert run_cli("var", config_file, tmp_path / "var.csv") == 0

    def test_yaml_config(self, tmp_path):
        path = tmp_path / "small.yaml"
        path.write_text("updates: 10\nseeds: [0]\nbatch_size: 4\n")
        out = tmp_path / "bandit.csv"
        assert run_cli("bandit", path, out) == 0
        assert len(pd.read_csv(out)) == 20

    def test_estimator_override(self, config_file, tmp_path):
        out = tmp_path / "pg.csv"
        assert run_cli("bandit", config_file, out, "--estimator", "pg") == 0
        assert set(pd.read_csv(out)["estimator"]) == {"pg"}

    def test_reruns_byte_identical(self, config_file, tmp_path):
        first, second, other = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
        assert run_cli("bandit", config_file, first, "--seed", "3") == 0
        assert run_cli("bandit", config_file, second, "--seed", "3") == 0
        assert run_cli("bandit", config_file, other, "--seed", "4") == 0
        assert first.read_bytes() == second.read_bytes()
        assert first.read_bytes() != other.read_bytes()

    def test_missing_config(self, tmp_path):
        assert run_cli("bandit", tmp_path / "absent.conf", tmp_path / "out.csv") == 2

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("update = 10\n")
        assert run_cli("bandit", path, tmp_path / "out.csv") == 2

    def test_invalid_value(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("batch_size = 0\n")
        out = tmp_path / "out.csv"
        assert run_cli("bandit", path, out) == 2
        assert not out.exists()

    def test_unwritable_output(self, config_file, tmp_path):
        assert run_cli("variance", config_file, tmp_path) == 2

    def test_unknown_experiment(self, config_file):
        with pytest.raises(SystemExit) as exc:
            main(["sac", "--config", str(config_file)])
        assert exc.value.code == 2

    def test_log_file(self, config_file, tmp_path, monkeypatch):
        log_file = tmp_path / "logs" / "capg.log"
        monkeypatch.setenv("CAPG_LOG_FILE", str(log_file))
        assert run_cli("bandit", config_file, tmp_path / "out.csv", "--log-level", "DEBUG") == 0
        assert "bandit" in log_file.read_text()

    def test_verify_detects_corrupted_score(self, config_file, tmp_path, monkeypatch):
        original = gaussian._upper_tail_grad
        monkeypatch.setattr(
            gaussian, "_upper_tail_grad", lambda z, std: tuple(-g for g in original(z, std))
        )
        out = tmp_path / "verify.csv"
        assert run_cli("verify", config_file, out) == 1
        report = pd.read_csv(out)
        assert "fail" in set(report["passed"])
