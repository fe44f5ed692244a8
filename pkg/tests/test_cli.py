"""End-to-end tests for the ergopt command line."""

import json
import math

import pytest
from click.testing import CliRunner

from app import cli
from ergopt import __version__


@pytest.fixture
def run(systems_dir):
    """Invoke the CLI quietly; spec names resolve against config/systems/."""
    runner = CliRunner()

    def invoke(*args, spec=None, options=()):
        argv = ["--log-level", "ERROR", *options, *args]
        if spec is not None:
            argv.append(str(systems_dir / spec))
        return runner.invoke(cli, argv)

    return invoke


def payload(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


@pytest.mark.integration
class TestExtremalCommands:
    def test_beta(self, run):
        data = payload(run("beta", spec="golden_mean.yaml"))
        assert data == {"beta": "1/2", "mode": "exact", "witness_cycle": [0, 1]}

    def test_eta(self, run):
        data = payload(run("eta", spec="golden_mean.yaml"))
        assert data["eta"] == "0"
        assert data["witness_cycle"] == [0]

    def test_named_potential(self, run):
        data = payload(run("beta", "--potential", "phi", spec="golden_mean.yaml"))
        assert data["beta"] == "1"

    def test_cocycle_is_float(self, run):
        data = payload(run("beta", spec="diagonal_cocycle.yaml"))
        assert data["mode"] == "float"
        value = data["beta"] if isinstance(data["beta"], float) else data["beta"]["hi"]
        assert value == pytest.approx(math.log(3))

    def test_output_is_deterministic(self, run):
        first = run("spectrum", spec="golden_mean.yaml")
        second = run("spectrum", spec="golden_mean.yaml")
        assert first.output == second.output


@pytest.mark.integration
class TestLevelSetCommands:
    def test_lambda(self, run):
        data = payload(run("lambda", "--alpha", "0.75", spec="golden_mean.yaml"))
        assert data["lambda"] == "1/4"
        assert data["range"] == ["1/2", "1"]

    def test_lambda_alpha_from_spec(self, run):
        assert payload(run("lambda", spec="gm_f1_phi0.yaml"))["lambda"] == "1/4"

    def test_lambda_fraction_alpha(self, run):
        assert payload(run("lambda", "--alpha", "3/4", spec="golden_mean.yaml"))["alpha"] == "3/4"

    def test_infeasible_alpha(self, run):
        result = run("lambda", "--alpha", "2", spec="golden_mean.yaml")
        assert result.exit_code == 3
        assert "Infeasible" in result.output

    def test_unparseable_alpha(self, run):
        result = run("lambda", "--alpha", "three", spec="golden_mean.yaml")
        assert result.exit_code == 2

    def test_spectrum(self, run):
        data = payload(run("spectrum", spec="gm_f1_phi0.yaml"))
        assert data["flat_top"] == ["1/2", "1/2"]
        assert data["beta_f"] == "1/2"
        assert [a for a, _ in data["grid"]] == ["1/2", "5/8", "3/4", "7/8", "1"]
        assert data["endpoints"]["ok"]

    def test_flat_spectrum(self, run):
        data = payload(run("spectrum", spec="trivial_f0.yaml"))
        assert {v for _, v in data["grid"]} == {"0"}
        assert data["flat_top"] == ["0", "1"]

    def test_spectrum_grid_too_small(self, run):
        result = run("spectrum", "--grid", "2", spec="golden_mean.yaml")
        assert result.exit_code == 2
        assert "InvalidParameter" in result.output

    def test_spectrum_csv(self, run, temp_dir):
        data = payload(run("spectrum", "--csv", str(temp_dir), spec="golden_mean.yaml"))
        lines = (temp_dir / "spectrum.csv").read_text().splitlines()
        assert data["csv"] == str(temp_dir / "spectrum.csv")
        assert lines[0] == "alpha,lambda_lo,lambda_hi"
        assert len(lines) == 10


@pytest.mark.integration
class TestRatioAndIrregular:
    def test_ratio(self, run):
        data = payload(run("ratio", spec="ratio_golden_mean.yaml"))
        assert data["ratio"] == "1/3"
        assert data["witness_cycle"] == [0, 1]

    def test_irregular(self, run, temp_dir):
        data = payload(run("irregular", "--csv", str(temp_dir), spec="full_shift_x0.yaml"))
        assert data["ratio_max"] == "1"
        assert data["estimate"]["estimate"] == "1"
        assert not data["estimate"]["low_depth"]
        assert len(data["witness"]["schedule"]) == 8
        assert (temp_dir / "oscillation.csv").exists()

    def test_irregular_seed_is_reproducible(self, run):
        args = ("irregular", "--depth", "4", "--seed", "5")
        assert run(*args, spec="full_shift_x0.yaml").output == run(*args, spec="full_shift_x0.yaml").output

    def test_irregular_rejects_cocycle(self, run):
        assert run("irregular", spec="diagonal_cocycle.yaml").exit_code == 2

    @pytest.mark.parametrize("option", [("--depth", "1"), ("--growth", "1")])
    def test_irregular_rejects_bad_schedule(self, run, option):
        assert run("irregular", *option, spec="full_shift_x0.yaml").exit_code == 2


@pytest.mark.integration
class TestSuspensionCommands:
    def test_average(self, run):
        data = payload(run("suspension", "average", spec="suspension_golden_mean.yaml"))
        assert data == {"flow_average": "1/3", "mode": "exact"}

    def test_range(self, run):
        data = payload(run("suspension", "range", spec="suspension_golden_mean.yaml"))
        assert data["range"] == ["1/3", "1/2"]

    def test_level_set(self, run):
        data = payload(run("suspension", "level-set", spec="suspension_golden_mean.yaml"))
        assert data["flow_value"] == "1/3"

    def test_irregular(self, run):
        data = payload(run("suspension", "irregular", "--depth", "6", spec="suspension_golden_mean.yaml"))
        assert data["value"] == "1/3"

    def test_without_suspension_section(self, run):
        assert run("suspension", "range", spec="golden_mean.yaml").exit_code == 2


@pytest.mark.integration
class TestUtilityCommands:
    def test_info(self, run):
        data = payload(run("info", spec="golden_mean.yaml"))
        assert data["mixing"]
        assert data["edges"] == 3
        assert data["simple_cycles"] == 2
        assert data["roles"] == {"F": "f", "PHI": "phi"}
        assert data["potentials"]["pair"] == {"kind": "locally_constant", "range": 2}

    def test_horizon(self, run):
        data = payload(run("horizon", spec="golden_mean.yaml"))
        assert data["value"] == "1/2"
        assert data["beta"] == "1/2"
        assert data["gap"] == "0"
        assert data["gap_bound"] == "1/8"

    def test_validate(self, run):
        data = payload(run("validate", spec="golden_mean.yaml"))
        assert data["run"]["alpha"] == "3/4"

    def test_missing_spec(self, run, temp_dir):
        result = run("beta", str(temp_dir / "absent.yaml"))
        assert result.exit_code == 2
        assert "SystemSpecError" in result.output

    def test_bad_config(self, run, temp_dir):
        config = temp_dir / "config.yaml"
        config.write_text("numerics:\n  arithmetic: fast\n")
        result = run("beta", spec="golden_mean.yaml", options=("--config", str(config)))
        assert result.exit_code == 2

    def test_float_config(self, run, temp_dir):
        config = temp_dir / "config.yaml"
        config.write_text("numerics:\n  arithmetic: float\n")
        data = payload(run("beta", spec="golden_mean.yaml", options=("--config", str(config))))
        assert data["mode"] == "float"
        assert data["beta"] == pytest.approx(0.5)

    def test_metrics_out(self, run, temp_dir):
        from ergopt.monitoring import PROMETHEUS_AVAILABLE

        path = temp_dir / "metrics.prom"
        payload(run("beta", spec="golden_mean.yaml", options=("--metrics-out", str(path))))
        assert path.exists() == PROMETHEUS_AVAILABLE

    def test_version(self):
        result = CliRunner().invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output
