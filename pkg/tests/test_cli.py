"""End-to-end command-line behavior and file formats."""

import csv
import json

import numpy as np
import pytest

from voidplan.cli import main
from voidplan.field import load_field


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def small_field(tmp_path):
    """A small synthetic field file to keep plan runs fast."""
    path = tmp_path / "field.json"
    assert run(
        "synth", "--out", path,
        "--start-km", 0.0, "--end-km", 4.0, "--spacing-km", 0.05,
        "--range-km", 0.8,
    ) == 0
    return path


class TestSynth:
    def test_default_grid_has_371_points(self, tmp_path):
        out = tmp_path / "field.json"
        assert run("synth", "--out", out) == 0
        field = load_field(out)
        assert field.num_points == 371
        assert field.kernel is not None

    def test_coarser_spacing_gives_186_points(self, tmp_path):
        out = tmp_path / "field.json"
        assert run("synth", "--out", out, "--spacing-km", 0.1) == 0
        assert load_field(out).num_points == 186

    def test_zero_length_domain_fails_validation(self, tmp_path, capsys):
        out = tmp_path / "field.json"
        code = run("synth", "--out", out, "--start-km", 2.0, "--end-km", 2.0)
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_constant_profile(self, tmp_path):
        out = tmp_path / "field.json"
        assert run("synth", "--out", out, "--profile", "0.5", "--end-km", 2.0) == 0
        field = load_field(out)
        assert np.allclose(field.mean, field.mean[0])

    def test_round_trip_parses_back_identically(self, tmp_path):
        out = tmp_path / "field.json"
        assert run("synth", "--out", out) == 0
        field = load_field(out)
        again = tmp_path / "again.json"
        from voidplan.field import save_field

        save_field(field, again)
        assert out.read_bytes() == again.read_bytes()


class TestFit:
    def test_uniform_arrivals_give_near_flat_mean(self, tmp_path):
        csv_path = tmp_path / "arrivals.csv"
        rows = "\n".join(str(x) for x in np.linspace(0.05, 3.95, 120))
        csv_path.write_text(f"position_km\n{rows}\n")
        out = tmp_path / "field.json"
        assert run(
            "fit", csv_path, "--out", out,
            "--start-km", 0.0, "--end-km", 4.0, "--spacing-km", 0.05,
            "--bandwidth-km", 50.0,
        ) == 0
        field = load_field(out)
        assert field.mean.std() / field.mean.mean() < 0.02

    def test_malformed_header_fails(self, tmp_path, capsys):
        csv_path = tmp_path / "bad.csv"
        csv_path.write_text("xs\n1.0\n")
        assert run("fit", csv_path, "--out", tmp_path / "f.json") == 1
        assert "position_km" in capsys.readouterr().err

    def test_empty_file_fails(self, tmp_path):
        csv_path = tmp_path / "empty.csv"
        csv_path.write_text("position_km\n")
        assert run("fit", csv_path, "--out", tmp_path / "f.json") == 1


class TestPlan:
    def test_report_and_curves_written(self, tmp_path, small_field):
        report = tmp_path / "report.json"
        curves = tmp_path / "curves.csv"
        assert run(
            "plan", small_field, "--out", report, "--curves", curves,
            "--sensors", 5, "--mc-samples", 400, "--seed", 3,
        ) == 0
        payload = json.loads(report.read_text())
        assert len(payload["chosen_positions_km"]) == 5
        assert payload["curves"]["n"] == [1, 2, 3, 4, 5]
        assert len(payload["curves"]["mc"]) == 5

        with open(curves) as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["n", "jensen", "corrected", "mc", "mc_se", "gap_jensen", "gap_corrected"]
        assert len(rows) == 6
        assert float(rows[1][3]) <= 1.0

    def test_reproducible_byte_for_byte(self, tmp_path, small_field):
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        c1, c2 = tmp_path / "c1.csv", tmp_path / "c2.csv"
        args = ["--sensors", 4, "--mc-samples", 300, "--seed", 9]
        assert run("plan", small_field, "--out", r1, "--curves", c1, *args) == 0
        assert run("plan", small_field, "--out", r2, "--curves", c2, *args) == 0
        assert r1.read_bytes() == r2.read_bytes()
        assert c1.read_bytes() == c2.read_bytes()

    def test_no_mc_leaves_columns_empty(self, tmp_path, small_field):
        report = tmp_path / "report.json"
        curves = tmp_path / "curves.csv"
        assert run(
            "plan", small_field, "--out", report, "--curves", curves,
            "--sensors", 3, "--no-mc",
        ) == 0
        payload = json.loads(report.read_text())
        assert payload["curves"]["mc"] is None
        with open(curves) as handle:
            rows = list(csv.reader(handle))
        assert rows[1][3:] == ["", "", "", ""]

    def test_zero_sensors_fails_validation(self, tmp_path, small_field, capsys):
        assert run("plan", small_field, "--out", tmp_path / "r.json", "--sensors", 0) == 1
        assert "error" in capsys.readouterr().err

    def test_missing_field_file_fails(self, tmp_path):
        assert run("plan", tmp_path / "nope.json", "--out", tmp_path / "r.json") == 1

    def test_surrogate_choice_changes_objective(self, tmp_path, small_field):
        report = tmp_path / "report.json"
        assert run(
            "plan", small_field, "--out", report,
            "--sensors", 3, "--surrogate", "jensen", "--no-mc",
        ) == 0
        payload = json.loads(report.read_text())
        assert payload["config"]["surrogate"] == "jensen"


class TestVerify:
    def test_default_sweeps_pass(self, tmp_path, capsys):
        report = tmp_path / "verify.json"
        code = run("verify", "--pairs", 2000, "--points", 2000, "--report", report)
        out = capsys.readouterr().out
        assert code == 0
        assert out.count("PASS") == 5
        payload = json.loads(report.read_text())
        assert all(check["ok"] for check in payload["checks"])

    def test_seed_controls_the_sweep(self, capsys):
        assert run("verify", "--pairs", 500, "--points", 500, "--seed", 123) == 0
        capsys.readouterr()

    def test_violation_exits_two(self, monkeypatch, capsys):
        # Force a failing dominance report to exercise the exit wiring.
        import voidplan.cli as cli

        class Broken:
            upper_margin = np.array([-1.0])
            lower_margin = np.array([-1.0])
            both_ok = np.array([False])

        monkeypatch.setattr(cli, "dominance_check", lambda mu, s2: Broken())
        assert run("verify", "--pairs", 10, "--points", 200) == 2
        assert "FAIL" in capsys.readouterr().out


class TestGapSummary:
    def test_summary_of_mc_report(self, tmp_path, small_field, capsys):
        report = tmp_path / "report.json"
        assert run(
            "plan", small_field, "--out", report,
            "--sensors", 4, "--mc-samples", 500, "--seed", 2,
        ) == 0
        capsys.readouterr()
        assert run("gap-summary", report) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["mean_abs_gap_jensen"] > 0
        assert "reduction_percent" in summary

    def test_requires_mc_curves(self, tmp_path, small_field, capsys):
        report = tmp_path / "report.json"
        assert run("plan", small_field, "--out", report, "--sensors", 3, "--no-mc") == 0
        capsys.readouterr()
        assert run("gap-summary", report) == 1
        assert "Monte-Carlo" in capsys.readouterr().err


class TestConfigFile:
    def test_json_config_supplies_defaults(self, tmp_path, small_field):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"sensors": 2, "mc_samples": 100, "seed": 4}))
        report = tmp_path / "report.json"
        assert run("plan", small_field, "--out", report, "--config", cfg) == 0
        payload = json.loads(report.read_text())
        assert payload["config"]["sensors"] == 2
        assert payload["config"]["mc_samples"] == 100

    def test_flags_override_config(self, tmp_path, small_field):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"sensors": 2, "mc_samples": 100}))
        report = tmp_path / "report.json"
        assert run(
            "plan", small_field, "--out", report, "--config", cfg, "--sensors", 3
        ) == 0
        payload = json.loads(report.read_text())
        assert payload["config"]["sensors"] == 3

    def test_toml_config(self, tmp_path, small_field):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text("sensors = 2\nmc_samples = 50\n")
        report = tmp_path / "report.json"
        assert run("plan", small_field, "--out", report, "--config", cfg) == 0
        assert json.loads(report.read_text())["config"]["sensors"] == 2

    def test_missing_config_fails(self, tmp_path, small_field):
        assert run(
            "plan", small_field, "--out", tmp_path / "r.json",
            "--config", tmp_path / "none.json",
        ) == 1


class TestUsageErrors:
    def test_unknown_command_exits_one(self):
        with pytest.raises(SystemExit) as excinfo:
            run("frobnicate")
        assert excinfo.value.code == 1

    def test_bad_choice_exits_one(self, tmp_path, small_field):
        with pytest.raises(SystemExit) as excinfo:
            run("plan", small_field, "--out", tmp_path / "r.json", "--surrogate", "magic")
        assert excinfo.value.code == 1
