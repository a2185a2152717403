"""Command-line interface end to end: files, stdout, exit codes."""

import pytest

from qkdmux.cli import main

BROKEN_SCENARIO = """
schema_version = 1

[fiber]
length_km = -5.0

[quantum]
channel = 36

[receiver]
demux_fwhm_ghz = 70.0

[raman]
scale = 3.2e-9
"""

DEAD_ANCHOR_SCENARIO = """
schema_version = 1
name = "dead"

[fiber]
length_km = 50.0

[quantum]
channel = 36

[[data]]
channel = 32

[receiver]
demux_fwhm_ghz = 70.0
demux_insertion_db = 1.2

[raman]
scale = 3.2e-9

[sweep]
axis = "distance"
values = [50.0, 150.0]

[calibration]
free = ["raman_scale"]

[[calibration.anchor]]
axis_value = 150.0
metric = "secure_bps"
target = 1e5
"""


class TestSweepCommand:
    def test_writes_named_csv(self, tmp_path):
        rc = main(["-s", "fig2", "-o", str(tmp_path), "sweep"])
        assert rc == 0
        out = tmp_path / "fig2-distance.csv"
        assert out.exists()
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("axis_value,")
        assert len(lines) == 5

    def test_byte_identical_runs(self, tmp_path):
        a_dir = tmp_path / "a"
        b_dir = tmp_path / "b"
        assert main(["-s", "fig3", "-o", str(a_dir), "sweep"]) == 0
        assert main(["-s", "fig3", "-o", str(b_dir), "sweep"]) == 0
        a = (a_dir / "fig3-bandwidth.csv").read_bytes()
        b = (b_dir / "fig3-bandwidth.csv").read_bytes()
        assert a == b

    def test_stdout_when_no_output_dir(self, capsys):
        assert main(["-s", "fig4", "sweep"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("axis_value,")

    def test_parallel_jobs_same_bytes(self, tmp_path):
        assert main(["-s", "fig2", "-o", str(tmp_path / "s"), "sweep"]) == 0
        assert main(["-s", "fig2", "-j", "4", "-o", str(tmp_path / "p"), "sweep"]) == 0
        assert (tmp_path / "s" / "fig2-distance.csv").read_bytes() == (
            tmp_path / "p" / "fig2-distance.csv"
        ).read_bytes()


class TestSimulateCommand:
    def test_report_to_stdout(self, capsys):
        assert main(["-s", "fig2", "simulate"]) == 0
        out = capsys.readouterr().out
        assert "# scenario: fig2" in out
        assert "# assumptions:" in out
        assert "axis_value," in out

    def test_single_row_even_with_sweep_configured(self, tmp_path):
        assert main(["-s", "fig2", "-o", str(tmp_path), "--seed", "9", "simulate"]) == 0
        lines = (tmp_path / "fig2-point.csv").read_text().strip().splitlines()
        data_lines = [l for l in lines if not l.startswith("#") and "," in l]
        assert len(data_lines) == 2  # header plus one row


class TestCalibrateCommand:
    def test_single_free_parameter(self, tmp_path):
        rc = main(["-s", "fig3", "-o", str(tmp_path), "calibrate"])
        assert rc == 0
        text = (tmp_path / "fig3-calibration.txt").read_text()
        assert "converged: yes" in text
        assert "raman_scale:" in text
        assert "anchor secure_bps @ 10" in text

    def test_free_override(self, tmp_path):
        rc = main(["-s", "fig3", "-o", str(tmp_path), "calibrate", "--free", "raman_scale"])
        assert rc == 0

    def test_no_anchors_is_a_usage_error(self, tmp_path):
        assert main(["-s", "fig4", "-o", str(tmp_path), "calibrate"]) == 2

    def test_dead_anchor_exit_code(self, tmp_path):
        path = tmp_path / "dead.scenario"
        path.write_text(DEAD_ANCHOR_SCENARIO)
        assert main(["-s", str(path), "calibrate"]) == 3


class TestPlanCommand:
    def test_plan_listing(self, tmp_path):
        rc = main(["-s", "fig2", "-o", str(tmp_path), "plan"])
        assert rc == 0
        text = (tmp_path / "fig2-plan.txt").read_text()
        assert "channel 36" in text and "quantum" in text
        assert "channel 32" in text and "co -14.00 dBm" in text
        assert "channel 33" in text and "counter -14.00 dBm" in text
        assert "combined data launch: -10.99 dBm" in text
        assert "no warnings" in text

    def test_fixed_policy_plan(self, tmp_path):
        rc = main(["-s", "fig4", "-o", str(tmp_path), "plan"])
        assert rc == 0
        text = (tmp_path / "fig4-plan.txt").read_text()
        assert "combined data launch: +3.01 dBm" in text


class TestAuditCommand:
    def test_wide_receiver(self, capsys):
        assert main(["-s", "fig2", "audit-tbp"]) == 0
        out = capsys.readouterr().out
        assert "time-bandwidth product: 7" in out
        assert "at limit: no" in out
        assert "temporal acceptance: -10.0 dB" in out

    def test_narrow_receiver(self, capsys):
        assert main(["-s", "fig4", "audit-tbp"]) == 0
        out = capsys.readouterr().out
        assert "time-bandwidth product: 1.5" in out


class TestErrorPaths:
    def test_unknown_scenario_reference(self, capsys):
        assert main(["-s", "fig9", "sweep"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_invalid_scenario_file(self, tmp_path, capsys):
        path = tmp_path / "broken.scenario"
        path.write_text(BROKEN_SCENARIO)
        assert main(["-s", str(path), "sweep"]) == 2
        assert "length" in capsys.readouterr().err
