import json

import numpy as np
import pytest

from lzspec.cli import main
from lzspec.presets import PRESETS
from lzspec.propagator import StepperConfig
from lzspec.qubit import QubitSpectrum
from lzspec.sweep import GridSpec, read_csv

TINY_CONFIG = {
    "spectrum": {
        "left_slope": 2.0,
        "anticrossings": [
            {"location": 0.0, "gap": 2.0, "branch_slope": 2.0},
        ],
    },
    "grid": {"phi_f": [8.0, 8.0, 1], "tau": [1.0, 1.0, 1], "phi_i": -5.0},
}


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(TINY_CONFIG))
    return path


def grid_config(tmp_path, phi_f=(-2.0, 10.0, 6), tau=(0.01, 4.0, 30)):
    cfg = dict(TINY_CONFIG)
    cfg["grid"] = {"phi_f": list(phi_f), "tau": list(tau), "phi_i": -5.0}
    path = tmp_path / "grid.json"
    path.write_text(json.dumps(cfg))
    return path


class TestPresetConstants:
    def test_reference_parameters(self):
        fig1b = PRESETS["fig1b"]
        assert fig1b.spectrum == QubitSpectrum.two_level(2.0, 2.0)
        assert fig1b.grid == GridSpec((-2.0, 10.0, 240), (0.01, 4.0, 400), -5.0)
        assert fig1b.stepper == StepperConfig()

        for name, gaps in (("fig4a", (1.0, 10.0)), ("fig4b", (2.0, 8.0)),
                           ("fig4c", (8.0, 2.0))):
            preset = PRESETS[name]
            assert preset.spectrum == QubitSpectrum.three_level(2.0, *gaps)
            assert preset.spectrum.anticrossings[0].location == 0.0
            assert preset.spectrum.anticrossings[1].location == 8.0
            assert preset.grid.phi_i == -5.0

    def test_preset_names(self):
        assert sorted(PRESETS) == ["fig1b", "fig4a", "fig4b", "fig4c"]


class TestSweepCommand:
    def test_writes_csv(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        rc = main(["sweep", "--config", str(tiny_config), "--out", str(out)])
        assert rc == 0
        imap = read_csv(out / "run.csv")
        assert imap.values.shape == (1, 1)
        assert imap.spectrum is not None

    def test_pgm_emission(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        rc = main(["sweep", "--config", str(tiny_config), "--out", str(out),
                   "--pgm"])
        assert rc == 0
        text = (out / "run.pgm").read_text()
        assert text.startswith("P2\n")
        assert "65535" in text

    def test_workers_do_not_change_output(self, tmp_path):
        cfg = grid_config(tmp_path)
        rc1 = main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "a"),
                    "--workers", "1"])
        rc2 = main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "b"),
                    "--workers", "3"])
        assert rc1 == rc2 == 0
        assert (tmp_path / "a" / "run.csv").read_bytes() == \
            (tmp_path / "b" / "run.csv").read_bytes()

    def test_unknown_preset_exit_2(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["sweep", "--preset", "fig9z"])
        assert info.value.code == 2

    def test_missing_spectrum_exit_2(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("{}")
        assert main(["sweep", "--config", str(path)]) == 2

    def test_numeric_failure_exit_3(self, tiny_config, tmp_path):
        rc = main(["sweep", "--config", str(tiny_config),
                   "--out", str(tmp_path), "--tolerance", "1e-300"])
        assert rc == 3


class TestTraceCommand:
    def test_trace_columns_and_trace_sum(self, tiny_config, tmp_path):
        rc = main(["trace", "--config", str(tiny_config),
                   "--phi-f", "8.0", "--tau", "1.0", "--out", str(tmp_path)])
        assert rc == 0
        lines = [ln for ln in (tmp_path / "run_trace.csv").read_text().splitlines()
                 if ln and not ln.startswith("#")]
        assert lines[0] == "t_ns,W_11,W_22,Re_W_12,Im_W_12"
        data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
        np.testing.assert_allclose(data[:, 1] + data[:, 2], 1.0, atol=1e-8)
        assert data[0, 0] == 0.0 and data[-1, 0] == 1.0

    def test_zero_gap_trace_constant(self, tmp_path):
        cfg = dict(TINY_CONFIG)
        cfg["spectrum"] = {
            "left_slope": 2.0,
            "anticrossings": [{"location": 0.0, "gap": 0.0, "branch_slope": 2.0}],
        }
        path = tmp_path / "nogap.json"
        path.write_text(json.dumps(cfg))
        rc = main(["trace", "--config", str(path), "--phi-f", "8.0",
                   "--tau", "1.0", "--out", str(tmp_path)])
        assert rc == 0
        lines = [ln for ln in (tmp_path / "run_trace.csv").read_text().splitlines()
                 if ln and not ln.startswith("#")][1:]
        w11 = np.array([float(ln.split(",")[1]) for ln in lines])
        np.testing.assert_allclose(w11, 1.0, atol=1e-9)

    def test_trace_final_matches_sweep_cell_bitwise(self, tiny_config, tmp_path):
        assert main(["sweep", "--config", str(tiny_config),
                     "--out", str(tmp_path)]) == 0
        assert main(["trace", "--config", str(tiny_config), "--phi-f", "8.0",
                     "--tau", "1.0", "--out", str(tmp_path)]) == 0
        map_rows = [ln for ln in (tmp_path / "run.csv").read_text().splitlines()
                    if ln and not ln.startswith("#")][1:]
        cell_w11 = map_rows[0].split(",")[2]
        trace_rows = [ln for ln in
                      (tmp_path / "run_trace.csv").read_text().splitlines()
                      if ln and not ln.startswith("#")][1:]
        final_w11 = trace_rows[-1].split(",")[1]
        assert cell_w11 == final_w11


class TestAnalyzeCommand:
    def test_report_files(self, tmp_path):
        cfg = grid_config(tmp_path, phi_f=(6.0, 10.0, 5), tau=(0.01, 4.0, 150))
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        rc = main(["analyze", str(tmp_path / "run.csv"), "--out", str(tmp_path),
                   "--phi-f-ref", "8.0"])
        assert rc == 0
        kv = dict(
            line.split("=", 1)
            for line in (tmp_path / "run_report.kv").read_text().splitlines()
        )
        assert set(kv) == {"slope_estimate", "gap_estimates",
                           "anticrossing_locations", "k12", "k13", "residuals"}
        slope = float(kv["slope_estimate"])
        assert slope == pytest.approx(2.0, rel=0.10)
        json.loads(kv["residuals"])
        assert (tmp_path / "run_report.txt").exists()

    def test_explicit_protocol_points(self, tmp_path):
        cfg = grid_config(tmp_path, phi_f=(6.0, 10.0, 5), tau=(0.01, 4.0, 150))
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        rc = main(["analyze", str(tmp_path / "run.csv"), "--out", str(tmp_path),
                   "--phi-f-ref", "8.0",
                   "--points", "1.0,3.85,0.00;2.0,3.85,0.93"])
        assert rc == 0
        kv = dict(
            line.split("=", 1)
            for line in (tmp_path / "run_report.kv").read_text().splitlines()
        )
        gaps = json.loads(kv["gap_estimates"])
        assert len(gaps) == 1
        assert gaps[0][1] == pytest.approx(2.0, rel=0.10)

    def test_malformed_csv_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text('# config: {"phi_i": -5.0}\n'
                       "phi_f_mPhi0,tau_ns,population\n"
                       "1.0,0.5,0.2\n1.0,xyz,0.3\n")
        rc = main(["analyze", str(bad)])
        assert rc == 2
        err = capsys.readouterr().err
        assert "line 4" in err and "column 2" in err

    def test_missing_file_exit_4(self, tmp_path):
        rc = main(["analyze", str(tmp_path / "nope.csv")])
        assert rc == 4


class TestFftCommand:
    def test_emits_column_table(self, tmp_path):
        cfg = grid_config(tmp_path, phi_f=(7.0, 9.0, 3), tau=(0.01, 4.0, 120))
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        rc = main(["fft", str(tmp_path / "run.csv"), "--out", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "run_fft.csv").read_text().splitlines()
        assert lines[0] == "phi_f_mPhi0,dominant_omega_rad_ns,power,resolution_rad_ns"
        assert len(lines) == 4
        omega_8 = float(lines[2].split(",")[1])
        assert omega_8 == pytest.approx(2.0 * 64.0 / 13.0, rel=0.10)


class TestFitGapCommand:
    def test_reports_gap(self, capsys):
        rc = main(["fit-gap", "--points", "1.0,3.85,0.00;2.0,3.85,0.93",
                   "--slope", "2.1", "--phi-i", "-5"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "gap estimate" in out
        gap = float(out.split("gap estimate:")[1].split("GHz")[0])
        assert gap == pytest.approx(2.1, abs=0.05)

    def test_inconsistent_points_exit_3(self):
        rc = main(["fit-gap", "--points", "1.0,3.85,0.00;1.0,3.85,1.00",
                   "--slope", "2.0", "--phi-i", "-5",
                   "--gap-range", "0.5,4.0"])
        assert rc == 3

    def test_bad_points_exit_2(self):
        rc = main(["fit-gap", "--points", "1.0,3.85", "--slope", "2.0",
                   "--phi-i", "-5"])
        assert rc == 2
