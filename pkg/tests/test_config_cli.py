"""Config parsing, trace files, determinism, and the CLI surface."""

import numpy as np
import pytest

from cantimol.cli import main
from cantimol.config import PROFILES, RunConfig, emit_config, parse_config, set_axis_value
from cantimol.errors import ConfigParseError, ValidationError
from cantimol.runner import config_from_header, run_scenario
from cantimol.tracefile import TraceFile, read_trace

MINIMAL = """\
scenario = single-mode
dynamics.C = 20.4
grid.points = 11
"""


class TestConfigParsing:
    def test_minimal_config(self):
        cfg = parse_config(MINIMAL)
        assert cfg.scenario == "single-mode"
        assert cfg.pinned_C == 20.4
        assert cfg.grid_points == 11

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config("# hello\n\nscenario = single-mode  # inline\ndynamics.C = 1.0\n")
        assert cfg.scenario == "single-mode"

    def test_unknown_key_names_the_line(self):
        with pytest.raises(ConfigParseError, match="line 2.*no_such"):
            parse_config("scenario = single-mode\nno_such.key = 1\n")

    def test_bad_value_names_the_line(self):
        with pytest.raises(ConfigParseError, match="line 1"):
            parse_config("grid.points = eleven\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigParseError, match="duplicate"):
            parse_config("scenario = single-mode\nscenario = two-mode\n")

    def test_invalid_grid_rejected(self):
        with pytest.raises(ValidationError):
            parse_config("scenario = single-mode\ngrid.u_min = 2\ngrid.u_max = 1\n")

    def test_temperature_replaces_default_nbar(self):
        cfg = parse_config(MINIMAL + "cantilever.temperature = 1e-3\n")
        assert cfg.nbar is None and cfg.temperature == 1e-3

    def test_all_profiles_parse(self):
        for name, text in PROFILES.items():
            cfg = parse_config(text)
            assert cfg.scenario in ("single-mode", "two-mode", "lattice", "oracle"), name

    def test_round_trip_equality(self):
        for text in PROFILES.values():
            cfg = parse_config(text)
            assert parse_config(emit_config(cfg)) == cfg

    def test_set_axis_value(self):
        cfg = parse_config(MINIMAL)
        cfg2 = set_axis_value(cfg, "cantilever.damping_D", 3.5)
        assert cfg2.damping_D == 3.5 and cfg.damping_D == 1.0


class TestTraceFile:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        tf = TraceFile(
            {"alpha": "1", "note": "x"},
            {"a": rng.standard_normal(10), "flag": ["ok" if i % 2 else "no" for i in range(10)]},
        )
        path = tf.write(tmp_path / "t.csv")
        back = read_trace(path)
        assert back.header["alpha"] == "1"
        assert np.array_equal(back.columns["a"], tf.columns["a"])
        assert back.columns["flag"] == tf.columns["flag"]

    def test_ragged_columns_rejected(self):
        with pytest.raises(ValueError):
            TraceFile({}, {"a": [1.0], "b": [1.0, 2.0]})

    def test_malformed_file_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("# broken header line\na,b\n1.0,2.0\n")
        with pytest.raises(ConfigParseError):
            read_trace(p)


class TestRunner:
    def test_repeated_runs_bit_identical(self, tmp_path):
        cfg = parse_config(PROFILES["fig2"])
        run_scenario(cfg, tmp_path / "a", "fig2")
        run_scenario(cfg, tmp_path / "b", "fig2")
        assert (tmp_path / "a/fig2.csv").read_bytes() == (tmp_path / "b/fig2.csv").read_bytes()

    def test_rerun_from_own_header(self, tmp_path):
        cfg = parse_config(PROFILES["fig3"])
        run_scenario(cfg, tmp_path / "a", "fig3")
        header = read_trace(tmp_path / "a/fig3.csv").header
        cfg2 = config_from_header(header)
        run_scenario(cfg2, tmp_path / "b", "fig3")
        assert (tmp_path / "a/fig3.csv").read_bytes() == (tmp_path / "b/fig3.csv").read_bytes()

    def test_svg_is_deterministic(self, tmp_path):
        cfg = parse_config(PROFILES["fig2"])
        run_scenario(cfg, tmp_path / "a", "fig2", svg=True)
        run_scenario(cfg, tmp_path / "b", "fig2", svg=True)
        assert (tmp_path / "a/fig2.svg").read_bytes() == (tmp_path / "b/fig2.svg").read_bytes()

    def test_single_mode_columns(self, tmp_path):
        cfg = parse_config(PROFILES["fig2"])
        run_scenario(cfg, tmp_path, "fig2")
        tf = read_trace(tmp_path / "fig2.csv")
        assert list(tf.columns) == [
            "u", "t_s", "variance_x1", "variance_x1_noiseless", "inside_validity", "squeezed",
        ]
        assert tf.header["derived.C"] == "20.4"

    def test_sweep_orders_rows_by_axis(self, tmp_path):
        cfg = parse_config(MINIMAL)
        cfg.scenario = "sweep"
        cfg.sweep_axis = "cantilever.damping_D"
        cfg.sweep_min, cfg.sweep_max, cfg.sweep_points = 0.5, 4.0, 8
        cfg.validate()
        run_scenario(cfg, tmp_path, "sw")
        tf = read_trace(tmp_path / "sw.csv")
        axis = tf.columns["cantilever.damping_D"]
        assert np.all(np.diff(axis) > 0)
        # stronger phase noise can only worsen the best achievable squeezing
        assert np.all(np.diff(tf.columns["min_variance"]) > 0)


class TestCli:
    def test_run_profile(self, tmp_path, capsys):
        assert main(["run", "--profile", "fig2", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "fig2.csv").exists()
        assert str(tmp_path / "fig2.csv") in capsys.readouterr().out

    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CANTIMOL_OUT", str(tmp_path / "envout"))
        assert main(["run", "--profile", "fig2"]) == 0
        assert (tmp_path / "envout/fig2.csv").exists()

    def test_exit_code_parse_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("scenario = single-mode\nwat = 1\n")
        assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_exit_code_validation_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("scenario = nonsense\n")
        assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 3
        capsys.readouterr()

    def test_exit_code_numerical_error(self, tmp_path, capsys):
        # overdamped two-mode run: the closed form has no real value
        bad = tmp_path / "over.cfg"
        bad.write_text(
            "scenario = two-mode\nsetup.spacing_l = 2e-7\nsetup.count_N = 30\n"
            "dynamics.C_k = 1.0\ncantilever.damping_D = 5.0\n"
        )
        assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 4
        capsys.readouterr()

    def test_exit_code_cutoff_limited(self, tmp_path, capsys):
        bad = tmp_path / "cut.cfg"
        bad.write_text(
            "scenario = oracle\noracle.kind = single\noracle.coupling = 1.0\n"
            "oracle.n_max = 8\ngrid.u_max = 2.0\ngrid.points = 5\n"
        )
        assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 5
        # the partial output is kept for inspection
        assert (tmp_path / "cut.csv").exists()
        capsys.readouterr()

    def test_unknown_profile(self, capsys):
        assert main(["run", "--profile", "nope"]) == 3
        capsys.readouterr()

    def test_list_profiles(self, capsys):
        assert main(["list-profiles"]) == 0
        out = capsys.readouterr().out
        for name in PROFILES:
            assert name in out

    def test_reference_report_to_file(self, tmp_path, capsys):
        assert main(["reference-report", "--out", str(tmp_path)]) == 0
        text = (tmp_path / "reference_report.txt").read_text()
        assert "factor of 5" in text
        capsys.readouterr()

    def test_sweep_cli(self, tmp_path, capsys):
        rc = main([
            "sweep", "--profile", "fig2", "--axis", "cantilever.damping_D",
            "--min", "0.5", "--max", "2.0", "--points", "4", "--out", str(tmp_path),
        ])
        assert rc == 0
        assert (tmp_path / "fig2_sweep.csv").exists()
        capsys.readouterr()
