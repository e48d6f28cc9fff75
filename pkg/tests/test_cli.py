"""Command-line interface: config resolution, CSV schema, determinism."""

import os
import subprocess
import sys

import numpy as np
import pytest

from fracrte.cli import (
    CSV_HEADER,
    RunConfig,
    emit_config,
    load_config_file,
    main,
    parse_config,
)


class TestParseConfig:
    def test_defaults_are_benchmark_medium(self):
        cfg = parse_config(["transport"])
        assert cfg.alpha == 0.5
        assert cfg.v == 1.0
        assert cfg.sigma_s == 10.0
        assert cfg.sigma_a == 0.0
        assert cfg.g == 0.9
        assert cfg.N == 1
        assert cfg.mode == "hermitian"
        m = cfg.medium()
        assert m.phase.beta == (1.0, 2.7)

    def test_times_flag(self):
        cfg = parse_config(["transport", "--alpha", "0.5", "--t", "0.01,0.05,0.1"])
        assert cfg.times == (0.01, 0.05, 0.1)

    def test_alpha_out_of_range_is_usage_error(self, capsys):
        assert main(["transport", "--alpha", "1.5"]) == 2
        assert "alpha" in capsys.readouterr().err

    def test_unknown_config_key_rejected(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("nonsense=1\n")
        with pytest.raises(ValueError, match="unknown key"):
            load_config_file(str(p))

    def test_flags_override_file(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("alpha=0.25\nsigma_s=5.0\n# comment line\n")
        cfg = parse_config(["transport", "--config", str(p), "--alpha", "0.75"])
        assert cfg.alpha == 0.75
        assert cfg.sigma_s == 5.0

    def test_round_trip(self, tmp_path):
        cfg = parse_config(["diffusion", "--alpha", "0.25", "--t", "0.01,0.1",
                            "--n-x", "33", "--seed", "5"])
        p = tmp_path / "emitted.cfg"
        p.write_text(emit_config(cfg))
        values = load_config_file(str(p))
        assert RunConfig(**values) == cfg


class TestRun:
    def test_transport_csv_schema(self, tmp_path):
        code = main(["transport", "--alpha", "0.5", "--t", "0.02,0.05",
                     "--n-x", "11", "--x-min", "-1", "--x-max", "1",
                     "--output-path", str(tmp_path)])
        assert code == 0
        for t in ("0.02", "0.05"):
            path = tmp_path / f"transport_alpha0.5_t{t}.csv"
            lines = path.read_text().strip().splitlines()
            assert lines[0] == CSV_HEADER
            assert len(lines) == 12  # header + n_x rows
            first = lines[1].split(",")
            assert len(first) == 7
            assert first[2] == "hermitian"

    def test_diffusion_gaussian_values(self, tmp_path):
        code = main(["diffusion", "--alpha", "1", "--t", "0.01", "--n-x", "9",
                     "--x-min", "-0.5", "--x-max", "0.5",
                     "--output-path", str(tmp_path)])
        assert code == 0
        lines = (tmp_path / "diffusion_alpha1_t0.01.csv").read_text().strip().splitlines()
        for row in lines[1:]:
            x, u = float(row.split(",")[0]), float(row.split(",")[1])
            ref = np.exp(-x**2 / (4 * (1 / 3) * 0.01)) / np.sqrt(4 * np.pi * (1 / 3) * 0.01)
            assert u == pytest.approx(ref, rel=1e-8)

    def test_ctrw_seed_byte_determinism(self, tmp_path):
        args = ["ctrw", "--seed", "7", "--n-walkers", "20000", "--t", "0.02",
                "--n-x", "21"]
        main(args + ["--output-path", str(tmp_path / "a")])
        main(args + ["--output-path", str(tmp_path / "b")])
        fa = (tmp_path / "a" / "ctrw_alpha0.5_t0.02.csv").read_bytes()
        fb = (tmp_path / "b" / "ctrw_alpha0.5_t0.02.csv").read_bytes()
        assert fa == fb

    def test_unwritable_output_is_io_error(self, tmp_path):
        target = tmp_path / "blocked"
        target.write_text("")  # a file where a directory is required
        code = main(["transport", "--t", "0.02", "--n-x", "5",
                     "--output-path", str(target)])
        assert code == 3

    def test_console_entry_point(self):
        out = subprocess.run([sys.executable, "-m", "fracrte.cli", "--help"],
                             capture_output=True, text=True)
        assert out.returncode == 0
        assert "transport" in out.stdout


@pytest.mark.slow
def test_validate_subcommand_passes():
    assert main(["validate", "--alpha", "0.5", "--t", "0.05"]) == 0


@pytest.mark.slow
def test_subordinate_subcommand_matches_direct(tmp_path):
    # the subordinated CSV is a genuine density: positive near the source
    # and close in L1 to the direct fractional solve at matching settings
    code = main(["subordinate", "--alpha", "0.5", "--t", "0.05", "--n-x", "41",
                 "--output-path", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "subordinate_alpha0.5_t0.05.csv").read_text().strip().splitlines()[1:]
    xs = np.array([float(r.split(",")[0]) for r in rows])
    vals = np.array([float(r.split(",")[1]) for r in rows])
    assert vals[len(vals) // 2] > 1.0
    assert np.all(vals[np.abs(xs) < 1.0] > 0)


@pytest.mark.slow
def test_figures_emits_all_panels(tmp_path):
    code = main(["figures", "--n-x", "81", "--output-path", str(tmp_path)])
    assert code == 0
    names = sorted(os.listdir(tmp_path))
    assert len(names) == 18  # nine panels, transport + diffusion each
    for alpha, times in ((0.25, ("0.0001", "0.0025", "0.01")),
                         (0.5, ("0.01", "0.05", "0.1")),
                         (0.75, ("0.05", "0.1", "0.2"))):
        for t in times:
            assert f"figures_alpha{alpha}_t{t}_transport.csv" in names
            assert f"figures_alpha{alpha}_t{t}_diffusion.csv" in names
    # the late strongly-super-diffusive panel shows the double peak: an
    # interior local minimum at the origin flanked by symmetric maxima
    rows = (tmp_path / "figures_alpha0.75_t0.2_transport.csv").read_text().strip().splitlines()[1:]
    xs = np.array([float(r.split(",")[0]) for r in rows])
    vals = np.array([float(r.split(",")[1]) for r in rows])
    i0 = int(np.argmin(np.abs(xs)))
    ipeak = int(np.argmax(vals))
    assert abs(xs[ipeak]) > 0.05
    assert vals[ipeak] > vals[i0] * 1.02
