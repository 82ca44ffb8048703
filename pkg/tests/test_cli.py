"""End-to-end tests of the command line interface."""

import subprocess
import sys

import pytest

from freepif.cli import OUT_ENV, main
from freepif.io import read_diagnostics

BEAM = """\
scenario = "beam_free_space"
seed = 12

[numerics]
n_modes = 16
n_particles = 80
dt = 1e-3
n_steps = 10
truncation_radius = 1.75

[physics]
b_z = 100.0
"""

POISSON = """\
scenario = "poisson_manufactured"
seed = 3

[numerics]
n_modes = 24
truncation_radius = 2.0

[shape]
kind = "tgauss"
sigma = 0.04
radius = 0.25

[output]
snapshot_size = 64
"""

LAPLACE = """\
scenario = "laplace_manufactured"
seed = 0

[boundary]
radius = 1.0
nodes = 64
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestRunCommand:
    def test_writes_diagnostics(self, tmp_path, capsys):
        config = write(tmp_path, "beam.toml", BEAM)
        out = tmp_path / "out"
        assert main(["run", str(config), "--out", str(out)]) == 0
        captured = capsys.readouterr()
        assert "rows=11" in captured.out
        assert "energy_drift=" in captured.out
        table = read_diagnostics(out / "diagnostics.csv")
        assert table["step"][-1] == 10

    def test_default_out_from_env(self, tmp_path, capsys, monkeypatch):
        config = write(tmp_path, "beam.toml", BEAM)
        monkeypatch.setenv(OUT_ENV, str(tmp_path / "root"))
        assert main(["run", str(config)]) == 0
        assert (tmp_path / "root" / "beam" / "diagnostics.csv").exists()

    def test_seed_override_changes_run(self, tmp_path, capsys):
        config = write(tmp_path, "beam.toml", BEAM)
        assert main(["run", str(config), "--out", str(tmp_path / "a")]) == 0
        assert (
            main(["run", str(config), "--out", str(tmp_path / "b"), "--seed", "99"])
            == 0
        )
        a = read_diagnostics(tmp_path / "a" / "diagnostics.csv")
        b = read_diagnostics(tmp_path / "b" / "diagnostics.csv")
        assert a["kinetic"][0] != b["kinetic"][0]

    def test_method_and_precompute_overrides(self, tmp_path, capsys):
        config = write(tmp_path, "beam.toml", BEAM)
        assert (
            main(
                ["run", str(config), "--out", str(tmp_path / "p"), "--method", "pic"]
            )
            == 0
        )
        assert (
            main(
                [
                    "run",
                    str(config),
                    "--out",
                    str(tmp_path / "q"),
                    "--precompute",
                    "on",
                ]
            )
            == 0
        )

    def test_missing_config_fails_cleanly(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "absent.toml")]) == 1
        captured = capsys.readouterr()
        assert captured.err.startswith("error:")

    def test_bad_key_fails_cleanly(self, tmp_path, capsys):
        config = write(
            tmp_path, "bad.toml", 'scenario = "beam_free_space"\nseed = 1\nbogus = 2\n'
        )
        assert main(["run", str(config)]) == 1
        captured = capsys.readouterr()
        assert "error: unknown config key bogus" in captured.err


class TestStudyCommand:
    def test_poisson_table(self, tmp_path, capsys):
        config = write(tmp_path, "poisson.toml", POISSON)
        assert main(["study", "poisson", str(config)]) == 0
        captured = capsys.readouterr()
        lines = captured.out.splitlines()
        assert lines[0].split() == ["n_modes", "direct_rms_error", "precomputed_rms_error"]
        assert lines[1].startswith("16 ")
        assert lines[2].startswith("24 ")
        assert any(line.startswith("precomputed_slope=") for line in lines)

    def test_poisson_table_file(self, tmp_path, capsys):
        config = write(tmp_path, "poisson.toml", POISSON)
        out = tmp_path / "tables"
        assert main(["study", "poisson", str(config), "--out", str(out)]) == 0
        text = (out / "poisson_study.csv").read_text()
        assert text.splitlines()[0] == "n_modes,direct_rms_error,precomputed_rms_error"

    def test_laplace_table(self, tmp_path, capsys):
        config = write(tmp_path, "laplace.toml", LAPLACE)
        assert main(["study", "laplace", str(config)]) == 0
        captured = capsys.readouterr()
        lines = captured.out.splitlines()
        assert lines[0].split() == ["n_nodes", "max_error_r0.9", "max_error_r0.8"]
        assert [line.split()[0] for line in lines[1:4]] == ["16", "32", "64"]

    def test_energy_slope(self, tmp_path, capsys):
        config = write(tmp_path, "beam.toml", BEAM)
        assert main(["study", "energy", str(config)]) == 0
        captured = capsys.readouterr()
        slope_lines = [
            line for line in captured.out.splitlines() if line.startswith("slope=")
        ]
        assert len(slope_lines) == 1
        slope = float(slope_lines[0].split("=")[1])
        assert 1.5 < slope < 2.5

    def test_kind_scenario_mismatch(self, tmp_path, capsys):
        config = write(tmp_path, "beam.toml", BEAM)
        assert main(["study", "poisson", str(config)]) == 1
        captured = capsys.readouterr()
        assert captured.err.startswith("error:")


class TestConsoleEntry:
    def test_module_invocation(self, tmp_path):
        config = write(tmp_path, "beam.toml", BEAM)
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "freepif.cli",
                "run",
                str(config),
                "--out",
                str(tmp_path / "out"),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert "rows=11" in proc.stdout

    def test_usage_error_is_nonzero(self):
        with pytest.raises(SystemExit) as info:
            main(["study", "warp", "nowhere.toml"])
        assert info.value.code != 0
