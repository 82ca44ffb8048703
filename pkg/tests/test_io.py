"""Tests for diagnostics CSV and snapshot container round trips."""

import numpy as np
import pytest

from freepif.io import (
    DIAGNOSTIC_COLUMNS,
    DiagnosticsWriter,
    load_field_snapshot,
    read_diagnostics,
    save_field_snapshot,
    snapshot_to_csv,
)


class TestDiagnostics:
    def test_round_trip_is_exact(self, tmp_path):
        path = tmp_path / "diag.csv"
        rows = [
            (0, 0.0, 1.0, -0.25, 0.0, (0.5, -0.5), 1e-300),
            (10, 0.005, 0.9999999999999991, 3.5e-7, 2.0, (1e-16, -1e-16), -4.4e-16),
        ]
        with DiagnosticsWriter(path) as writer:
            for step, t, uk, ue, uh, mom, res in rows:
                writer.append(step, t, uk, ue, uh, mom, res)
        data = read_diagnostics(path)
        assert list(data["step"]) == [0, 10]
        assert data["time"][1] == 0.005
        assert data["kinetic"][1] == 0.9999999999999991
        assert data["field"][0] == -0.25
        assert data["boundary"][1] == 2.0
        assert data["momentum_x"][0] == 0.5
        assert data["momentum_y"][0] == -0.5
        assert data["momentum_norm"][0] == np.hypot(0.5, -0.5)
        assert data["charge_residual"][0] == 1e-300
        assert data["charge_residual"][1] == -4.4e-16

    def test_header_matches_schema(self, tmp_path):
        path = tmp_path / "diag.csv"
        DiagnosticsWriter(path).close()
        raw = path.read_bytes()
        assert raw.splitlines()[0].decode() == ",".join(DIAGNOSTIC_COLUMNS)
        # RFC 4180 line endings survive in the raw bytes
        assert raw.endswith(b"\r\n")

    def test_empty_file_reads_empty_arrays(self, tmp_path):
        path = tmp_path / "diag.csv"
        DiagnosticsWriter(path).close()
        data = read_diagnostics(path)
        assert all(len(data[name]) == 0 for name in DIAGNOSTIC_COLUMNS)

    def test_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b,c\r\n1,2,3\r\n")
        with pytest.raises(ValueError):
            read_diagnostics(path)


class TestSnapshots:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "field.snp"
        rng = np.random.default_rng(5)
        values = rng.standard_normal((12, 12))
        save_field_snapshot(path, values, step=42, time=0.021, n_modes=32)
        back, meta = load_field_snapshot(path)
        np.testing.assert_array_equal(back, values)
        assert meta["step"] == 42
        assert meta["time"] == 0.021
        assert meta["n_modes"] == 32
        assert meta["half_extent"] == 0.5

    def test_one_dimensional_payload(self, tmp_path):
        path = tmp_path / "line.snp"
        values = np.linspace(-1.0, 1.0, 7)
        save_field_snapshot(path, values, step=0, time=0.0, n_modes=16)
        back, _ = load_field_snapshot(path)
        np.testing.assert_array_equal(back, values)

    def test_rejects_bad_magic(self, tmp_path):
        path = tmp_path / "bad.snp"
        save_field_snapshot(path, np.zeros((4, 4)), step=0, time=0.0, n_modes=8)
        raw = bytearray(path.read_bytes())
        raw[:8] = b"XXXXXXXX"
        path.write_bytes(bytes(raw))
        with pytest.raises(ValueError):
            load_field_snapshot(path)

    def test_rejects_truncated_payload(self, tmp_path):
        path = tmp_path / "short.snp"
        save_field_snapshot(path, np.zeros((4, 4)), step=0, time=0.0, n_modes=8)
        raw = path.read_bytes()
        path.write_bytes(raw[:-9])
        with pytest.raises(ValueError):
            load_field_snapshot(path)

    def test_csv_export(self, tmp_path):
        snap = tmp_path / "field.snp"
        out = tmp_path / "field.csv"
        values = np.arange(16.0).reshape(4, 4)
        save_field_snapshot(snap, values, step=1, time=0.5, n_modes=8)
        snapshot_to_csv(snap, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "x,y,value"
        assert len(lines) == 1 + 16
        # node (0, 0) sits at the box center by the grid convention
        first = lines[1].split(",")
        assert float(first[0]) == -0.5
        assert float(first[2]) == 0.0

    def test_csv_export_requires_2d(self, tmp_path):
        snap = tmp_path / "line.snp"
        save_field_snapshot(snap, np.zeros(5), step=0, time=0.0, n_modes=8)
        with pytest.raises(ValueError):
            snapshot_to_csv(snap, tmp_path / "line.csv")
