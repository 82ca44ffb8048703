"""Run artifacts: diagnostics CSV and binary field snapshots.

Diagnostics are headered CSV (RFC 4180 quoting, CRLF rows) with one row
per sampled step.  Floats are written with repr precision so a read-back
reproduces the values bit for bit.

Snapshots use a little-endian binary container:

    offset  size  field
    0       8     magic "FPIFSNP1"
    8       4     format version (u32, currently 1)
    12      4     dtype tag (u32: 1 = float64)
    16      4     rank (u32)
    20      8*r   extent per axis (u64 each)
    ..      8     step index (u64)
    ..      4     mode count of the producing solver (u32)
    ..      4     reserved (u32, zero)
    ..      8     simulation time (f64)
    ..      8     box half extent (f64)
    ..      -     payload, C order, little-endian

The trailing metadata lets a reader reconstruct physical coordinates
without the producing configuration.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

__all__ = [
    "DIAGNOSTIC_COLUMNS",
    "DiagnosticsWriter",
    "read_diagnostics",
    "save_field_snapshot",
    "load_field_snapshot",
    "snapshot_to_csv",
]

DIAGNOSTIC_COLUMNS = (
    "step",
    "time",
    "kinetic",
    "field",
    "boundary",
    "momentum_x",
    "momentum_y",
    "momentum_norm",
    "charge_residual",
)

_SNAPSHOT_MAGIC = b"FPIFSNP1"
_SNAPSHOT_VERSION = 1
_DTYPE_TAGS = {1: np.dtype("<f8")}
_HEAD = struct.Struct("<8sIII")
_TAIL = struct.Struct("<QIIdd")


class DiagnosticsWriter:
    """Streams diagnostic rows to a CSV file, header written up front."""

    def __init__(self, path):
        self.path = Path(path)
        self._handle = open(self.path, "w", newline="")
        self._writer = csv.writer(self._handle, lineterminator="\r\n")
        self._writer.writerow(DIAGNOSTIC_COLUMNS)

    def append(self, step, time, kinetic, field, boundary, momentum, charge_residual):
        momentum = np.asarray(momentum, dtype=float)
        norm = float(np.hypot(momentum[0], momentum[1]))
        row = [int(step)] + [
            repr(float(v))
            for v in (
                time,
                kinetic,
                field,
                boundary,
                momentum[0],
                momentum[1],
                norm,
                charge_residual,
            )
        ]
        self._writer.writerow(row)

    def flush(self):
        self._handle.flush()

    def close(self):
        if not self._handle.closed:
            self._handle.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def read_diagnostics(path) -> dict:
    """Read a diagnostics CSV into arrays keyed by column name."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader))
        if header != DIAGNOSTIC_COLUMNS:
            raise ValueError(f"unrecognized diagnostics header {header}")
        rows = [row for row in reader if row]
    if not rows:
        return {name: np.array([]) for name in DIAGNOSTIC_COLUMNS}
    table = np.array(rows, dtype=float)
    out = {name: table[:, i] for i, name in enumerate(DIAGNOSTIC_COLUMNS)}
    out["step"] = out["step"].astype(np.int64)
    return out


def save_field_snapshot(path, values, *, step, time, n_modes, half_extent=0.5):
    values = np.ascontiguousarray(values, dtype="<f8")
    head = _HEAD.pack(_SNAPSHOT_MAGIC, _SNAPSHOT_VERSION, 1, values.ndim)
    dims = struct.pack(f"<{values.ndim}Q", *values.shape)
    tail = _TAIL.pack(int(step), int(n_modes), 0, float(time), float(half_extent))
    with open(path, "wb") as handle:
        handle.write(head)
        handle.write(dims)
        handle.write(tail)
        handle.write(values.tobytes())


def load_field_snapshot(path):
    """Return (values, metadata dict) from a snapshot container."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEAD.size:
        raise ValueError("snapshot file is truncated")
    magic, version, tag, rank = _HEAD.unpack_from(raw, 0)
    if magic != _SNAPSHOT_MAGIC:
        raise ValueError("not a field snapshot file")
    if version != _SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    if tag not in _DTYPE_TAGS:
        raise ValueError(f"unknown dtype tag {tag}")
    offset = _HEAD.size
    if len(raw) < offset + 8 * rank + _TAIL.size:
        raise ValueError("snapshot file is truncated")
    shape = struct.unpack_from(f"<{rank}Q", raw, offset)
    offset += 8 * rank
    step, n_modes, _, time, half_extent = _TAIL.unpack_from(raw, offset)
    offset += _TAIL.size
    dtype = _DTYPE_TAGS[tag]
    count = int(np.prod(shape, dtype=np.int64))
    if len(raw) != offset + count * dtype.itemsize:
        raise ValueError("snapshot payload size does not match header")
    values = np.frombuffer(raw, dtype=dtype, count=count, offset=offset)
    meta = {
        "step": step,
        "time": time,
        "n_modes": n_modes,
        "half_extent": half_extent,
    }
    return values.reshape(shape).copy(), meta


def snapshot_to_csv(snapshot_path, csv_path):
    """Export a 2D snapshot as headered x,y,value rows."""
    values, meta = load_field_snapshot(snapshot_path)
    if values.ndim != 2:
        raise ValueError("CSV export requires a 2D snapshot")
    n0, n1 = values.shape
    h = meta["half_extent"]
    x = (np.arange(n0) - n0 // 2) * (2.0 * h / n0)
    y = (np.arange(n1) - n1 // 2) * (2.0 * h / n1)
    with open(csv_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(["x", "y", "value"])
        for i in range(n0):
            for j in range(n1):
                writer.writerow(
                    [repr(float(x[i])), repr(float(y[j])), repr(float(values[i, j]))]
                )
