"""Deterministic CSV and manifest writers."""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

FLOAT_FMT = "%.17g"
SERIES_HEADER = ("t", "norm", "x_cm", "x_peak", "S_rho")
FIELD_HEADER = ("x", "re", "im", "density")


def _fmt(v) -> str:
    return FLOAT_FMT % v


def write_columns(path, header, columns) -> Path:
    """Write equal-length columns as CSV with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    if data.shape[1] != len(header):
        raise ValueError("header and column count differ")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, data, fmt=FLOAT_FMT, delimiter=",")
    return path


def write_series(path, t, norm, x_cm, x_peak, s_rho) -> Path:
    return write_columns(path, SERIES_HEADER, [t, norm, x_cm, x_peak, s_rho])


def write_field(path, psi) -> Path:
    v = psi.values
    return write_columns(path, FIELD_HEADER, [psi.grid.x, v.real, v.imag, psi.density])


def write_map(path, row_name, row_axis, col_name, col_axis, values) -> Path:
    """Two header lines give the row and column axes; values follow row-major."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    values = np.asarray(values, dtype=float)
    if values.shape != (len(row_axis), len(col_axis)):
        raise ValueError("map shape does not match its axes")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(row_name + "," + ",".join(_fmt(v) for v in row_axis) + "\n")
        fh.write(col_name + "," + ",".join(_fmt(v) for v in col_axis) + "\n")
        np.savetxt(fh, values, fmt=FLOAT_FMT, delimiter=",")
    return path


def read_map(path):
    """Inverse of :func:`write_map`: ``(row_axis, col_axis, values)``."""
    with open(path, encoding="utf-8") as fh:
        rows = np.array(fh.readline().strip().split(",")[1:], dtype=float)
        cols = np.array(fh.readline().strip().split(",")[1:], dtype=float)
        values = np.loadtxt(fh, delimiter=",", ndmin=2)
    return rows, cols, values


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def file_inventory(out_dir, paths) -> list[dict]:
    out_dir = Path(out_dir)
    inv = []
    for p in sorted(Path(p) for p in paths):
        inv.append({"path": str(p.relative_to(out_dir)), "bytes": p.stat().st_size,
                    "sha256": sha256(p)})
    return inv


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n",
                   encoding="utf-8")
    os.replace(tmp, path)
    return path


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
