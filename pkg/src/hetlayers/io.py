"""Artifact files: profile CSVs, strip-field files, JSON reports.

Formats
-------
Profile CSV: header ``x,u1,...,um``, one row per node, ``%.17g`` floats
(lossless float64 round trip).

Field file: first line ``m n_t n_x T L order=<2|4>[ fmt=bin]``, then either
CSV rows ``t,x,u1,...,um`` in row-major order or, for the binary variant,
raw little-endian float64 values.

JSON reports are dumped with sorted keys; non-finite floats become null.
"""

from __future__ import annotations

import json
import hashlib
from pathlib import Path
from typing import Tuple

import numpy as np

from .grids import Grid1D, Grid2D
from .heteroclinic import Path1D
from .layer2d import Field2D

FLOAT_FMT = "%.17g"


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def write_profile_csv(path, grid: Grid1D, values: np.ndarray) -> None:
    values = np.asarray(values)
    m = values.shape[1]
    lines = ["x," + ",".join(f"u{k + 1}" for k in range(m))]
    for xj, row in zip(grid.nodes(), values):
        lines.append(",".join([_fmt(xj)] + [_fmt(v) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_profile_csv(path) -> Path1D:
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    if header[0] != "x":
        raise ValueError(f"{path}: line 1: expected profile header starting with 'x'")
    data = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[1:]])
    x = data[:, 0]
    L = -x[0]
    n = x.shape[0]
    grid = Grid1D(L, n)
    if not np.allclose(x, grid.nodes(), rtol=0, atol=1e-9 * max(1.0, L)):
        raise ValueError(f"{path}: x column is not the uniform grid it claims")
    return Path1D(grid, data[:, 1:])


def write_field(path, field: Field2D, order: int = 2, binary: bool = False) -> None:
    g = field.grid
    m = field.m
    header = (f"{m} {g.n_t} {g.n_x} {_fmt(g.half_length_t)} {_fmt(g.half_length_x)} "
              f"order={order}")
    if binary:
        with open(path, "wb") as fh:
            fh.write((header + " fmt=bin\n").encode("ascii"))
            fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
        return
    t_nodes = g.t_nodes()
    x_nodes = g.x_nodes()
    lines = [header]
    for i in range(g.n_t):
        ti = _fmt(t_nodes[i])
        for j in range(g.n_x):
            row = field.values[i, j]
            lines.append(",".join([ti, _fmt(x_nodes[j])] + [_fmt(v) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_field(path) -> Tuple[Field2D, int]:
    """Read a field file; returns (field, order)."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").strip()
        tokens = header.split()
        if len(tokens) < 5:
            raise ValueError(f"{path}: line 1: malformed field header")
        m, n_t, n_x = int(tokens[0]), int(tokens[1]), int(tokens[2])
        T, L = float(tokens[3]), float(tokens[4])
        order = 2
        binary = False
        for tok in tokens[5:]:
            if tok.startswith("order="):
                order = int(tok.split("=", 1)[1])
            elif tok == "fmt=bin":
                binary = True
            else:
                raise ValueError(f"{path}: line 1: unknown header token {tok!r}")
        grid = Grid2D(T, L, n_t, n_x)
        if binary:
            raw = fh.read(n_t * n_x * m * 8)
            vals = np.frombuffer(raw, dtype="<f8").reshape(n_t, n_x, m).copy()
            return Field2D(grid, vals), order
        body = fh.read().decode("ascii").strip().splitlines()
    if len(body) != n_t * n_x:
        raise ValueError(f"{path}: expected {n_t * n_x} data rows, got {len(body)}")
    vals = np.empty((n_t, n_x, m))
    for idx, ln in enumerate(body):
        toks = ln.split(",")
        if len(toks) != 2 + m:
            raise ValueError(f"{path}: line {idx + 2}: expected {2 + m} fields")
        vals[idx // n_x, idx % n_x] = [float(v) for v in toks[2:]]
    return Field2D(grid, vals), order


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(_json_safe(payload), sort_keys=True, indent=2) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
