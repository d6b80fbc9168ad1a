"""Schema-checked readers for squeeze-sim output bundles.

Every CSV starts with the versioned header line followed by a column-name
line; the manifest JSON carries the same schema tag and the list of files
it references.  All validation failures raise SchemaMismatch or
MissingColumn so callers can fail loudly instead of plotting garbage.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

SCHEMA_LINE = "# squeeze-sim schema v1"


class SchemaMismatch(Exception):
    """Input file is not a valid schema-v1 artifact."""


class MissingColumn(Exception):
    """A required column is absent from a CSV."""


def read_table(path, required: tuple[str, ...] = ()) -> dict[str, np.ndarray]:
    """CSV -> {column name: 1-D array}, validating header and columns."""
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        columns_line = fh.readline().rstrip("\n")
    if header != SCHEMA_LINE:
        raise SchemaMismatch(f"{path}: first line {header!r}, expected {SCHEMA_LINE!r}")
    columns = columns_line.split(",")
    for name in required:
        if name not in columns:
            raise MissingColumn(f"{path}: column {name!r} not in {columns}")
    data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    if data.size and data.shape[1] != len(columns):
        raise SchemaMismatch(
            f"{path}: {data.shape[1]} data columns for {len(columns)} names")
    return {name: data[:, i] for i, name in enumerate(columns)}


def read_manifest(path) -> dict:
    """Manifest JSON, validated; every referenced file must exist."""
    path = Path(path)
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: not valid JSON ({exc})") from exc
    if manifest.get("schema") != "squeeze-sim schema v1":
        raise SchemaMismatch(f"{path}: schema tag {manifest.get('schema')!r}")
    for key in ("figure", "files", "derived"):
        if key not in manifest:
            raise SchemaMismatch(f"{path}: missing manifest key {key!r}")
    for name in manifest["files"]:
        if not (path.parent / name).exists():
            raise SchemaMismatch(f"{path}: referenced file {name!r} does not exist")
    return manifest


def read_wigner(csv_path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Long-format Wigner CSV + JSON axes sidecar -> (x, y, values[ny, nx])."""
    csv_path = Path(csv_path)
    table = read_table(csv_path, required=("x", "y", "value"))
    meta_path = csv_path.with_suffix(".json")
    try:
        meta = json.loads(meta_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaMismatch(f"{meta_path}: unreadable axes sidecar ({exc})") from exc
    if meta.get("schema") != "squeeze-sim schema v1":
        raise SchemaMismatch(f"{meta_path}: schema tag {meta.get('schema')!r}")
    nx, ny = int(meta["x"]["n"]), int(meta["y"]["n"])
    if len(table["value"]) != nx * ny:
        raise SchemaMismatch(
            f"{csv_path}: {len(table['value'])} rows for a {nx}x{ny} grid")
    x = np.linspace(meta["x"]["min"], meta["x"]["max"], nx)
    y = np.linspace(meta["y"]["min"], meta["y"]["max"], ny)
    return x, y, table["value"].reshape(ny, nx)
