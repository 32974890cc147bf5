"""Dataset loading and schema checks for the published CSV/meta files."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """A dataset file does not carry the columns a recipe requires."""


def load_dataset(data_dir: Path, figure_id: str) -> tuple[dict, dict]:
    """Load ``fig<id>.csv`` and its ``.meta.json`` sidecar.

    Returns (columns, meta); columns maps names to float arrays.
    """
    csv_path = Path(data_dir) / f"{figure_id}.csv"
    if not csv_path.exists():
        raise FileNotFoundError(f"dataset file not found: {csv_path}")
    with csv_path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise SchemaError(f"{csv_path} is empty")
        rows = list(reader)
    columns = {
        name: np.array([float(row[i]) for row in rows])
        for i, name in enumerate(header)
    }
    meta_path = csv_path.with_name(f"{figure_id}.meta.json")
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    return columns, meta


def require_columns(columns: dict, needed: tuple[str, ...], figure_id: str) -> None:
    for name in needed:
        if name not in columns:
            raise SchemaError(
                f"dataset for {figure_id} lacks required column '{name}'"
            )


def grid_reshape(columns: dict, outer: str, inner: str, names: tuple[str, ...]):
    """Reshape row-major long columns onto the (outer, inner) grid.

    Returns (outer_axis, inner_axis, {name: 2-d array}).
    """
    outer_vals = np.unique(columns[outer])
    inner_vals = np.unique(columns[inner])
    shape = (outer_vals.size, inner_vals.size)
    total = columns[outer].size
    if shape[0] * shape[1] != total:
        raise SchemaError(
            f"columns '{outer}' x '{inner}' do not form a full grid "
            f"({shape[0]}x{shape[1]} != {total} rows)"
        )
    grids = {name: columns[name].reshape(shape) for name in names}
    return outer_vals, inner_vals, grids
