"""Field CSV serialization: header index_1..index_d,value, one site per row."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from src.lattice.grid import Boundary, Field, Grid

HASH_PREFIX = "# config_hash="


def field_frame(field: Field) -> pd.DataFrame:
    coords = field.grid.coordinates()
    columns = {f"index_{k + 1}": coords[:, k] for k in range(field.grid.dimension)}
    columns["value"] = field.vector
    return pd.DataFrame(columns)


def write_csv_with_hash(path: Path, frame: pd.DataFrame, config_hash: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"{HASH_PREFIX}{config_hash}\n")
        frame.to_csv(fh, index=False, float_format="%.17g")


def read_csv_with_hash(path: Path) -> tuple[pd.DataFrame, str]:
    with path.open(encoding="utf-8") as fh:
        first = fh.readline().strip()
    config_hash = first[len(HASH_PREFIX):] if first.startswith(HASH_PREFIX) else ""
    return pd.read_csv(path, comment="#"), config_hash


def write_field_csv(path: Path, field: Field, config_hash: str) -> None:
    write_csv_with_hash(path, field_frame(field), config_hash)


def read_field_csv(path: Path, boundary: Boundary = Boundary.ZERO) -> tuple[Field, str]:
    """Rebuild the grid from the index columns; rows may come in any order."""
    frame, config_hash = read_csv_with_hash(path)
    index_cols = [c for c in frame.columns if c.startswith("index_")]
    if not index_cols or "value" not in frame.columns:
        raise ValueError(f"{path} is not a field CSV (columns: {list(frame.columns)})")
    coords = frame[index_cols].to_numpy(dtype=int)
    half_width = int(np.max(np.abs(coords)))
    grid = Grid(len(index_cols), half_width, boundary)
    values = np.zeros(grid.shape)
    values[tuple((coords + half_width).T)] = frame["value"].to_numpy(dtype=float)
    return Field(grid, values), config_hash
