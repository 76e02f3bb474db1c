import json
import os
from typing import Any

import numpy as np
import pandas as pd

from ..bboxreg.base import OutputBox

# Box tables hold one `(x, y, w, h)` box per row, `(x, y)` being the box centre in pixels.
BOX_COLUMNS = ("frame", "id", "x", "y", "w", "h")


def empty_table() -> pd.DataFrame:
    table = pd.DataFrame({column: [] for column in BOX_COLUMNS})
    return table.astype({"frame": np.int64, "id": np.int64, "x": float, "y": float, "w": float, "h": float})


def boxes_to_table(boxes: list[OutputBox]) -> pd.DataFrame:
    """
    Build a box table sorted by frame then id.
    """
    if len(boxes) == 0:
        return empty_table()
    table = pd.DataFrame([box.to_row() for box in boxes], columns=list(BOX_COLUMNS))
    table = table.astype({"frame": np.int64, "id": np.int64, "x": float, "y": float, "w": float, "h": float})
    return table.sort_values(["frame", "id"], kind="stable").reset_index(drop=True)


def write_boxes(table: pd.DataFrame, path: str) -> None:
    """
    Write a box table as a CSV with a `frame,id,x,y,w,h` header.
    """
    assert tuple(table.columns) == BOX_COLUMNS, f"Unexpected columns {tuple(table.columns)}"
    table.to_csv(path, index=False)


def read_boxes(path: str) -> pd.DataFrame:
    """
    Read a box table CSV written by `write_boxes`.

    Raises:
        FileNotFoundError: no file at path.
        ValueError: the CSV has the wrong columns or duplicate (frame, id) rows.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"No box table at {path}")
    table = pd.read_csv(path)
    if tuple(table.columns) != BOX_COLUMNS:
        raise ValueError(f"{path} has columns {tuple(table.columns)}, expected {BOX_COLUMNS}")
    table = table.astype({"frame": np.int64, "id": np.int64, "x": float, "y": float, "w": float, "h": float})
    if table.duplicated(["frame", "id"]).any():
        raise ValueError(f"{path} has more than one box for an id on the same frame")
    return table


def write_metrics(metrics: dict[str, Any], path: str) -> None:
    with open(path, "w") as file:
        json.dump(metrics, file, indent=4, sort_keys=True)
        file.write("\n")


def read_metrics(path: str) -> dict[str, Any]:
    with open(path, "r") as file:
        return json.load(file)
