import json
from typing import Any

import numpy as np
from PIL import Image

from .base import ProbabilityGrid

PGM_MAX_VALUE = 65535
# Largest sample of each graymap mode Pillow reads. Pillow rescales other maximum values into these ranges.
_MODE_MAX_VALUES = {"L": 255, "I": PGM_MAX_VALUE, "I;16": PGM_MAX_VALUE, "I;16B": PGM_MAX_VALUE}


def write_pgm(grid: ProbabilityGrid, file_path: str) -> None:
    """
    Write the grid as a 16-bit binary portable graymap, one pixel per cell, scaled so the largest cell is white.

    Args:
        grid (ProbabilityGrid): grid to write. Any non-negative grid is accepted, including distance grids.
        file_path (str): the .pgm file path.
    """
    assert type(file_path) is str

    maximum = grid.values.max()
    scaled = np.zeros(grid.shape, np.int32)
    if maximum > 0:
        scaled = np.round(grid.values / maximum * PGM_MAX_VALUE).astype(np.int32)
    # Pillow writes 32-bit integer images as 16-bit binary graymaps.
    Image.fromarray(scaled).save(file_path, format="PPM")


def read_pgm(file_path: str, cell_size: float = 1.0) -> ProbabilityGrid:
    """
    Read a binary or plain graymap, like the ones `write_pgm` writes. Values are rescaled into `[0, 1]` by the file's
    maximum value.

    Args:
        file_path (str): the .pgm file path.
        cell_size (float, optional): pixels per cell of the returned grid. Default: 1.

    Returns:
        ProbabilityGrid: grid. The unnormalized grid.

    Raises:
        ValueError: the file is not a graymap.
    """
    with Image.open(file_path) as image:
        if image.format != "PPM" or image.mode not in _MODE_MAX_VALUES:
            raise ValueError(f"{file_path} is not a graymap, found a {image.format} image of mode {image.mode}")
        max_value = _MODE_MAX_VALUES[image.mode]
        raster = np.asarray(image, np.float64)
    return ProbabilityGrid(raster / max_value, cell_size)


def grid_to_json(grid: ProbabilityGrid) -> dict[str, Any]:
    return {
        "width": grid.width,
        "height": grid.height,
        "cell_size": grid.cell_size,
        "values": grid.values.tolist(),
    }


def grid_from_json(content: dict[str, Any] | str) -> ProbabilityGrid:
    """
    Args:
        content (dict or str): the dictionary from `grid_to_json`, or its JSON string.

    Returns:
        ProbabilityGrid: grid.
    """
    if type(content) is str:
        content = json.loads(content)
    values = np.array(content["values"], np.float64)
    if values.shape != (content["height"], content["width"]):
        raise ValueError(f"Grid values have shape {values.shape}, expected ({content['height']}, {content['width']})")
    return ProbabilityGrid(values, content["cell_size"])
