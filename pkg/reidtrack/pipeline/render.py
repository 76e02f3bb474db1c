import os

import numpy as np
import tqdm

from .. import log
from ..grid import io as grid_io
from ..grid.base import ProbabilityGrid
from ..measurement.base import DistanceGrid, distance_maps, softmin
from ..setup.config import Config
from ..simworld.base import FrameObservation, Scenario
from . import run


def measurement_overlay(scenario: Scenario, observation: FrameObservation, temperature: float) -> ProbabilityGrid:
    """
    The per cell maximum over every identity of its softmin measurement likelihood on one frame.
    """
    references = np.array([ident.embedding for ident in scenario.identities])
    references = references.reshape((-1, scenario.config.embedding_dim))
    cell_size = observation.embedding_map.cell_size
    if references.shape[0] == 0:
        return ProbabilityGrid(np.zeros(observation.embedding_map.values.shape[:2]), cell_size)
    distances = distance_maps(observation.embedding_map, references)
    likelihoods = [softmin(DistanceGrid(d, cell_size), temperature).values for d in distances]
    return ProbabilityGrid(np.max(likelihoods, axis=0), cell_size)


def render(config: Config) -> str:
    """
    Write every frame's measurement overlay of the configured scenario as a PGM image.

    Returns:
        str: frames_dir. Directory holding one `measurement_<frame>.pgm` per frame.
    """
    scenario = run.get_scenario(config)
    frames_dir = os.path.join(config["file_names"]["output_dir"], run.FRAMES_DIR_NAME, "measurement")
    os.makedirs(frames_dir, exist_ok=True)
    temperature = config["measurement"]["temperature"]
    for observation in tqdm.tqdm(scenario.frames, desc="Rendering measurements", unit="frame"):
        overlay = measurement_overlay(scenario, observation, temperature)
        grid_io.write_pgm(overlay, os.path.join(frames_dir, f"measurement_{observation.frame:05d}.pgm"))
    log.info(f"Measurement overlays written to {frames_dir}")
    return frames_dir
