from typing import Optional, Tuple

import numpy as np

from .. import log
from ..bboxreg.base import BBoxRegressor, NonPositiveHeightError, OutputBox
from ..grid.base import ProbabilityGrid
from ..measurement.base import DistanceGrid, EmbeddingMap, distance_maps
from . import base
from .base import FilterParameters, TrackState


class IntegratedTracker:
    """
    Runs one histogram filter per track over a sequence of embedding maps. Tracks never interact, there is no data
    association: each track is measured by its own distance map.

    Every frame, each active track is predicted, updated, has its velocity measured and finally emits a box.
    """

    width: int
    height: int
    cell_size: float
    params: FilterParameters
    regressor: BBoxRegressor
    force_cpu: bool
    tracks: list[TrackState]

    _next_id: int

    def __init__(
        self,
        width: int,
        height: int,
        cell_size: float,
        params: FilterParameters,
        regressor: BBoxRegressor,
        force_cpu: bool = True,
    ) -> None:
        """
        Args:
            width (int): grid width in cells.
            height (int): grid height in cells.
            cell_size (float): pixels per cell.
            params (FilterParameters): per-track filter parameters.
            regressor (BBoxRegressor): the camera's box regressor.
            force_cpu (bool, optional): compute distance maps on the CPU only. Default: true.
        """
        assert width > 0 and height > 0
        assert cell_size > 0
        self.width = width
        self.height = height
        self.cell_size = cell_size
        self.params = params
        self.regressor = regressor
        self.force_cpu = force_cpu
        self.tracks = []
        self._next_id = 0

    @property
    def active_tracks(self) -> list[TrackState]:
        return [t for t in self.tracks if t.is_active]

    def start_track(self, start_center: Tuple[float, float], reference_embedding: np.ndarray, frame: int) -> int:
        """
        Start a new track. It is not predicted on its start frame, only updated.

        Returns:
            int: track_id. A fresh id, never reused within the tracker.
        """
        t = base.init_track(
            self._next_id,
            start_center,
            reference_embedding,
            self.width,
            self.height,
            self.cell_size,
            self.params,
            start_frame=frame,
        )
        self._next_id += 1
        self.tracks.append(t)
        log.debug(f"Started integrated track {t.id} at {start_center} on frame {frame}")
        return t.id

    def step(self, frame: int, embedding_map: EmbeddingMap) -> list[OutputBox]:
        """
        Advance every active track by one frame.

        Args:
            frame (int): frame index.
            embedding_map (EmbeddingMap): the frame's embedding map.

        Returns:
            list of OutputBox: boxes. One box for each active track whose latest accepted measurement is at most
                `emit_max_missed` frames old.
        """
        assert embedding_map.height == self.height and embedding_map.width == self.width

        updated_tracks = []
        predicted = []
        for t in self.tracks:
            if not t.is_active:
                updated_tracks.append(t)
                continue
            if t.start_frame != frame:
                t = base.predict(t, self.params)
            predicted.append(t)

        still_active = [t for t in predicted if t.is_active]
        references = np.array([t.reference_embedding for t in still_active]).reshape((-1, embedding_map.dim))
        distances = distance_maps(embedding_map, references, self.force_cpu)
        distance_index = {t.id: i for i, t in enumerate(still_active)}

        boxes = []
        for t in predicted:
            if t.is_active:
                t = base.update_with_distances(
                    t, DistanceGrid(distances[distance_index[t.id]], self.cell_size), self.params
                )
                t = base.measure_velocity(t, self.params)
            if not t.is_active:
                log.debug(f"Integrated track {t.id} died on frame {frame} ({t.last_update})")
            elif t.frames_since_accepted_measurement <= self.params.emit_max_missed:
                try:
                    boxes.append(base.emit(t, self.regressor, self.params.output_mode, frame))
                except NonPositiveHeightError as e:
                    log.debug(f"Integrated track {t.id} emits no box on frame {frame}: {e}")
            updated_tracks.append(t)

        self.tracks = sorted(updated_tracks, key=lambda t: t.id)
        return boxes

    def summed_posterior(self) -> Optional[ProbabilityGrid]:
        """
        The sum of every active track's position belief, for qualitative dumps. None without active tracks.
        """
        active = self.active_tracks
        if len(active) == 0:
            return None
        return ProbabilityGrid(np.sum([t.position_belief.values for t in active], axis=0), self.cell_size)
