import math
from typing import Optional, Tuple

import numpy as np

from .. import log
from ..bboxreg.base import BBoxRegressor, NonPositiveHeightError, OutputBox
from ..kalman.base import KFState, init_state, kf_predict, kf_update
from .base import AssociationConfig, Detection, TrackManagementConfig, associate, hungarian


class KalmanTrack:
    """
    A detection driven track.

    Attributes:
        id (int): track id, never reused within a world.
        state (KFState): constant velocity Kalman state.
        reference_embedding (`(dim) ndarray[float]` or none): appearance of the track's first observation.
        misses (int): consecutive frames without a matched detection.
        hits (int): number of matched detections, including the starting one.
    """

    id: int
    state: KFState
    reference_embedding: Optional[np.ndarray]
    misses: int
    hits: int

    def __init__(self, id: int, state: KFState, reference_embedding: Optional[np.ndarray]) -> None:
        self.id = id
        self.state = state
        self.reference_embedding = reference_embedding
        self.misses = 0
        self.hits = 1

    @property
    def position(self) -> Tuple[float, float]:
        return self.state.position


class TentativeChain:
    """
    Consecutive high scoring detections that may become a track.
    """

    position: Tuple[float, float]
    length: int
    reference_embedding: Optional[np.ndarray]

    def __init__(self, detection: Detection) -> None:
        self.position = detection.center
        self.length = 1
        self.reference_embedding = detection.embedding


class TrackerWorld:
    """
    Every track and tentative chain of one sequence, plus the Kalman noise settings shared by all tracks.

    Attributes:
        tracks (list of KalmanTrack): live tracks.
        chains (list of TentativeChain): detection chains not yet promoted to tracks.
        Q (`(4 x 4) ndarray[float]`): process noise covariance.
        R (`(2 x 2) ndarray[float]`): measurement noise covariance.
        p_init_diag (tuple of four floats): initial state variances of a new track.
        frame (int): the last stepped frame, -1 before the first step.
    """

    tracks: list[KalmanTrack]
    chains: list[TentativeChain]
    Q: np.ndarray
    R: np.ndarray
    p_init_diag: Tuple[float, ...]
    frame: int

    _next_id: int

    def __init__(self, Q: np.ndarray, R: np.ndarray, p_init_diag: Tuple[float, ...]) -> None:
        assert Q.shape == (4, 4)
        assert R.shape == (2, 2)
        self.tracks = []
        self.chains = []
        self.Q = Q
        self.R = R
        self.p_init_diag = tuple(p_init_diag)
        self.frame = -1
        self._next_id = 0

    def start_track(self, center: Tuple[float, float], reference_embedding: Optional[np.ndarray]) -> KalmanTrack:
        track = KalmanTrack(self._next_id, init_state(center, self.p_init_diag), reference_embedding)
        self._next_id += 1
        self.tracks.append(track)
        log.debug(f"Started track {track.id} at ({center[0]:.1f}, {center[1]:.1f}) on frame {self.frame}")
        return track


def step(
    world: TrackerWorld,
    detections: list[Detection],
    tm: TrackManagementConfig,
    ac: AssociationConfig,
    frame: int,
    gt_starts: Optional[list[Tuple[Tuple[float, float], Optional[np.ndarray]]]] = None,
) -> TrackerWorld:
    """
    Advance the world by one frame: predict every track, associate the frame's detections, update matched tracks,
    delete tracks missed for too long and start new tracks.

    Args:
        world (TrackerWorld): the world, modified in place.
        detections (list of Detection): the frame's detections.
        tm (TrackManagementConfig): track management config.
        ac (AssociationConfig): association config.
        frame (int): the frame index.
        gt_starts (list of tuple, optional): `(center, reference embedding)` of every ground truth track that begins
            on this frame. Only used when `tm.gt_init` is true. Default: none.

    Returns:
        TrackerWorld: world. The same world.
    """
    assert all([detection.frame == frame for detection in detections]), "Detections must be from the stepped frame"
    world.frame = frame

    for track in world.tracks:
        track.state = kf_predict(track.state, world.Q)

    usable = [detection for detection in detections if detection.score >= tm.sigma_cont]
    matches, unmatched_tracks, unmatched_detections = associate(world.tracks, usable, ac)

    for i, j in matches:
        track = world.tracks[i]
        track.state = kf_update(track.state, np.array(usable[j].center), world.R)
        track.misses = 0
        track.hits += 1

    kept_tracks = []
    for i, track in enumerate(world.tracks):
        if i in unmatched_tracks:
            track.misses += 1
        if track.misses > tm.d_miss:
            log.debug(f"Deleted track {track.id} on frame {frame} after {track.misses} misses")
            continue
        kept_tracks.append(track)
    world.tracks = kept_tracks

    if tm.gt_init:
        for center, reference_embedding in gt_starts or []:
            world.start_track(center, reference_embedding)
        return world

    candidates = [usable[j] for j in unmatched_detections if usable[j].score >= tm.sigma_init]
    _extend_chains(world, candidates, tm, ac)
    return world


def _extend_chains(
    world: TrackerWorld, candidates: list[Detection], tm: TrackManagementConfig, ac: AssociationConfig
) -> None:
    # Chains continue only onto a detection within the gate in position, otherwise they are dropped.
    size = max(len(world.chains), len(candidates))
    cost = np.full((size, size), 10 * ac.gate, np.float64)
    for i, chain in enumerate(world.chains):
        for j, detection in enumerate(candidates):
            cost[i, j] = min(math.dist(chain.position, detection.center) / ac.n_pos, cost[i, j])

    new_chains = []
    chained = set()
    for i, j in hungarian(cost):
        if i < len(world.chains) and j < len(candidates) and cost[i, j] <= ac.gate:
            chain = world.chains[i]
            chain.position = candidates[j].center
            chain.length += 1
            new_chains.append(chain)
            chained.add(j)
    for j, detection in enumerate(candidates):
        if j not in chained:
            new_chains.append(TentativeChain(detection))

    world.chains = []
    for chain in new_chains:
        if chain.length >= tm.d_init:
            world.start_track(chain.position, chain.reference_embedding)
        else:
            world.chains.append(chain)


def emit_boxes(world: TrackerWorld, regressor: BBoxRegressor, tm: TrackManagementConfig) -> list[OutputBox]:
    """
    Output boxes of the current frame: every track missed for at most `emit_max_missed` frames, centred on its Kalman
    position with a regressed size. Positions where the regressor has no positive height are skipped.
    """
    boxes = []
    for track in world.tracks:
        if track.misses > tm.emit_max_missed:
            continue
        try:
            width, height = regressor.regress(track.position)
        except NonPositiveHeightError as e:
            log.debug(f"Track {track.id} emits no box on frame {world.frame}: {e}")
            continue
        boxes.append(OutputBox(track.id, world.frame, track.position, width, height))
    return boxes
