import copy
from typing import Optional, Tuple

import filterpy.kalman
import numpy as np
from typing_extensions import Self

from ..bboxreg.base import BBoxRegressor, OutputBox
from ..grid import kernel
from ..grid.base import (
    ProbabilityGrid,
    ZeroMassError,
    expectation,
    map_peak,
    multiply_update,
    probability_grid_from_gaussian,
)
from ..measurement.base import DistanceGrid, EmbeddingMap, distance_map, gate_entropy, gate_missing, softmin
from ..setup.config import Config


class OutOfBoundsError(ValueError):
    """
    Raised when a track is started outside of the grid.
    """


class GaussianBelief2D:
    """
    Gaussian velocity belief.

    Attributes:
        mean (`(2) ndarray[float64]`): `(vx, vy)` in pixels per frame.
        covariance (`(2 x 2) ndarray[float64]`): symmetric positive-definite, in squared pixels per frame.
    """

    mean: np.ndarray
    covariance: np.ndarray

    def __init__(self, mean: np.ndarray, covariance: np.ndarray) -> None:
        self.mean = np.asarray(mean, np.float64).copy()
        self.covariance = np.asarray(covariance, np.float64).copy()
        assert self.mean.shape == (2,)
        assert self.covariance.shape == (2, 2)


class FilterParameters:
    """
    Every setting of the integrated tracker's per-track filter. Distances are in pixels unless stated otherwise.
    """

    sigma_init: float
    velocity_init_sigma: float
    q_pos_sigma: float
    q_vel_sigma: float
    r_vel_sigma: float
    d_max_missed: int
    emit_max_missed: int
    output_mode: str
    count_entropy_rejections: bool
    temperature: float
    # None disables the gate.
    n_app: Optional[float]
    entropy_fraction: Optional[float]
    kernel_sigma_cutoff: float

    def __init__(
        self,
        sigma_init: float = 2.0,
        velocity_init_sigma: float = 4.0,
        q_pos_sigma: float = 4.0,
        q_vel_sigma: float = 0.5,
        r_vel_sigma: float = 2.0,
        d_max_missed: int = 90,
        emit_max_missed: int = 5,
        output_mode: str = "peak",
        count_entropy_rejections: bool = True,
        temperature: float = 0.1,
        n_app: Optional[float] = None,
        entropy_fraction: Optional[float] = None,
        kernel_sigma_cutoff: float = 3.0,
    ) -> None:
        assert output_mode in ("peak", "expectation"), f"Unknown output mode {output_mode}"
        assert velocity_init_sigma > 0
        assert temperature > 0
        self.sigma_init = sigma_init
        self.velocity_init_sigma = velocity_init_sigma
        self.q_pos_sigma = q_pos_sigma
        self.q_vel_sigma = q_vel_sigma
        self.r_vel_sigma = r_vel_sigma
        self.d_max_missed = d_max_missed
        self.emit_max_missed = emit_max_missed
        self.output_mode = output_mode
        self.count_entropy_rejections = count_entropy_rejections
        self.temperature = temperature
        self.n_app = n_app
        self.entropy_fraction = entropy_fraction
        self.kernel_sigma_cutoff = kernel_sigma_cutoff

    @classmethod
    def from_config(cls, config: Config, n_app: Optional[float], entropy_fraction: Optional[float]) -> Self:
        """
        Gather the filter parameters from a loaded config.

        Args:
            config (Config): the loaded config.
            n_app (float or none): the missing measurement threshold, calibrated by the caller when not configured.
                None disables the gate.
            entropy_fraction (float or none): the entropy gate fraction, calibrated by the caller when not configured.
                None disables the gate.
        """
        config_filter = config["histfilter"]
        return cls(
            sigma_init=config_filter["sigma_init"],
            velocity_init_sigma=config_filter["velocity_init_sigma"],
            q_pos_sigma=config_filter["q_pos_sigma"],
            q_vel_sigma=config_filter["q_vel_sigma"],
            r_vel_sigma=config_filter["r_vel_sigma"],
            d_max_missed=config_filter["d_max_missed"],
            emit_max_missed=config_filter["emit_max_missed"],
            output_mode=config_filter["output_mode"],
            count_entropy_rejections=config_filter["count_entropy_rejections"],
            temperature=config["measurement"]["temperature"],
            n_app=n_app,
            entropy_fraction=entropy_fraction,
            kernel_sigma_cutoff=config["grid"]["kernel_sigma_cutoff"],
        )


class TrackState:
    """
    The belief of one integrated track.

    Attributes:
        id (int): track id.
        position_belief (ProbabilityGrid): normalized position belief while active.
        velocity_belief (GaussianBelief2D): velocity belief.
        reference_embedding (`(dim) ndarray[float]`): the embedding the track's measurements are compared against,
            fixed at initialisation.
        status (str): "active" or "dead". A dead track never becomes active again.
        frames_since_accepted_measurement (int): consecutive frames without an accepted measurement.
        prev_peak (tuple of two floats or none): `(x, y)` pixel position of the previous accepted posterior's peak.
        last_update (str or none): outcome of the latest update, one of "accepted", "missing", "entropy" or
            "vanished". None before the first update.
        start_frame (int): the frame the track was started on.
    """

    ACTIVE = "active"
    DEAD = "dead"
    UPDATE_ACCEPTED = "accepted"
    UPDATE_MISSING = "missing"
    UPDATE_ENTROPY = "entropy"
    UPDATE_VANISHED = "vanished"

    id: int
    position_belief: ProbabilityGrid
    velocity_belief: GaussianBelief2D
    reference_embedding: np.ndarray
    status: str
    frames_since_accepted_measurement: int
    prev_peak: Optional[Tuple[float, float]]
    last_update: Optional[str]
    start_frame: int

    def __init__(
        self,
        id: int,
        position_belief: ProbabilityGrid,
        velocity_belief: GaussianBelief2D,
        reference_embedding: np.ndarray,
        start_frame: int = 0,
    ) -> None:
        self.id = int(id)
        self.position_belief = position_belief
        self.velocity_belief = velocity_belief
        self.reference_embedding = np.asarray(reference_embedding, np.float64).copy()
        self.reference_embedding.flags.writeable = False
        self.status = self.ACTIVE
        self.frames_since_accepted_measurement = 0
        self.prev_peak = None
        self.last_update = None
        self.start_frame = int(start_frame)

    @property
    def is_active(self) -> bool:
        return self.status == self.ACTIVE

    def replace(self, **changes) -> Self:
        """
        A copy of the state with the given attributes changed. Grids and the reference embedding are immutable, so
        they are shared.
        """
        new_state = copy.copy(self)
        new_state.velocity_belief = GaussianBelief2D(self.velocity_belief.mean, self.velocity_belief.covariance)
        for name, value in changes.items():
            assert hasattr(new_state, name), f"TrackState has no attribute {name}"
            setattr(new_state, name, value)
        return new_state


def init_track(
    id: int,
    start_center: Tuple[float, float],
    reference_embedding: np.ndarray,
    width: int,
    height: int,
    cell_size: float,
    params: FilterParameters,
    start_frame: int = 0,
) -> TrackState:
    """
    Start a track on a known position, like the first box of a ground truth track.

    Args:
        id (int): track id.
        start_center (tuple of two floats): `(x, y)` start position in pixels.
        reference_embedding (`(dim) ndarray[float]`): the track's reference embedding.
        width (int): grid width in cells.
        height (int): grid height in cells.
        cell_size (float): pixels per cell.
        params (FilterParameters): filter parameters.
        start_frame (int, optional): the frame the track starts on. Default: 0.

    Returns:
        TrackState: track. An isotropic Gaussian position belief of `sigma_init` cells around the start and a zero mean
            velocity belief.

    Raises:
        OutOfBoundsError: the start position is outside of the grid.
    """
    x, y = float(start_center[0]), float(start_center[1])
    if not (0 <= x < width * cell_size and 0 <= y < height * cell_size):
        raise OutOfBoundsError(
            f"Track start ({x}, {y}) is outside of the {width * cell_size}x{height * cell_size} pixel grid"
        )

    position_belief = probability_grid_from_gaussian(width, height, cell_size, (x, y), params.sigma_init)
    velocity_belief = GaussianBelief2D(np.zeros(2), np.eye(2) * params.velocity_init_sigma**2)
    return TrackState(id, position_belief, velocity_belief, reference_embedding, start_frame)


def predict(t: TrackState, params: FilterParameters) -> TrackState:
    """
    Push the position belief through the motion model: a convolution with a Gaussian kernel shifted by the velocity
    mean, with the velocity covariance plus the position process noise. The velocity covariance grows by the velocity
    process noise.

    Args:
        t (TrackState): active track.
        params (FilterParameters): filter parameters.

    Returns:
        TrackState: prediction. Dead if all probability mass left the grid.
    """
    assert t.is_active, "Only active tracks can be predicted"

    cell_size = t.position_belief.cell_size
    # Velocity beliefs are (x, y) ordered in pixels, kernels are (row, col) ordered in cells.
    mean_cells = t.velocity_belief.mean[::-1] / cell_size
    cov_cells = (t.velocity_belief.covariance[::-1, ::-1] + np.eye(2) * params.q_pos_sigma**2) / cell_size**2
    k = kernel.gaussian_kernel(mean_cells, cov_cells, sigma_cutoff=params.kernel_sigma_cutoff)
    velocity_belief = GaussianBelief2D(
        t.velocity_belief.mean, t.velocity_belief.covariance + np.eye(2) * params.q_vel_sigma**2
    )
    try:
        position_belief = kernel.convolve(t.position_belief, k)
    except ZeroMassError:
        return t.replace(
            status=TrackState.DEAD, velocity_belief=velocity_belief, last_update=TrackState.UPDATE_VANISHED
        )

    return t.replace(position_belief=position_belief, velocity_belief=velocity_belief)


def update(t: TrackState, embedding_map: EmbeddingMap, params: FilterParameters) -> TrackState:
    """
    Incorporate the frame's embedding map. The track's distance map is gated, turned into a likelihood by softmin,
    gated again on entropy and multiplied into the prediction. A rejected measurement leaves the prediction as the
    posterior.

    Args:
        t (TrackState): predicted, active track.
        embedding_map (EmbeddingMap): the frame's embedding map.
        params (FilterParameters): filter parameters.

    Returns:
        TrackState: posterior.
    """
    return update_with_distances(t, distance_map(embedding_map, t.reference_embedding), params)


def update_with_distances(t: TrackState, distances: DistanceGrid, params: FilterParameters) -> TrackState:
    """
    `update` on an already computed distance map, so many tracks can share one batched distance computation.
    """
    assert t.is_active, "Only active tracks can be updated"
    assert distances.shape == t.position_belief.shape

    if params.n_app is not None and not gate_missing(distances, params.n_app):
        return _reject(t, TrackState.UPDATE_MISSING, params)
    likelihood = softmin(distances, params.temperature)
    if params.entropy_fraction is not None and not gate_entropy(likelihood, params.entropy_fraction):
        return _reject(t, TrackState.UPDATE_ENTROPY, params)

    return update_with_likelihood(t, likelihood, params)


def update_with_likelihood(t: TrackState, likelihood: ProbabilityGrid, params: FilterParameters) -> TrackState:
    """
    Multiply an accepted measurement likelihood into the prediction.

    Returns:
        TrackState: posterior. Dead when the likelihood and the prediction share no support.
    """
    assert t.is_active, "Only active tracks can be updated"
    try:
        position_belief = multiply_update(t.position_belief, likelihood)
    except ZeroMassError:
        return t.replace(status=TrackState.DEAD, last_update=TrackState.UPDATE_VANISHED)

    return t.replace(
        position_belief=position_belief, frames_since_accepted_measurement=0, last_update=TrackState.UPDATE_ACCEPTED
    )


def _reject(t: TrackState, reason: str, params: FilterParameters) -> TrackState:
    missed = t.frames_since_accepted_measurement
    if reason != TrackState.UPDATE_ENTROPY or params.count_entropy_rejections:
        missed += 1
    status = TrackState.DEAD if missed > params.d_max_missed else t.status
    return t.replace(frames_since_accepted_measurement=missed, last_update=reason, status=status)


def measure_velocity(t: TrackState, params: FilterParameters) -> TrackState:
    """
    Measure the velocity as the shift of the posterior's peak since the previous frame, then apply a Kalman update to
    the velocity belief with measurement noise `r_vel_sigma` squared. The measurement only exists between two
    consecutive accepted updates, otherwise the peak shift would only echo the prediction.

    Args:
        t (TrackState): updated track.
        params (FilterParameters): filter parameters.

    Returns:
        TrackState: track. The velocity belief is updated and `prev_peak` is set to this frame's peak.
    """
    if not t.is_active:
        return t
    if t.last_update != TrackState.UPDATE_ACCEPTED:
        return t.replace(prev_peak=None)

    cell, _ = map_peak(t.position_belief)
    peak = t.position_belief.cell_center(*cell)
    if t.prev_peak is None:
        return t.replace(prev_peak=peak)

    measured_velocity = np.array([peak[0] - t.prev_peak[0], peak[1] - t.prev_peak[1]], np.float64)
    mean, covariance = filterpy.kalman.update(
        t.velocity_belief.mean,
        t.velocity_belief.covariance,
        measured_velocity,
        np.eye(2) * params.r_vel_sigma**2,
        H=np.eye(2),
    )
    covariance = (covariance + covariance.T) / 2
    return t.replace(velocity_belief=GaussianBelief2D(mean, covariance), prev_peak=peak)


def point_estimate(t: TrackState, mode: str) -> Tuple[float, float]:
    """
    The track's `(x, y)` position in pixels: the peak cell's centre or the belief's expectation.
    """
    assert mode in ("peak", "expectation"), f"Unknown output mode {mode}"
    if mode == "peak":
        cell, _ = map_peak(t.position_belief)
        return t.position_belief.cell_center(*cell)
    return expectation(t.position_belief)


def emit(t: TrackState, reg: BBoxRegressor, mode: str, frame: int) -> OutputBox:
    """
    The track's output box for this frame, centred on the point estimate with a regressed size.

    Args:
        t (TrackState): active track.
        reg (BBoxRegressor): the camera's box regressor.
        mode (str): "peak" or "expectation".
        frame (int): frame index.

    Returns:
        OutputBox: box.
    """
    assert t.is_active, "Only active tracks emit boxes"
    center = point_estimate(t, mode)
    width, height = reg.regress(center)
    return OutputBox(t.id, frame, center, width, height)
