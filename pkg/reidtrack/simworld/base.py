import itertools
import math
from typing import Any, Optional, Tuple

import numpy as np
import tqdm
from typing_extensions import Self

from .. import log
from ..assoc.base import Detection
from ..grid.base import entropy
from ..measurement.base import DistanceGrid, EmbeddingMap, softmin
from ..setup.config import Config

BORDER_MODES = ("reflect", "exit")
BACKGROUND_MODES = ("random_far", "confuser")
# Mean score of a detection caused by an identity. False alarms score uniformly in [-1, 1).
TRUE_DETECTION_SCORE = 0.8
# Background embeddings are redrawn while closer than this to any identity embedding.
BACKGROUND_MIN_DISTANCE = 1.0
BACKGROUND_MAX_REDRAWS = 100

# Independent random streams of one seed.
_GENERATE_STREAM = 0
_RENDER_STREAM = 1
_CALIBRATE_STREAM = 2
_ENTROPY_STREAM = 3


class ConfigInvalidError(ValueError):
    pass


class FrameOutOfRangeError(ValueError):
    pass


class ScenarioConfig:
    """
    Every setting of a synthetic world. Positions and speeds are in pixels; the embedding maps have
    `ceil(height / cell_size)` rows and `ceil(width / cell_size)` columns.
    """

    width: int
    height: int
    cell_size: float
    embedding_dim: int
    num_identities: int
    frames: int
    velocity_range: Tuple[float, float]
    motion_noise_sigma: float
    border_mode: str
    min_lifetime: int
    randomize_lifetimes: bool
    embedding_noise_sigma: float
    background_mode: str
    confuser_similarity: float
    miss_rate: float
    fp_rate: float
    score_noise: float
    detection_position_sigma: float
    height_slope: float
    height_intercept: float
    height_noise_sigma: float
    seed: int
    calibration_samples: int

    _FIELDS = (
        "width",
        "height",
        "cell_size",
        "embedding_dim",
        "num_identities",
        "frames",
        "velocity_range",
        "motion_noise_sigma",
        "border_mode",
        "min_lifetime",
        "randomize_lifetimes",
        "embedding_noise_sigma",
        "background_mode",
        "confuser_similarity",
        "miss_rate",
        "fp_rate",
        "score_noise",
        "detection_position_sigma",
        "height_slope",
        "height_intercept",
        "height_noise_sigma",
        "seed",
        "calibration_samples",
    )

    def __init__(
        self,
        width: int = 64,
        height: int = 48,
        cell_size: float = 8.0,
        embedding_dim: int = 128,
        num_identities: int = 5,
        frames: int = 300,
        velocity_range: Tuple[float, float] = (1.0, 4.0),
        motion_noise_sigma: float = 0.5,
        border_mode: str = "reflect",
        min_lifetime: int = 100,
        randomize_lifetimes: bool = True,
        embedding_noise_sigma: float = 0.0,
        background_mode: str = "random_far",
        confuser_similarity: float = 0.95,
        miss_rate: float = 0.2,
        fp_rate: float = 1e-4,
        score_noise: float = 0.1,
        detection_position_sigma: float = 2.0,
        height_slope: float = 0.3,
        height_intercept: float = 60.0,
        height_noise_sigma: float = 0.05,
        seed: int = 0,
        calibration_samples: int = 1000,
    ) -> None:
        """
        Raises:
            ConfigInvalidError: a setting is out of its range.
        """
        self.width = int(width)
        self.height = int(height)
        self.cell_size = float(cell_size)
        self.embedding_dim = int(embedding_dim)
        self.num_identities = int(num_identities)
        self.frames = int(frames)
        self.velocity_range = (float(velocity_range[0]), float(velocity_range[1]))
        self.motion_noise_sigma = float(motion_noise_sigma)
        self.border_mode = border_mode
        self.min_lifetime = int(min_lifetime)
        self.randomize_lifetimes = bool(randomize_lifetimes)
        self.embedding_noise_sigma = float(embedding_noise_sigma)
        self.background_mode = background_mode
        self.confuser_similarity = float(confuser_similarity)
        self.miss_rate = float(miss_rate)
        self.fp_rate = float(fp_rate)
        self.score_noise = float(score_noise)
        self.detection_position_sigma = float(detection_position_sigma)
        self.height_slope = float(height_slope)
        self.height_intercept = float(height_intercept)
        self.height_noise_sigma = float(height_noise_sigma)
        self.seed = int(seed)
        self.calibration_samples = int(calibration_samples)
        self.check()

    def check(self) -> None:
        problems = []
        if self.width <= 0 or self.height <= 0 or self.cell_size <= 0:
            problems.append("width, height and cell_size must be positive")
        if self.embedding_dim < 2:
            problems.append(f"embedding_dim must be at least 2, got {self.embedding_dim}")
        if self.num_identities < 0:
            problems.append("num_identities must not be negative")
        if self.frames < 1:
            problems.append(f"frames must be at least 1, got {self.frames}")
        if not 0 <= self.velocity_range[0] <= self.velocity_range[1]:
            problems.append(f"velocity_range {self.velocity_range} must be ordered and not negative")
        for name in ("motion_noise_sigma", "embedding_noise_sigma", "score_noise", "detection_position_sigma"):
            if self.__getattribute__(name) < 0:
                problems.append(f"{name} must not be negative")
        if self.height_noise_sigma < 0:
            problems.append("height_noise_sigma must not be negative")
        if self.border_mode not in BORDER_MODES:
            problems.append(f"border_mode must be one of {BORDER_MODES}, got {self.border_mode}")
        if self.background_mode not in BACKGROUND_MODES:
            problems.append(f"background_mode must be one of {BACKGROUND_MODES}, got {self.background_mode}")
        if not 0 <= self.confuser_similarity < 1:
            problems.append(f"confuser_similarity must be in [0, 1), got {self.confuser_similarity}")
        for name in ("miss_rate", "fp_rate"):
            if not 0 <= self.__getattribute__(name) <= 1:
                problems.append(f"{name} must be in [0, 1], got {self.__getattribute__(name)}")
        if self.min_lifetime < 1:
            problems.append("min_lifetime must be positive")
        if self.calibration_samples < 1:
            problems.append("calibration_samples must be positive")
        if self.seed < 0:
            problems.append("seed must not be negative")
        if min(self.height_intercept, self.height_slope * self.height + self.height_intercept) <= 0:
            problems.append("Box heights must be positive over the whole frame")
        if not problems and self.num_identities > self.n_cells:
            problems.append(f"{self.num_identities} identities cannot stand in distinct cells of {self.n_cells}")
        if problems:
            raise ConfigInvalidError("Invalid scenario config: " + "; ".join(problems))

    @property
    def grid_shape(self) -> Tuple[int, int]:
        """`(rows, columns)` of the embedding maps."""
        return math.ceil(self.height / self.cell_size), math.ceil(self.width / self.cell_size)

    @property
    def n_cells(self) -> int:
        return self.grid_shape[0] * self.grid_shape[1]

    def cell_of(self, center: Tuple[float, float]) -> Tuple[int, int]:
        n_rows, n_cols = self.grid_shape
        row = min(max(int(center[1] // self.cell_size), 0), n_rows - 1)
        col = min(max(int(center[0] // self.cell_size), 0), n_cols - 1)
        return row, col

    def with_changes(self, **changes) -> Self:
        values = self.to_dict()
        unknown = set(changes) - set(values)
        if unknown:
            raise ConfigInvalidError(f"Unknown scenario settings {sorted(unknown)}")
        values.update(changes)
        return type(self).from_dict(values)

    def to_dict(self) -> dict[str, Any]:
        values = {name: self.__getattribute__(name) for name in self._FIELDS}
        values["velocity_range"] = list(self.velocity_range)
        return values

    @classmethod
    def from_dict(cls, values: dict[str, Any]) -> Self:
        return cls(**{name: values[name] for name in cls._FIELDS if name in values})

    @classmethod
    def from_config(cls, config: Config) -> Self:
        """
        Build from the `scenario` section of a loaded config.
        """
        config_scenario = config["scenario"]
        return cls(**{name: config_scenario[name] for name in cls._FIELDS})


class Identity:
    """
    One simulated person.

    Attributes:
        id (int): identity number, from 0.
        embedding (`(dim) ndarray[float]`): unit norm true appearance.
        height_factor (float): multiplier on the world's linear box height.
        start_frame (int): first frame present.
        end_frame (int): one past the last frame present.
        positions (`(frames x 2) ndarray[float]`): `(x, y)` centre in pixels, nan when absent.
    """

    id: int
    embedding: np.ndarray
    height_factor: float
    start_frame: int
    end_frame: int
    positions: np.ndarray

    def __init__(
        self,
        id: int,
        embedding: np.ndarray,
        height_factor: float,
        start_frame: int,
        end_frame: int,
        positions: np.ndarray,
    ) -> None:
        assert positions.ndim == 2 and positions.shape[1] == 2
        assert 0 <= start_frame <= end_frame <= positions.shape[0]
        self.id = id
        self.embedding = embedding
        self.height_factor = height_factor
        self.start_frame = start_frame
        self.end_frame = end_frame
        self.positions = positions

    def present(self, t: int) -> bool:
        return self.start_frame <= t < self.end_frame

    def center(self, t: int) -> Tuple[float, float]:
        assert self.present(t), f"Identity {self.id} is absent on frame {t}"
        return float(self.positions[t, 0]), float(self.positions[t, 1])


class FrameObservation:
    """
    What the trackers see on one frame, plus its ground truth.

    Attributes:
        frame (int): frame index.
        embedding_map (EmbeddingMap): per cell embeddings.
        detections (list of Detection): noisy centre point detections, false alarms included.
        gt_boxes (list of tuple): `(identity id, (x, y) centre, height)` of every present identity.
        identity_embeddings (dict[int, `(dim) ndarray[float]`]): the noisy observation each present identity wrote
            into its cell, by identity id.
    """

    frame: int
    embedding_map: EmbeddingMap
    detections: list[Detection]
    gt_boxes: list[Tuple[int, Tuple[float, float], float]]
    identity_embeddings: dict[int, np.ndarray]

    def __init__(
        self,
        frame: int,
        embedding_map: EmbeddingMap,
        detections: list[Detection],
        gt_boxes: list[Tuple[int, Tuple[float, float], float]],
        identity_embeddings: dict[int, np.ndarray],
    ) -> None:
        assert set(identity_embeddings) == {ident_id for ident_id, _, _ in gt_boxes}
        self.frame = frame
        self.embedding_map = embedding_map
        self.detections = detections
        self.gt_boxes = gt_boxes
        self.identity_embeddings = identity_embeddings


class Scenario:
    """
    A generated world: identities with their trajectories and every rendered frame.

    Attributes:
        config (ScenarioConfig): the generating config.
        identities (list of Identity): every identity, ordered by id.
        confuser_cell (tuple of two ints or none): `(row, col)` of the fixed confuser background cell.
        confuser_identity (int or none): the identity the confuser imitates.
        confuser_embedding (`(dim) ndarray[float]` or none): the confuser background embedding.
        frames (list of FrameObservation): rendered frames.
    """

    config: ScenarioConfig
    identities: list[Identity]
    confuser_cell: Optional[Tuple[int, int]]
    confuser_identity: Optional[int]
    confuser_embedding: Optional[np.ndarray]
    frames: list[FrameObservation]

    def __init__(
        self,
        config: ScenarioConfig,
        identities: list[Identity],
        confuser_cell: Optional[Tuple[int, int]] = None,
        confuser_identity: Optional[int] = None,
        confuser_embedding: Optional[np.ndarray] = None,
    ) -> None:
        self.config = config
        self.identities = identities
        self.confuser_cell = confuser_cell
        self.confuser_identity = confuser_identity
        self.confuser_embedding = confuser_embedding
        self.frames = []

    def gt_height(self, identity: Identity, t: int) -> float:
        y = identity.center(t)[1]
        return identity.height_factor * (self.config.height_slope * y + self.config.height_intercept)

    def gt_boxes(self, t: int) -> list[Tuple[int, Tuple[float, float], float]]:
        return [(ident.id, ident.center(t), self.gt_height(ident, t)) for ident in self.identities if ident.present(t)]

    def gt_starts(self, t: int) -> list[Tuple[int, Tuple[float, float]]]:
        """
        `(identity id, centre)` of every identity entering the scene on frame t, ordered by id.
        """
        return [(ident.id, ident.center(t)) for ident in self.identities if ident.start_frame == t]

    def height_samples(self) -> np.ndarray:
        """
        Returns:
            `(n_boxes x 2) ndarray[float]`: samples. Every ground truth `(center_y, height)` pair of the scenario.
        """
        samples = [
            (ident.center(t)[1], self.gt_height(ident, t))
            for ident in self.identities
            for t in range(ident.start_frame, ident.end_frame)
        ]
        return np.array(samples, np.float64).reshape((-1, 2))


def _unit_vectors(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    vectors = rng.normal(size=(n, dim))
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    norms[norms == 0] = 1
    return vectors / norms


def _normalise(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=-1, keepdims=True)
    norms[norms == 0] = 1
    return vectors / norms


def _observe(rng: np.random.Generator, cfg: ScenarioConfig, truth: np.ndarray) -> np.ndarray:
    noise = rng.normal(scale=cfg.embedding_noise_sigma, size=truth.shape)
    return _normalise(truth + noise)


def _fold(value: float, upper: float) -> Tuple[float, bool]:
    # Mirror a coordinate into [0, upper) like a point bouncing off both borders. Also tells whether an odd number of
    # bounces turned the point around.
    bounces = math.floor(value / upper)
    folded = value % (2 * upper)
    if folded > upper:
        folded = 2 * upper - folded
    return min(folded, math.nextafter(upper, 0)), bounces % 2 == 1


class _Motion:
    """
    The random part of one identity's walk, drawn before any identity moves.
    """

    start: int
    end: int
    start_position: np.ndarray
    velocity: np.ndarray
    # (end - start - 1) x 2 position jitter added on each step.
    steps: np.ndarray

    def __init__(self, rng: np.random.Generator, cfg: ScenarioConfig) -> None:
        lifetime = cfg.frames
        if cfg.randomize_lifetimes:
            shortest = min(cfg.min_lifetime, cfg.frames)
            lifetime = int(rng.integers(shortest, cfg.frames + 1))
        self.start = int(rng.integers(0, cfg.frames - lifetime + 1))
        self.end = self.start + lifetime

        self.start_position = rng.uniform((0, 0), (cfg.width, cfg.height))
        speed = rng.uniform(*cfg.velocity_range)
        angle = rng.uniform(0, 2 * np.pi)
        self.velocity = speed * np.array([np.cos(angle), np.sin(angle)])
        self.steps = np.zeros((lifetime - 1, 2))
        if cfg.motion_noise_sigma > 0:
            self.steps = rng.normal(scale=cfg.motion_noise_sigma, size=(lifetime - 1, 2))


def _nearest_free_centre(cfg: ScenarioConfig, position: np.ndarray, taken: set[Tuple[int, int]]) -> np.ndarray:
    n_rows, n_cols = cfg.grid_shape
    free = [cell for cell in itertools.product(range(n_rows), range(n_cols)) if cell not in taken]
    # Cells are (row, col), centres are (x, y).
    centres = (np.array(free, np.float64)[:, ::-1] + 0.5) * cfg.cell_size
    centres = np.minimum(centres, np.nextafter((cfg.width, cfg.height), 0))
    return centres[np.argmin(np.linalg.norm(centres - position, axis=1))]


def _simulate_paths(cfg: ScenarioConfig, motions: list[_Motion]) -> list[Tuple[int, int, np.ndarray]]:
    """
    Walk every identity frame by frame with constant velocity plus jitter, keeping the present identities in
    distinct grid cells. An identity whose next step lands in a cell held by another stays where it is and turns
    around. An identity entering on a held cell enters at the centre of the nearest free cell.

    Returns:
        list of tuple: `(start frame, end frame, (frames x 2) positions)` per identity, positions nan when absent.
    """
    n_identities = len(motions)
    ends = [motion.end for motion in motions]
    velocities = [motion.velocity.copy() for motion in motions]
    positions = np.full((n_identities, cfg.frames, 2), np.nan)
    for t in range(cfg.frames):
        # Cells of identities still to move this frame stay held.
        held = {
            i: cfg.cell_of(positions[i, t - 1]) for i, motion in enumerate(motions) if motion.start < t < ends[i]
        }
        taken = set()
        for i, motion in enumerate(motions):
            if not motion.start <= t < ends[i]:
                continue
            held.pop(i, None)
            blocked = taken | set(held.values())
            if t == motion.start:
                position = motion.start_position.copy()
                if cfg.cell_of(position) in blocked:
                    position = _nearest_free_centre(cfg, position, blocked)
            else:
                previous = positions[i, t - 1]
                position = previous + velocities[i] + motion.steps[t - motion.start - 1]
                if cfg.border_mode == "reflect":
                    for axis, upper in enumerate((cfg.width, cfg.height)):
                        position[axis], turned = _fold(float(position[axis]), upper)
                        if turned:
                            velocities[i][axis] *= -1
                elif not (0 <= position[0] < cfg.width and 0 <= position[1] < cfg.height):
                    ends[i] = t
                    continue
                if cfg.cell_of(position) in blocked:
                    velocities[i] = -velocities[i]
                    position = previous.copy()
            positions[i, t] = position
            taken.add(cfg.cell_of(position))
    return [(motion.start, ends[i], positions[i]) for i, motion in enumerate(motions)]


def generate_scenario(cfg: ScenarioConfig, render: bool = True) -> Scenario:
    """
    Generate a world: unit norm identity embeddings, constant velocity trajectories with Gaussian jitter and
    per identity box heights. No two present identities ever share a grid cell. Every float is determined by the
    config, including its seed.

    Args:
        cfg (ScenarioConfig): the config.
        render (bool, optional): render every frame into `scenario.frames`. Default: true.

    Returns:
        Scenario: scenario.
    """
    assert type(cfg) is ScenarioConfig
    cfg.check()
    rng = np.random.default_rng([cfg.seed, _GENERATE_STREAM])

    embeddings = _unit_vectors(rng, cfg.num_identities, cfg.embedding_dim)
    height_factors = []
    motions = []
    for _ in range(cfg.num_identities):
        height_factor = 1.0
        if cfg.height_noise_sigma > 0:
            height_factor = max(1 + rng.normal(scale=cfg.height_noise_sigma), 0.1)
        height_factors.append(float(height_factor))
        motions.append(_Motion(rng, cfg))
    identities = [
        Identity(i, embeddings[i], height_factors[i], start, end, positions)
        for i, (start, end, positions) in enumerate(_simulate_paths(cfg, motions))
    ]

    scenario = Scenario(cfg, identities)
    if cfg.background_mode == "confuser" and cfg.num_identities > 0:
        # A fixed background vector with the given cosine similarity to one identity.
        target = int(rng.integers(cfg.num_identities))
        n_rows, n_cols = cfg.grid_shape
        scenario.confuser_cell = (int(rng.integers(n_rows)), int(rng.integers(n_cols)))
        scenario.confuser_identity = target
        orthogonal = rng.normal(size=cfg.embedding_dim)
        orthogonal -= orthogonal.dot(embeddings[target]) * embeddings[target]
        orthogonal /= np.linalg.norm(orthogonal)
        similarity = cfg.confuser_similarity
        scenario.confuser_embedding = similarity * embeddings[target] + math.sqrt(1 - similarity**2) * orthogonal
    log.debug(f"Generated {cfg.num_identities} identities over {cfg.frames} frames with seed {cfg.seed}")

    if render:
        scenario.frames = [
            render_frame(scenario, t)
            for t in tqdm.trange(cfg.frames, desc="Rendering frames", unit="frame", disable=cfg.frames < 100)
        ]
    return scenario


def _background(rng: np.random.Generator, cfg: ScenarioConfig, identities: list[Identity]) -> np.ndarray:
    n_rows, n_cols = cfg.grid_shape
    background = _unit_vectors(rng, n_rows * n_cols, cfg.embedding_dim)
    if len(identities) == 0:
        return background.reshape((n_rows, n_cols, cfg.embedding_dim))
    identity_embeddings = np.array([ident.embedding for ident in identities])
    for _ in range(BACKGROUND_MAX_REDRAWS):
        distances = np.linalg.norm(background[:, np.newaxis] - identity_embeddings[np.newaxis], axis=2)
        too_close = distances.min(1) < BACKGROUND_MIN_DISTANCE
        if not too_close.any():
            break
        background[too_close] = _unit_vectors(rng, int(too_close.sum()), cfg.embedding_dim)
    return background.reshape((n_rows, n_cols, cfg.embedding_dim))


def render_frame(s: Scenario, t: int) -> FrameObservation:
    """
    Render one frame: the embedding map and the simulated detector output. Each frame draws from its own random stream
    of the scenario's seed, so frames can be rendered in any order.

    Background cells get fresh unit embeddings far from every identity. In confuser mode one fixed cell holds the
    confuser embedding. Every present identity writes a noisy observation of its true embedding into the cell under its
    centre. Embeddings are stored at 32 bit precision.

    A detection's embedding is the map's vector in the cell under the detected centre, as if the appearance model ran
    on the detected box. A detection displaced into a neighbouring cell therefore carries that cell's appearance.

    Args:
        s (Scenario): the scenario.
        t (int): frame index.

    Returns:
        FrameObservation: observation.

    Raises:
        FrameOutOfRangeError: t is not a frame of the scenario.
    """
    cfg = s.config
    if not 0 <= t < cfg.frames:
        raise FrameOutOfRangeError(f"Frame {t} is outside of [0, {cfg.frames})")
    rng = np.random.default_rng([cfg.seed, _RENDER_STREAM, t])

    values = _background(rng, cfg, s.identities)
    if s.confuser_cell is not None:
        values[s.confuser_cell] = s.confuser_embedding

    present = [ident for ident in s.identities if ident.present(t)]
    cells = [cfg.cell_of(ident.center(t)) for ident in present]
    assert len(set(cells)) == len(cells), f"Identities share a cell on frame {t}"
    for ident, cell in zip(present, cells):
        values[cell] = _observe(rng, cfg, ident.embedding)
    values = values.astype(np.float32).astype(np.float64)
    identity_embeddings = {ident.id: values[cell].copy() for ident, cell in zip(present, cells)}

    detections = []
    for ident in present:
        if rng.random() < cfg.miss_rate:
            continue
        center = np.array(ident.center(t)) + rng.normal(scale=cfg.detection_position_sigma, size=2)
        center = np.clip(center, 0, (cfg.width, cfg.height))
        score = TRUE_DETECTION_SCORE + rng.normal(scale=cfg.score_noise)
        detections.append(Detection(tuple(center), score, t, values[cfg.cell_of(center)].copy(), ident.id))
    n_false = int(rng.poisson(cfg.fp_rate * cfg.n_cells))
    for _ in range(n_false):
        center = rng.uniform((0, 0), (cfg.width, cfg.height))
        score = rng.uniform(-1, 1)
        detections.append(Detection(tuple(center), score, t, values[cfg.cell_of(center)].copy()))

    embedding_map = EmbeddingMap(values, cfg.cell_size)
    return FrameObservation(t, embedding_map, detections, s.gt_boxes(t), identity_embeddings)


def calibrate_n_app(s: Scenario, quantile: float = 0.95) -> Tuple[float, float]:
    """
    Estimate the distance between two independent noisy observations of the same identity, the distance a track's
    reference embedding has to its identity's later observations. Draws `calibration_samples` pairs with the scenario's
    embedding noise.

    Args:
        s (Scenario): the scenario.
        quantile (float, optional): the upper quantile to report. Default: 0.95.

    Returns:
        Tuple containing:
            - (float): median. Median same identity distance.
            - (float): upper. The `quantile` quantile of the same identity distances.
    """
    assert 0 < quantile < 1
    cfg = s.config
    if len(s.identities) == 0 or cfg.embedding_noise_sigma == 0:
        return 0.0, 0.0
    rng = np.random.default_rng([cfg.seed, _CALIBRATE_STREAM])

    chosen = rng.integers(len(s.identities), size=cfg.calibration_samples)
    truth = np.array([s.identities[i].embedding for i in chosen])
    distances = np.linalg.norm(_observe(rng, cfg, truth) - _observe(rng, cfg, truth), axis=1)
    median, upper = np.quantile(distances, (0.5, quantile))
    log.debug(f"Same identity embedding distance median {median:.4f}, {quantile} quantile {upper:.4f}")
    return float(median), float(upper)


def calibrate_entropy_fraction(s: Scenario, temperature: float, quantile: float = 0.9) -> float:
    """
    Estimate how spread out a track's likelihood is while its identity is in view. Each of `calibration_samples`
    draws renders a fresh background, puts a noisy observation of a random identity into a random cell and compares
    the map against a second, independent observation of the same identity.

    Args:
        s (Scenario): the scenario.
        temperature (float): softmin temperature of the trackers.
        quantile (float, optional): quantile of the sampled entropies to report. Default: 0.9.

    Returns:
        float: fraction. The `quantile` quantile of the likelihood entropies as a fraction of the grid's largest
            entropy. 1 when the scenario has no identities or a single cell.
    """
    assert temperature > 0
    assert 0 < quantile < 1
    cfg = s.config
    if len(s.identities) == 0 or cfg.n_cells == 1:
        return 1.0
    rng = np.random.default_rng([cfg.seed, _ENTROPY_STREAM])
    n_rows, n_cols = cfg.grid_shape

    fractions = np.zeros(cfg.calibration_samples)
    for i in range(cfg.calibration_samples):
        truth = s.identities[int(rng.integers(len(s.identities)))].embedding
        values = _background(rng, cfg, s.identities)
        if s.confuser_cell is not None:
            values[s.confuser_cell] = s.confuser_embedding
        values[int(rng.integers(n_rows)), int(rng.integers(n_cols))] = _observe(rng, cfg, truth)
        distances = DistanceGrid(np.linalg.norm(values - _observe(rng, cfg, truth), axis=2), cfg.cell_size)
        fractions[i] = entropy(softmin(distances, temperature)) / math.log(cfg.n_cells)
    fraction = float(np.quantile(fractions, quantile))
    log.debug(f"Likelihood entropy fraction {quantile} quantile {fraction:.4f} at temperature {temperature}")
    return fraction
