import math
from typing import Optional, Protocol, Tuple

import numpy as np
import scipy
from typing_extensions import Self

from ..setup.config import Config

ASSOCIATION_MODES = ("pos", "app", "combined")


class Detection:
    """
    One scored centre point detection.

    Attributes:
        center (tuple of two floats): `(x, y)` in pixels.
        score (float): detector confidence.
        embedding (`(dim) ndarray[float]` or none): appearance embedding, if the detector provides one.
        frame (int): frame index.
        identity (int or none): the simulated identity that caused the detection, none for false alarms and real data.
            Never read by the trackers.
    """

    center: Tuple[float, float]
    score: float
    embedding: Optional[np.ndarray]
    frame: int
    identity: Optional[int]

    def __init__(
        self,
        center: Tuple[float, float],
        score: float,
        frame: int,
        embedding: Optional[np.ndarray] = None,
        identity: Optional[int] = None,
    ) -> None:
        if not (math.isfinite(center[0]) and math.isfinite(center[1])):
            raise ValueError(f"Detection centre must be finite, got {center}")
        self.center = (float(center[0]), float(center[1]))
        self.score = float(score)
        self.frame = int(frame)
        self.embedding = None if embedding is None else np.asarray(embedding, np.float64)
        self.identity = identity

    def __repr__(self) -> str:
        return f"Detection(frame={self.frame}, center={self.center}, score={self.score:.3f})"


class AssociationConfig:
    """
    How detections are scored against tracks. Position distances are divided by `n_pos` and appearance distances by
    `n_app` to bring them onto a common scale.

    Attributes:
        mode (str): "pos", "app" or "combined".
        n_pos (float): position normaliser in pixels.
        n_app (float): appearance normaliser.
        gate (float): matches costing more than the gate are discarded.
    """

    mode: str
    n_pos: float
    n_app: float
    gate: float

    def __init__(self, mode: str = "pos", n_pos: float = 40.0, n_app: float = 1.0, gate: float = 2.0) -> None:
        assert mode in ASSOCIATION_MODES, f"Unknown association mode {mode}"
        assert n_pos > 0
        assert n_app > 0
        assert gate > 0
        self.mode = mode
        self.n_pos = n_pos
        self.n_app = n_app
        self.gate = gate

    @classmethod
    def from_config(cls, config: Config, mode: str, n_app: float) -> Self:
        """
        Args:
            config (Config): the loaded config.
            mode (str): association mode.
            n_app (float): appearance normaliser, calibrated by the caller when not configured.
        """
        return cls(mode, config["assoc"]["n_pos"], n_app, config["assoc"]["gate"])


class TrackManagementConfig:
    """
    When tracks are started, continued and deleted.

    Attributes:
        sigma_init (float): detections scoring below this never start a track.
        d_init (int): consecutive chained detections needed to start a track.
        sigma_cont (float): detections scoring below this are ignored entirely.
        d_miss (int): a track is deleted once missed for more than this many consecutive frames.
        gt_init (bool): start tracks only from supplied ground truth boxes instead of from detections.
        emit_max_missed (int): a missed track still outputs its predicted box for this many frames.
    """

    sigma_init: float
    d_init: int
    sigma_cont: float
    d_miss: int
    gt_init: bool
    emit_max_missed: int

    def __init__(
        self,
        sigma_init: float = 0.3,
        d_init: int = 3,
        sigma_cont: float = 0.0,
        d_miss: int = 5,
        gt_init: bool = False,
        emit_max_missed: int = 5,
    ) -> None:
        assert sigma_cont <= sigma_init, f"sigma_cont={sigma_cont} must not be above sigma_init={sigma_init}"
        assert d_init >= 1
        assert d_miss >= 0
        self.sigma_init = sigma_init
        self.d_init = d_init
        self.sigma_cont = sigma_cont
        self.d_miss = d_miss
        self.gt_init = gt_init
        self.emit_max_missed = emit_max_missed

    @classmethod
    def from_config(cls, config: Config, gt_init: bool) -> Self:
        """
        Ground truth initialised trackers use the `gt_` prefixed parameters of the assoc section.
        """
        config_assoc = config["assoc"]
        prefix = "gt_" if gt_init else ""
        return cls(
            sigma_init=config_assoc["sigma_init"],
            d_init=config_assoc[prefix + "d_init"],
            sigma_cont=config_assoc[prefix + "sigma_cont"],
            d_miss=config_assoc[prefix + "d_miss"],
            gt_init=gt_init,
            emit_max_missed=config_assoc["emit_max_missed"],
        )


class Associable(Protocol):
    position: Tuple[float, float]
    reference_embedding: Optional[np.ndarray]


def combined_distance(d_pos: float, d_app: float, cfg: AssociationConfig) -> float:
    """
    The association cost of one track and detection pair.

    Args:
        d_pos (float): centre distance in pixels.
        d_app (float): appearance embedding distance.
        cfg (AssociationConfig): association config.

    Returns:
        float: cost. `d_pos / n_pos`, `d_app / n_app`, or their product, for modes pos, app and combined.
    """
    assert d_pos >= 0 and d_app >= 0
    if cfg.mode == "pos":
        return d_pos / cfg.n_pos
    if cfg.mode == "app":
        return d_app / cfg.n_app
    return (d_pos / cfg.n_pos) * (d_app / cfg.n_app)


def hungarian(cost: np.ndarray) -> list[Tuple[int, int]]:
    """
    Minimum total cost maximum matching of rows to columns. Among equally cheap matchings the lexicographically
    smallest list of `(row, col)` pairs is returned, rows unmatched only when there are more rows than columns.

    The tie-break solves up to `n * m` sub-assignments with `linear_sum_assignment`, each cubic in its size. That is
    fast for the handful of tracks and detections of one frame, and also runs inside `metrics.match_frame`, but it
    grows quickly with crowded frames.

    Args:
        cost (`(n x m) ndarray[float]`): finite costs.

    Returns:
        list of tuple of two ints: assignment. `(row, col)` pairs sorted by row.
    """
    cost = np.asarray(cost, np.float64)
    assert cost.ndim == 2
    if not np.isfinite(cost).all():
        raise ValueError("Assignment costs must be finite, encode infeasible pairs with a large sentinel")
    n_rows, n_cols = cost.shape
    if n_rows == 0 or n_cols == 0:
        return []

    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    optimum = float(cost[rows, cols].sum())
    matching_size = min(n_rows, n_cols)
    tolerance = 1e-9 * max(1.0, abs(optimum))

    # Fix one row at a time to the smallest choice that keeps the optimum reachable.
    assignment = []
    fixed_cost = 0.0
    free_rows = list(range(n_rows))
    free_cols = list(range(n_cols))
    for row in range(n_rows):
        free_rows.remove(row)
        options = [(col, cost[row, col]) for col in free_cols]
        if n_rows > n_cols:
            options.append((None, 0.0))
        for col, option_cost in options:
            remaining_cols = [c for c in free_cols if c != col]
            remaining_size = min(len(free_rows), len(remaining_cols))
            if len(assignment) + (col is not None) + remaining_size != matching_size:
                continue
            remaining_cost = 0.0
            if remaining_size > 0:
                sub_cost = cost[np.ix_(free_rows, remaining_cols)]
                sub_rows, sub_cols = scipy.optimize.linear_sum_assignment(sub_cost)
                remaining_cost = float(sub_cost[sub_rows, sub_cols].sum())
            if abs(fixed_cost + option_cost + remaining_cost - optimum) <= tolerance:
                if col is not None:
                    assignment.append((row, col))
                    free_cols.remove(col)
                    fixed_cost += option_cost
                break
        else:
            raise RuntimeError("Failed to reconstruct an optimal assignment")
        if len(assignment) == matching_size:
            break

    return assignment


def associate(
    tracks: list[Associable], detections: list[Detection], cfg: AssociationConfig
) -> Tuple[list[Tuple[int, int]], list[int], list[int]]:
    """
    Optimal assignment of detections to the predicted tracks.

    A pair without an appearance embedding on either side cannot be associated in app mode. In combined mode the
    missing appearance factor is taken as one, leaving the position term.

    Args:
        tracks (list of Associable): tracks, each with a predicted `(x, y)` position and a reference embedding.
        detections (list of Detection): the frame's detections.
        cfg (AssociationConfig): association config.

    Returns:
        Tuple containing:
            - (list of tuple of two ints): matches. `(track index, detection index)` pairs with cost within the gate.
            - (list of int): unmatched_tracks. Track indices.
            - (list of int): unmatched_detections. Detection indices.
    """
    n_tracks, n_detections = len(tracks), len(detections)
    sentinel = 10 * cfg.gate
    size = max(n_tracks, n_detections)
    cost = np.full((size, size), sentinel, np.float64)
    for i, track in enumerate(tracks):
        for j, detection in enumerate(detections):
            d_pos = math.dist(track.position, detection.center)
            if track.reference_embedding is None or detection.embedding is None:
                if cfg.mode == "app":
                    continue
                if cfg.mode == "combined":
                    cost[i, j] = d_pos / cfg.n_pos
                    continue
                d_app = 0.0
            else:
                d_app = float(np.linalg.norm(track.reference_embedding - detection.embedding))
            cost[i, j] = min(combined_distance(d_pos, d_app, cfg), sentinel)

    matches = []
    for i, j in hungarian(cost):
        if i < n_tracks and j < n_detections and cost[i, j] <= cfg.gate:
            matches.append((i, j))
    matched_tracks = {i for i, _ in matches}
    matched_detections = {j for _, j in matches}
    unmatched_tracks = [i for i in range(n_tracks) if i not in matched_tracks]
    unmatched_detections = [j for j in range(n_detections) if j not in matched_detections]

    return matches, unmatched_tracks, unmatched_detections
