from typing import Optional, Tuple

import numpy as np
from typing_extensions import Self

from ..assoc.base import hungarian
from ..setup.config import Config

MATCH_MODES = ("iou", "distance")
# Coverage fractions strictly above / below these make a ground truth track mostly tracked / mostly lost.
MOSTLY_TRACKED = 0.8
MOSTLY_LOST = 0.2

Box = Tuple[float, float, float, float]


class EmptyGTError(ValueError):
    """
    Raised when a score needs ground truth boxes and there are none.
    """


class MetricsConfig:
    """
    Attributes:
        iou_threshold (float): minimum box overlap for a ground truth and hypothesis box to correspond.
        continuity (bool): keep a ground truth's last correspondence while it remains valid before rematching.
        match_mode (str): "iou" matches on box overlap, "distance" on box centre distance.
        distance_threshold (float): maximum centre distance in pixels in distance mode.
    """

    iou_threshold: float
    continuity: bool
    match_mode: str
    distance_threshold: float

    def __init__(
        self,
        iou_threshold: float = 0.5,
        continuity: bool = True,
        match_mode: str = "iou",
        distance_threshold: float = 20.0,
    ) -> None:
        assert 0 < iou_threshold <= 1
        assert match_mode in MATCH_MODES, f"Unknown match mode {match_mode}"
        assert distance_threshold > 0
        self.iou_threshold = iou_threshold
        self.continuity = continuity
        self.match_mode = match_mode
        self.distance_threshold = distance_threshold

    @classmethod
    def from_config(cls, config: Config) -> Self:
        config_metrics = config["metrics"]
        return cls(
            config_metrics["iou_threshold"],
            config_metrics["continuity"],
            config_metrics["match_mode"],
            config_metrics["distance_threshold"],
        )


def iou(box_a: Box, box_b: Box) -> float:
    """
    Intersection over union of two `(x, y, w, h)` boxes given by their centre and size.
    """
    return float(iou_matrix(np.array([box_a], np.float64), np.array([box_b], np.float64))[0, 0])


def iou_matrix(boxes_a: np.ndarray, boxes_b: np.ndarray) -> np.ndarray:
    """
    Args:
        boxes_a (`(n x 4) ndarray[float]`): `(x, y, w, h)` boxes, centred.
        boxes_b (`(m x 4) ndarray[float]`): `(x, y, w, h)` boxes, centred.

    Returns:
        `(n x m) ndarray[float]`: overlaps. Every pairwise intersection over union, zero for empty boxes.
    """
    boxes_a = np.asarray(boxes_a, np.float64).reshape((-1, 4))
    boxes_b = np.asarray(boxes_b, np.float64).reshape((-1, 4))
    low_a = boxes_a[:, :2] - boxes_a[:, 2:] / 2
    high_a = boxes_a[:, :2] + boxes_a[:, 2:] / 2
    low_b = boxes_b[:, :2] - boxes_b[:, 2:] / 2
    high_b = boxes_b[:, :2] + boxes_b[:, 2:] / 2
    overlap = np.minimum(high_a[:, np.newaxis], high_b[np.newaxis])
    overlap -= np.maximum(low_a[:, np.newaxis], low_b[np.newaxis])
    intersection = np.clip(overlap, 0, None).prod(2)
    area_a = boxes_a[:, 2] * boxes_a[:, 3]
    area_b = boxes_b[:, 2] * boxes_b[:, 3]
    union = area_a[:, np.newaxis] + area_b[np.newaxis] - intersection
    result = np.zeros_like(intersection)
    np.divide(intersection, union, out=result, where=union > 0)
    return result


def pair_costs(gt: np.ndarray, hyp: np.ndarray, cfg: MetricsConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Returns:
        Tuple containing:
            - (`(n x m) ndarray[float]`): cost. `1 - IoU` in iou mode, centre distance over the threshold in distance
                mode, at most 1 for valid pairs.
            - (`(n x m) ndarray[bool]`): valid. True where the pair may correspond.
            - (`(n x m) ndarray[float]`): overlaps. The pairwise IoU, used for MOTP in both modes.
    """
    overlaps = iou_matrix(gt, hyp)
    if cfg.match_mode == "iou":
        return 1 - overlaps, overlaps >= cfg.iou_threshold, overlaps
    distances = np.linalg.norm(gt[:, np.newaxis, :2] - hyp[np.newaxis, :, :2], axis=2)
    return distances / cfg.distance_threshold, distances <= cfg.distance_threshold, overlaps


class FrameCounts:
    """
    CLEAR counts of one frame.

    Attributes:
        gt (int): ground truth boxes.
        hyp (int): hypothesis boxes.
        matches (int): corresponding pairs.
        fp (int): unmatched hypotheses.
        fn (int): unmatched ground truths.
        ids (int): matched ground truths whose hypothesis differs from their last known one.
        overlap_sum (float): summed IoU of the matches.
        matched_gt (list of int): ground truth ids with a correspondence.
    """

    gt: int
    hyp: int
    matches: int
    fp: int
    fn: int
    ids: int
    overlap_sum: float
    matched_gt: list[int]

    def __init__(self, gt: int, hyp: int, matches: int, ids: int, overlap_sum: float, matched_gt: list[int]) -> None:
        self.gt = gt
        self.hyp = hyp
        self.matches = matches
        self.fp = hyp - matches
        self.fn = gt - matches
        self.ids = ids
        self.overlap_sum = overlap_sum
        self.matched_gt = matched_gt


def match_frame(
    gt_boxes: dict[int, Box],
    hyp_boxes: dict[int, Box],
    prev_correspondence: dict[int, int],
    cfg: MetricsConfig,
) -> Tuple[dict[int, int], FrameCounts]:
    """
    CLEAR correspondence of one frame.

    With continuity, a ground truth keeps its last known hypothesis while that hypothesis is present and still valid.
    The remaining boxes are matched by the minimum cost assignment over valid pairs. A ground truth matched to a
    hypothesis other than its last known one counts an identity switch.

    Args:
        gt_boxes (dict[int, tuple of four floats]): ground truth id to `(x, y, w, h)` box.
        hyp_boxes (dict[int, tuple of four floats]): hypothesis id to `(x, y, w, h)` box.
        prev_correspondence (dict[int, int]): every ground truth id's last known hypothesis id.
        cfg (MetricsConfig): metrics config.

    Returns:
        Tuple containing:
            - (dict[int, int]): correspondence. The updated last known hypothesis of every ground truth id.
            - (FrameCounts): counts.
    """
    gt_ids = sorted(gt_boxes)
    hyp_ids = sorted(hyp_boxes)
    gt = np.array([gt_boxes[i] for i in gt_ids], np.float64).reshape((-1, 4))
    hyp = np.array([hyp_boxes[i] for i in hyp_ids], np.float64).reshape((-1, 4))
    cost, valid, overlaps = pair_costs(gt, hyp, cfg)
    gt_index = {gt_id: i for i, gt_id in enumerate(gt_ids)}
    hyp_index = {hyp_id: j for j, hyp_id in enumerate(hyp_ids)}

    matches = []
    if cfg.continuity:
        for gt_id in gt_ids:
            hyp_id = prev_correspondence.get(gt_id)
            if hyp_id not in hyp_index or hyp_id in [h for _, h in matches]:
                continue
            if valid[gt_index[gt_id], hyp_index[hyp_id]]:
                matches.append((gt_id, hyp_id))

    kept_gt = {gt_id for gt_id, _ in matches}
    kept_hyp = {hyp_id for _, hyp_id in matches}
    free_gt = [i for i, gt_id in enumerate(gt_ids) if gt_id not in kept_gt]
    free_hyp = [j for j, hyp_id in enumerate(hyp_ids) if hyp_id not in kept_hyp]
    ids = 0
    if free_gt and free_hyp:
        sub_cost = cost[np.ix_(free_gt, free_hyp)]
        sub_valid = valid[np.ix_(free_gt, free_hyp)]
        # Invalid pairs cost more than any set of valid pairs, so the matching maximises the valid pair count first.
        sentinel = float(max(len(free_gt), len(free_hyp)) + 1)
        sub_cost = np.where(sub_valid, np.clip(sub_cost, 0, 1), sentinel)
        for i, j in hungarian(sub_cost):
            if not sub_valid[i, j]:
                continue
            gt_id, hyp_id = gt_ids[free_gt[i]], hyp_ids[free_hyp[j]]
            if gt_id in prev_correspondence and prev_correspondence[gt_id] != hyp_id:
                ids += 1
            matches.append((gt_id, hyp_id))

    correspondence = dict(prev_correspondence)
    overlap_sum = 0.0
    for gt_id, hyp_id in matches:
        correspondence[gt_id] = hyp_id
        overlap_sum += float(overlaps[gt_index[gt_id], hyp_index[hyp_id]])
    matched_gt = sorted([gt_id for gt_id, _ in matches])
    counts = FrameCounts(len(gt_ids), len(hyp_ids), len(matches), ids, overlap_sum, matched_gt)
    return correspondence, counts


class EvalLedger:
    """
    CLEAR counts accumulated over a sequence, frame by frame in order.

    Attributes:
        frames (list of int): accumulated frame indices.
        counts (list of FrameCounts): per frame counts.
        correspondence (dict[int, int]): each ground truth id's last known hypothesis id.
        gt_frames (dict[int, int]): frames each ground truth id is present.
        gt_matched_frames (dict[int, int]): frames each ground truth id has a correspondence.
    """

    cfg: MetricsConfig
    frames: list[int]
    counts: list[FrameCounts]
    correspondence: dict[int, int]
    gt_frames: dict[int, int]
    gt_matched_frames: dict[int, int]

    def __init__(self, cfg: Optional[MetricsConfig] = None) -> None:
        self.cfg = cfg if cfg is not None else MetricsConfig()
        self.frames = []
        self.counts = []
        self.correspondence = {}
        self.gt_frames = {}
        self.gt_matched_frames = {}

    def add_frame(self, frame: int, gt_boxes: dict[int, Box], hyp_boxes: dict[int, Box]) -> FrameCounts:
        if self.frames and frame <= self.frames[-1]:
            raise ValueError(f"Frames must be added in increasing order, got {frame} after {self.frames[-1]}")
        self.correspondence, counts = match_frame(gt_boxes, hyp_boxes, self.correspondence, self.cfg)
        for gt_id in gt_boxes:
            self.gt_frames[gt_id] = self.gt_frames.get(gt_id, 0) + 1
        for gt_id in counts.matched_gt:
            self.gt_matched_frames[gt_id] = self.gt_matched_frames.get(gt_id, 0) + 1
        self.frames.append(frame)
        self.counts.append(counts)
        return counts

    def total(self, name: str) -> float:
        return sum([counts.__getattribute__(name) for counts in self.counts])

    def coverage(self) -> dict[int, float]:
        """Fraction of its frames each ground truth id has a correspondence."""
        return {gt_id: self.gt_matched_frames.get(gt_id, 0) / n for gt_id, n in self.gt_frames.items()}


def mota_motp(ledger: EvalLedger) -> Tuple[float, float]:
    """
    Returns:
        Tuple containing:
            - (float): mota. `1 - (FP + FN + IDS) / GT`, unclamped so it can be negative.
            - (float): motp. Mean IoU of the matches, zero without matches.

    Raises:
        EmptyGTError: no ground truth box was accumulated.
    """
    n_gt = ledger.total("gt")
    if len(ledger.counts) == 0 or n_gt == 0:
        raise EmptyGTError("MOTA needs at least one ground truth box")
    mota = 1 - (ledger.total("fp") + ledger.total("fn") + ledger.total("ids")) / n_gt
    n_matches = ledger.total("matches")
    motp = ledger.total("overlap_sum") / n_matches if n_matches > 0 else 0.0
    return float(mota), float(motp)


def mt_ml(ledger: EvalLedger) -> Tuple[int, int]:
    """
    Returns:
        Tuple containing:
            - (int): mt. Ground truth tracks covered more than 80% of their frames.
            - (int): ml. Ground truth tracks covered less than 20% of their frames.
    """
    coverage = ledger.coverage()
    mt = sum([fraction > MOSTLY_TRACKED for fraction in coverage.values()])
    ml = sum([fraction < MOSTLY_LOST for fraction in coverage.values()])
    return int(mt), int(ml)
