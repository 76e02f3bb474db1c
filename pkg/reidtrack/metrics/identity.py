from typing import Tuple

import numpy as np
import pandas as pd
import scipy

from .base import EmptyGTError, MetricsConfig, pair_costs


def id_measures(gt: pd.DataFrame, hyp: pd.DataFrame, cfg: MetricsConfig) -> Tuple[float, float, float]:
    """
    Identity precision, recall and F1 from the best one to one assignment of ground truth ids to hypothesis ids over the
    whole sequence. A pair of ids scores one true positive per frame where their boxes may correspond.

    Args:
        gt (pd.DataFrame): ground truth box table, see `metrics.io.BOX_COLUMNS`.
        hyp (pd.DataFrame): hypothesis box table.
        cfg (MetricsConfig): the correspondence criterion.

    Returns:
        Tuple containing:
            - (float): idf1. `2 IDTP / (2 IDTP + IDFP + IDFN)`.
            - (float): idp. `IDTP / (IDTP + IDFP)`, zero without hypotheses.
            - (float): idr. `IDTP / (IDTP + IDFN)`.

    Raises:
        EmptyGTError: the ground truth table is empty.
    """
    if len(gt) == 0:
        raise EmptyGTError("Identity measures need at least one ground truth box")
    gt_ids = np.unique(gt["id"].to_numpy())
    hyp_ids = np.unique(hyp["id"].to_numpy())
    gt_index = {gt_id: i for i, gt_id in enumerate(gt_ids)}
    hyp_index = {hyp_id: j for j, hyp_id in enumerate(hyp_ids)}

    # Frames in which each id pair may correspond.
    shared = np.zeros((gt_ids.size, hyp_ids.size), np.int64)
    hyp_frames = dict(tuple(hyp.groupby("frame")))
    for frame, gt_frame in gt.groupby("frame"):
        if frame not in hyp_frames:
            continue
        hyp_frame = hyp_frames[frame]
        gt_boxes = gt_frame[["x", "y", "w", "h"]].to_numpy(np.float64)
        hyp_boxes = hyp_frame[["x", "y", "w", "h"]].to_numpy(np.float64)
        _, valid, _ = pair_costs(gt_boxes, hyp_boxes, cfg)
        rows = [gt_index[i] for i in gt_frame["id"]]
        cols = [hyp_index[j] for j in hyp_frame["id"]]
        shared[np.ix_(rows, cols)] += valid.astype(np.int64)

    idtp = 0
    if shared.size > 0:
        rows, cols = scipy.optimize.linear_sum_assignment(shared, maximize=True)
        idtp = int(shared[rows, cols].sum())
    idfn = len(gt) - idtp
    idfp = len(hyp) - idtp

    idp = idtp / (idtp + idfp) if idtp + idfp > 0 else 0.0
    idr = idtp / (idtp + idfn)
    idf1 = 2 * idtp / (2 * idtp + idfp + idfn)
    return float(idf1), float(idp), float(idr)
