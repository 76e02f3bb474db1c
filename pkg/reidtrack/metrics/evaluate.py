from typing import Any

import numpy as np
import pandas as pd

from .. import log
from .base import EvalLedger, MetricsConfig, mota_motp, mt_ml
from .identity import id_measures

METRIC_NAMES = ("IDF1", "IDP", "IDR", "total", "MT", "ML", "FP", "FN", "IDS", "MOTA", "MOTP")


def _boxes_by_frame(table: pd.DataFrame) -> dict[int, dict[int, tuple[float, float, float, float]]]:
    boxes = {}
    for frame, id, x, y, w, h in table[["frame", "id", "x", "y", "w", "h"]].itertuples(index=False, name=None):
        boxes.setdefault(int(frame), {})[int(id)] = (float(x), float(y), float(w), float(h))
    return boxes


def accumulate(gt: pd.DataFrame, hyp: pd.DataFrame, cfg: MetricsConfig) -> EvalLedger:
    """
    Run the CLEAR correspondence over every frame with a ground truth or hypothesis box, in frame order.
    """
    gt_frames = _boxes_by_frame(gt)
    hyp_frames = _boxes_by_frame(hyp)
    ledger = EvalLedger(cfg)
    for frame in sorted(set(gt_frames) | set(hyp_frames)):
        ledger.add_frame(frame, gt_frames.get(frame, {}), hyp_frames.get(frame, {}))
    return ledger


def evaluate(gt: pd.DataFrame, hyp: pd.DataFrame, cfg: MetricsConfig) -> dict[str, Any]:
    """
    Score a hypothesis box table against the ground truth.

    Args:
        gt (pd.DataFrame): ground truth box table.
        hyp (pd.DataFrame): hypothesis box table.
        cfg (MetricsConfig): metrics config.

    Returns:
        dict[str, Any]: metrics. Keyed by `METRIC_NAMES`. Counts are ints, scores floats.

    Raises:
        EmptyGTError: the ground truth table is empty.
    """
    ledger = accumulate(gt, hyp, cfg)
    mota, motp = mota_motp(ledger)
    mt, ml = mt_ml(ledger)
    idf1, idp, idr = id_measures(gt, hyp, cfg)
    metrics = {
        "IDF1": idf1,
        "IDP": idp,
        "IDR": idr,
        "total": int(np.unique(gt["id"]).size),
        "MT": mt,
        "ML": ml,
        "FP": int(ledger.total("fp")),
        "FN": int(ledger.total("fn")),
        "IDS": int(ledger.total("ids")),
        "MOTA": mota,
        "MOTP": motp,
    }
    log.debug(f"Evaluated {len(ledger.frames)} frames: MOTA {mota:.4f}, IDF1 {idf1:.4f}, IDS {metrics['IDS']}")
    return metrics
