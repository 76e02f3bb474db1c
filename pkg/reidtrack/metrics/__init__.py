from .base import EmptyGTError, EvalLedger, FrameCounts, MetricsConfig, iou, match_frame, mota_motp, mt_ml
from .evaluate import METRIC_NAMES, accumulate, evaluate
from .identity import id_measures
from .io import BOX_COLUMNS, boxes_to_table, read_boxes, read_metrics, write_boxes, write_metrics

__all__ = [
    "EmptyGTError",
    "EvalLedger",
    "FrameCounts",
    "MetricsConfig",
    "iou",
    "match_frame",
    "mota_motp",
    "mt_ml",
    "METRIC_NAMES",
    "accumulate",
    "evaluate",
    "id_measures",
    "BOX_COLUMNS",
    "boxes_to_table",
    "read_boxes",
    "read_metrics",
    "write_boxes",
    "write_metrics",
]
