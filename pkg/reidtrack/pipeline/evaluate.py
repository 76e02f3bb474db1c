import os
from typing import Any, Optional

from .. import log
from ..metrics import io as metrics_io
from ..metrics.base import MetricsConfig
from ..metrics.evaluate import evaluate
from ..setup.config import Config


def evaluate_files(gt_path: str, hyp_path: str, config: Config, metrics_path: Optional[str] = None) -> dict[str, Any]:
    """
    Score a hypothesis box table CSV against a ground truth CSV.

    Args:
        gt_path (str): ground truth CSV.
        hyp_path (str): hypothesis CSV.
        config (Config): the loaded config, its `metrics` section is used.
        metrics_path (str, optional): JSON file to write the metrics into. Default: `<hyp_path stem>_metrics.json`.

    Returns:
        dict[str, Any]: metrics.
    """
    gt = metrics_io.read_boxes(gt_path)
    hyp = metrics_io.read_boxes(hyp_path)
    metrics = evaluate(gt, hyp, MetricsConfig.from_config(config))
    if metrics_path is None:
        metrics_path = os.path.splitext(hyp_path)[0] + "_metrics.json"
    metrics_io.write_metrics(metrics, metrics_path)
    log.info(f"Metrics written to {metrics_path}")
    return metrics
