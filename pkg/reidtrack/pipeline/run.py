import os
from typing import Any, Iterable, Optional, Tuple

import numpy as np
import pandas as pd
import tqdm

from .. import log
from ..assoc import tracker as assoc_tracker
from ..assoc.base import AssociationConfig, TrackManagementConfig
from ..bboxreg import base as bboxreg_base
from ..bboxreg.base import BBoxRegressor, NonPositiveHeightError, OutputBox
from ..grid import io as grid_io
from ..histfilter.base import FilterParameters
from ..histfilter.tracker import IntegratedTracker
from ..metrics import io as metrics_io
from ..metrics.base import MetricsConfig
from ..metrics.evaluate import evaluate
from ..setup.config import TRACKER_NAMES, Config
from ..simworld import io as simworld_io
from ..simworld.base import (
    FrameObservation,
    Scenario,
    ScenarioConfig,
    calibrate_entropy_fraction,
    calibrate_n_app,
    generate_scenario,
)
from ..utils import system as utils_system

# Association mode of each detection based tracker.
NNKF_MODES = {"nnkf": "pos", "nnkf_gt": "pos", "nnkf_reid": "combined", "nnkf_only_reid": "app"}
INTEGRATED = ("integrated", "integrated_entropy")
GT_INITIALISED = ("nnkf_gt", "nnkf_reid", "nnkf_only_reid", "integrated", "integrated_entropy")
GT_FILE_NAME = "gt.csv"
FRAMES_DIR_NAME = "frames"


def load_config(config_path: Optional[str] = None, overrides: Optional[Iterable[str]] = None) -> Config:
    """
    Load a user config file on top of the defaults, then apply `section.parameter=value` overrides.
    """
    config = Config()
    config.load(config_path, overrides=overrides)
    return config


def initialise_output(config: Config) -> str:
    """
    Create the output directory and send the log there.

    Returns:
        str: output_dir. The output directory path.
    """
    config_file = config["file_names"]
    output_dir = config_file["output_dir"]
    os.makedirs(output_dir, exist_ok=True)
    log.base.set_log_config(
        config["logging"]["minimum_print_severity"], os.path.join(output_dir, config_file["log_name"])
    )
    log.info(f" REIDTRACK v{utils_system.get_software_version()} ".center(60, "="))
    log.base.log_package_versions()
    return output_dir


def get_scenario(config: Config) -> Scenario:
    """
    Load the configured scenario file, or generate the scenario from the `scenario` section when none is given.
    """
    scenario_path = config["file_names"]["scenario"]
    if scenario_path is not None:
        return simworld_io.load_scenario(scenario_path)
    return generate_scenario(ScenarioConfig.from_config(config))


def get_regressor(config: Config, scenario: Scenario) -> BBoxRegressor:
    """
    The configured regressor, or one fitted on the scenario's ground truth when the slope or intercept is not set.
    """
    config_reg = config["bboxreg"]
    if config_reg["slope"] is not None and config_reg["intercept"] is not None:
        return BBoxRegressor(config_reg["slope"], config_reg["intercept"], config_reg["aspect"], config_reg["scale"])
    regressor = bboxreg_base.fit_from_scenario(scenario, config_reg["aspect"], config_reg["scale"])
    log.debug(f"Fitted box regressor {regressor.to_dict()}")
    return regressor


def get_n_app(config: Config, scenario: Scenario) -> Tuple[float, float]:
    """
    Appearance normalisers, calibrated on the scenario's embedding noise when not configured.

    Returns:
        Tuple containing:
            - (float): assoc_n_app. Normaliser of appearance distances during association.
            - (float): measurement_n_app. The missing measurement threshold of the integrated tracker.
    """
    assoc_n_app = config["assoc"]["n_app"]
    measurement_n_app = config["measurement"]["n_app"]
    if assoc_n_app is None or measurement_n_app is None:
        median, upper = calibrate_n_app(scenario, config["measurement"]["n_app_quantile"])
        if assoc_n_app is None:
            assoc_n_app = max(median, config["assoc"]["n_app_floor"])
        if measurement_n_app is None:
            measurement_n_app = max(upper, config["measurement"]["n_app_floor"])
    return assoc_n_app, measurement_n_app


def get_entropy_fraction(config: Config, scenario: Scenario) -> float:
    """
    The entropy gate fraction, calibrated on the scenario when not configured: the `entropy_quantile` quantile of the
    likelihood entropies seen while identities are in view, floored at `entropy_fraction_floor`.
    """
    config_measurement = config["measurement"]
    fraction = config_measurement["entropy_fraction"]
    if fraction is None:
        calibrated = calibrate_entropy_fraction(
            scenario, config_measurement["temperature"], config_measurement["entropy_quantile"]
        )
        fraction = min(max(calibrated, config_measurement["entropy_fraction_floor"]), 1.0)
    return fraction


def gt_table(scenario: Scenario, aspect: float) -> pd.DataFrame:
    """
    The scenario's ground truth as a box table, box widths being `aspect` times the true heights.
    """
    boxes = [
        OutputBox(ident_id, observation.frame, center, aspect * height, height)
        for observation in scenario.frames
        for ident_id, center, height in observation.gt_boxes
    ]
    return metrics_io.boxes_to_table(boxes)


def _frames(scenario: Scenario, tracker: str, progress: bool) -> Iterable[FrameObservation]:
    return tqdm.tqdm(scenario.frames, desc=f"Tracking with {tracker}", unit="frame", disable=not progress)


def _track_nnkf(
    tracker: str, scenario: Scenario, config: Config, regressor: BBoxRegressor, progress: bool
) -> list[OutputBox]:
    gt_init = tracker in GT_INITIALISED
    assoc_n_app, _ = get_n_app(config, scenario)
    ac = AssociationConfig.from_config(config, NNKF_MODES[tracker], assoc_n_app)
    tm = TrackManagementConfig.from_config(config, gt_init)
    config_kalman = config["kalman"]
    world = assoc_tracker.TrackerWorld(
        np.diag(config_kalman["q_diag"]), np.eye(2) * config_kalman["r_var"], config_kalman["p_init_diag"]
    )
    boxes = []
    for observation in _frames(scenario, tracker, progress):
        gt_starts = None
        if gt_init:
            gt_starts = [
                (center, observation.identity_embeddings[ident_id])
                for ident_id, center in scenario.gt_starts(observation.frame)
            ]
        assoc_tracker.step(world, observation.detections, tm, ac, observation.frame, gt_starts)
        boxes += assoc_tracker.emit_boxes(world, regressor, tm)
    return boxes


def _track_integrated(
    tracker: str,
    scenario: Scenario,
    config: Config,
    regressor: BBoxRegressor,
    progress: bool,
    dump_dir: Optional[str],
) -> list[OutputBox]:
    _, measurement_n_app = get_n_app(config, scenario)
    entropy_fraction = get_entropy_fraction(config, scenario) if tracker == "integrated_entropy" else None
    params = FilterParameters.from_config(config, measurement_n_app, entropy_fraction)
    n_rows, n_cols = scenario.config.grid_shape
    integrated = IntegratedTracker(n_cols, n_rows, scenario.config.cell_size, params, regressor)
    boxes = []
    for observation in _frames(scenario, tracker, progress):
        for ident_id, center in scenario.gt_starts(observation.frame):
            integrated.start_track(center, observation.identity_embeddings[ident_id], observation.frame)
        boxes += integrated.step(observation.frame, observation.embedding_map)
        if dump_dir is not None:
            posterior = integrated.summed_posterior()
            if posterior is not None:
                grid_io.write_pgm(posterior, os.path.join(dump_dir, f"posterior_{observation.frame:05d}.pgm"))
    return boxes


def _track_gt_regressed(scenario: Scenario, regressor: BBoxRegressor) -> list[OutputBox]:
    boxes = []
    for observation in scenario.frames:
        for ident_id, center, _ in observation.gt_boxes:
            try:
                width, height = regressor.regress(center)
            except NonPositiveHeightError as e:
                log.debug(f"Identity {ident_id} gets no regressed box on frame {observation.frame}: {e}")
                continue
            boxes.append(OutputBox(ident_id, observation.frame, center, width, height))
    return boxes


def track(
    tracker: str,
    scenario: Scenario,
    config: Config,
    dump_dir: Optional[str] = None,
    progress: bool = True,
) -> list[OutputBox]:
    """
    Run one tracker variant over every frame of a scenario.

    Args:
        tracker (str): one of `TRACKER_NAMES`.
        scenario (Scenario): the rendered scenario.
        config (Config): the loaded config.
        dump_dir (str, optional): directory to write each frame's summed track posterior into as PGM images. Only the
            integrated trackers have posteriors. Default: no dumps.
        progress (bool, optional): show a progress bar. Default: true.

    Returns:
        list of OutputBox: boxes. Every output box, in frame order.
    """
    assert tracker in TRACKER_NAMES, f"Unknown tracker {tracker}"
    assert len(scenario.frames) == scenario.config.frames, "The scenario must be rendered"
    regressor = get_regressor(config, scenario)
    if dump_dir is not None:
        os.makedirs(dump_dir, exist_ok=True)
        if tracker not in INTEGRATED:
            log.warn(f"Tracker {tracker} has no posterior grids to dump")

    if tracker in NNKF_MODES:
        boxes = _track_nnkf(tracker, scenario, config, regressor, progress)
    elif tracker in INTEGRATED:
        boxes = _track_integrated(tracker, scenario, config, regressor, progress, dump_dir)
    else:
        boxes = _track_gt_regressed(scenario, regressor)
    log.debug(f"Tracker {tracker} output {len(boxes)} boxes")
    return boxes


def score(
    config: Config, tracker: str, dump_dir: Optional[str] = None, progress: bool = True
) -> Tuple[dict[str, Any], pd.DataFrame, pd.DataFrame]:
    """
    Track the configured scenario and score the output, without writing result files.

    Returns:
        Tuple containing:
            - (dict[str, Any]): metrics. See `metrics.evaluate`.
            - (pd.DataFrame): gt. Ground truth box table.
            - (pd.DataFrame): hyp. Hypothesis box table.
    """
    scenario = get_scenario(config)
    hyp = metrics_io.boxes_to_table(track(tracker, scenario, config, dump_dir, progress))
    gt = gt_table(scenario, config["bboxreg"]["aspect"])
    metrics = evaluate(gt, hyp, MetricsConfig.from_config(config))
    return metrics, gt, hyp


def run(config: Config, tracker: Optional[str] = None, progress: bool = True) -> dict[str, Any]:
    """
    Track a scenario and score the result. Writes the ground truth and hypothesis box tables and the metrics JSON into
    the output directory.

    Args:
        config (Config): the loaded config.
        tracker (str, optional): tracker variant. Default: `run.tracker` of the config.
        progress (bool, optional): show a progress bar. Default: true.

    Returns:
        dict[str, Any]: metrics. See `metrics.evaluate`.
    """
    if tracker is None:
        tracker = config["run"]["tracker"]
    output_dir = config["file_names"]["output_dir"]
    os.makedirs(output_dir, exist_ok=True)

    dump_dir = os.path.join(output_dir, FRAMES_DIR_NAME, tracker) if config["run"]["dump_frames"] else None
    metrics, gt, hyp = score(config, tracker, dump_dir, progress)
    metrics_io.write_boxes(gt, os.path.join(output_dir, GT_FILE_NAME))
    metrics_io.write_boxes(hyp, os.path.join(output_dir, f"{tracker}.csv"))
    metrics_io.write_metrics(metrics, os.path.join(output_dir, f"{tracker}_metrics.json"))
    log.info(f"{tracker}: MOTA {metrics['MOTA']:.3f}, MOTP {metrics['MOTP']:.3f}, IDF1 {metrics['IDF1']:.3f}")
    return metrics
