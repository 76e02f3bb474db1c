import os
from typing import Any, Iterable, Optional, Tuple

import joblib
import pandas as pd
from joblib.externals import loky

from .. import log
from ..metrics.evaluate import METRIC_NAMES
from ..setup.config import Config
from ..utils import system as utils_system
from . import run


def parse_sweep(sweep_arg: str) -> Tuple[str, list[str]]:
    """
    Parse a sweep argument of the form `section.parameter=value_1,value_2,...`.

    Returns:
        Tuple containing:
            - (str): key. The swept `section.parameter`.
            - (list of str): values. Each value as written, in order.
    """
    if "=" not in sweep_arg:
        raise ValueError(f"Sweep {sweep_arg} must have the form section.parameter=value_1,value_2,...")
    key, values = sweep_arg.split("=", 1)
    key = key.strip()
    values = [value.strip() for value in values.split(",")]
    if key.count(".") != 1 or not all(key.split(".")):
        raise ValueError(f"Sweep key {key} must have the form section.parameter")
    if len(values) == 0 or any(value == "" for value in values):
        raise ValueError(f"Sweep {sweep_arg} has an empty value")
    return key, values


def _sweep_config(config_path: Optional[str], overrides: Iterable[str], key: str, value: str) -> Config:
    config = run.load_config(config_path, list(overrides) + [f"{key}={value}"])
    section, param_name = key.split(".")
    if param_name not in config[section]:
        raise ValueError(f"Unknown sweep parameter {param_name} in section {section}")
    return config


def _score_point(
    config_path: Optional[str], overrides: list[str], key: str, value: str, tracker: Optional[str]
) -> dict[str, Any]:
    config = _sweep_config(config_path, overrides, key, value)
    if tracker is None:
        tracker = config["run"]["tracker"]
    metrics, _, _ = run.score(config, tracker, progress=False)
    return metrics


def _as_number(value: str) -> float | str:
    try:
        return float(value)
    except ValueError:
        return value


def sweep_path(config: Config, sweep_arg: str) -> str:
    """
    Path of the table written by a sweep.
    """
    key, _ = parse_sweep(sweep_arg)
    return os.path.join(config["file_names"]["output_dir"], f"sweep_{key}.csv")


def sweep(
    config_path: Optional[str],
    overrides: Optional[Iterable[str]],
    sweep_arg: str,
    tracker: Optional[str] = None,
) -> pd.DataFrame:
    """
    Score one tracker at every value of a swept config parameter. Each value is tracked in its own worker and the
    results are written to `sweep_<key>.csv` in the output directory.

    Args:
        config_path (str, optional): user config file. Default: defaults only.
        overrides (iterable of str, optional): `section.parameter=value` overrides applied before the swept value.
        sweep_arg (str): the sweep, `section.parameter=value_1,value_2,...`.
        tracker (str, optional): tracker variant. Default: `run.tracker` of the config.

    Returns:
        `(n_values x (1 + n_metrics)) pd.DataFrame`: table. The swept value followed by every metric, one row per
            value.
    """
    overrides = [] if overrides is None else list(overrides)
    key, values = parse_sweep(sweep_arg)
    # Every swept config is loaded up front so a bad value fails before any worker starts.
    configs = [_sweep_config(config_path, overrides, key, value) for value in values]
    config = configs[0]
    n_jobs = config["run"]["n_jobs"]
    if n_jobs is None:
        n_jobs = utils_system.get_core_count()
    n_jobs = max(min(n_jobs, len(values)), 1)
    log.info(f"Sweeping {key} over {len(values)} values with {n_jobs} workers")

    results = joblib.Parallel(n_jobs=n_jobs)(
        joblib.delayed(_score_point)(config_path, overrides, key, value, tracker) for value in values
    )
    loky.get_reusable_executor().shutdown(wait=True)

    table = pd.DataFrame(
        [[_as_number(value)] + [metrics[name] for name in METRIC_NAMES] for value, metrics in zip(values, results)],
        columns=[key, *METRIC_NAMES],
    )
    os.makedirs(config["file_names"]["output_dir"], exist_ok=True)
    table_path = sweep_path(config, sweep_arg)
    table.to_csv(table_path, index=False)
    log.info(f"Sweep table written to {table_path}")
    return table
