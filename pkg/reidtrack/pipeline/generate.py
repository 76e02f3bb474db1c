import os

from .. import log
from ..metrics import io as metrics_io
from ..setup.config import Config
from ..simworld import io as simworld_io
from ..simworld.base import ScenarioConfig, generate_scenario
from . import run

SCENARIO_FILE_NAME = "scenario.json"


def generate(config: Config) -> str:
    """
    Generate the configured scenario and save it, with its ground truth box table, into the output directory.

    Returns:
        str: scenario_path. Path of the scenario JSON, usable as `file_names.scenario` of later runs.
    """
    output_dir = config["file_names"]["output_dir"]
    os.makedirs(output_dir, exist_ok=True)
    scenario = generate_scenario(ScenarioConfig.from_config(config))
    scenario_path = os.path.join(output_dir, SCENARIO_FILE_NAME)
    simworld_io.save_scenario(scenario, scenario_path)
    metrics_io.write_boxes(
        run.gt_table(scenario, config["bboxreg"]["aspect"]), os.path.join(output_dir, run.GT_FILE_NAME)
    )
    log.info(f"Scenario saved at {scenario_path}")
    return scenario_path
