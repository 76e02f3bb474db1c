from .base import (
    ConfigInvalidError,
    FrameObservation,
    FrameOutOfRangeError,
    Identity,
    Scenario,
    ScenarioConfig,
    calibrate_entropy_fraction,
    calibrate_n_app,
    generate_scenario,
    render_frame,
)
from .io import load_scenario, save_scenario

__all__ = [
    "ConfigInvalidError",
    "FrameObservation",
    "FrameOutOfRangeError",
    "Identity",
    "Scenario",
    "ScenarioConfig",
    "calibrate_entropy_fraction",
    "calibrate_n_app",
    "generate_scenario",
    "render_frame",
    "load_scenario",
    "save_scenario",
]
