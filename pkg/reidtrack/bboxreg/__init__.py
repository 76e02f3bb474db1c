from .base import BBoxRegressor, DegenerateError, NonPositiveHeightError, OutputBox, fit, fit_from_scenario

__all__ = ["BBoxRegressor", "DegenerateError", "NonPositiveHeightError", "OutputBox", "fit", "fit_from_scenario"]
