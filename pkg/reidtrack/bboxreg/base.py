from typing import Any, Tuple

import numpy as np


class DegenerateError(ValueError):
    """
    Raised when the regression samples cannot determine a line, i.e. fewer than two distinct centre y positions.
    """


class NonPositiveHeightError(ValueError):
    """
    Raised when the regressor would produce a box without a positive height.
    """


class OutputBox:
    """
    One tracker output box.

    Attributes:
        track_id (int): the track's id.
        frame (int): frame index.
        center (tuple of two floats): `(x, y)` box centre in pixels.
        width (float): box width in pixels.
        height (float): box height in pixels.
    """

    track_id: int
    frame: int
    center: Tuple[float, float]
    width: float
    height: float

    def __init__(self, track_id: int, frame: int, center: Tuple[float, float], width: float, height: float) -> None:
        self.track_id = int(track_id)
        self.frame = int(frame)
        self.center = (float(center[0]), float(center[1]))
        self.width = float(width)
        self.height = float(height)

    def to_row(self) -> Tuple[int, int, float, float, float, float]:
        """
        The box as a results table row `(frame, id, x, y, w, h)` with `(x, y)` the box centre.
        """
        return self.frame, self.track_id, self.center[0], self.center[1], self.width, self.height

    def __repr__(self) -> str:
        return (
            f"OutputBox(track_id={self.track_id}, frame={self.frame}, center={self.center}, width={self.width}, "
            + f"height={self.height})"
        )


class BBoxRegressor:
    """
    Camera specific box regressor. Every person standing at the same image row is given the same height, a linear
    function of the box centre's y position. The width is a fixed fraction of the height.

    Attributes:
        slope (float): pixels of height per pixel of centre y.
        intercept (float): height in pixels at y = 0.
        aspect (float): width divided by height.
        scale (float): multiplier applied to the regressed height.
    """

    slope: float
    intercept: float
    aspect: float
    scale: float

    def __init__(self, slope: float, intercept: float, aspect: float = 0.4, scale: float = 1.0) -> None:
        assert aspect > 0
        assert scale > 0
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.aspect = float(aspect)
        self.scale = float(scale)

    def with_scale(self, scale: float) -> "BBoxRegressor":
        return BBoxRegressor(self.slope, self.intercept, self.aspect, scale)

    def regress(self, center: Tuple[float, float]) -> Tuple[float, float]:
        """
        Args:
            center (tuple of two floats): `(x, y)` box centre in pixels.

        Returns:
            Tuple containing:
                - (float): width. Box width in pixels.
                - (float): height. Box height in pixels.

        Raises:
            NonPositiveHeightError: the regressed height is not positive at the given y.
        """
        height = self.scale * (self.slope * float(center[1]) + self.intercept)
        if height <= 0:
            raise NonPositiveHeightError(f"Regressed height {height} at y={center[1]} is not positive")
        return self.aspect * height, height

    def to_dict(self) -> dict[str, Any]:
        return {"slope": self.slope, "intercept": self.intercept, "aspect": self.aspect, "scale": self.scale}


def fit(samples: np.ndarray, aspect: float = 0.4, scale: float = 1.0) -> BBoxRegressor:
    """
    Least squares line of box height against box centre y.

    Args:
        samples (`(n_samples x 2) ndarray[float]`): each row is a `(center_y, height)` pair in pixels.
        aspect (float, optional): width to height ratio of the regressor. Default: 0.4.
        scale (float, optional): height multiplier of the regressor. Default: 1.

    Returns:
        BBoxRegressor: regressor.

    Raises:
        DegenerateError: fewer than two distinct centre y positions.
    """
    samples = np.asarray(samples, np.float64)
    assert samples.ndim == 2 and samples.shape[1] == 2
    if samples.shape[0] < 2 or np.unique(samples[:, 0]).size < 2:
        raise DegenerateError(f"Need two distinct centre y positions to fit, got {np.unique(samples[:, 0]).size}")

    slope, intercept = np.polyfit(samples[:, 0], samples[:, 1], deg=1)
    return BBoxRegressor(slope, intercept, aspect, scale)


def fit_from_scenario(scenario, aspect: float = 0.4, scale: float = 1.0) -> BBoxRegressor:
    """
    Fit the regressor on every ground truth box of a scenario, as a per camera calibration.

    Args:
        scenario (Scenario): the scenario.
        aspect (float, optional): width to height ratio. Default: 0.4.
        scale (float, optional): height multiplier. Default: 1.

    Returns:
        BBoxRegressor: regressor.
    """
    return fit(scenario.height_samples(), aspect, scale)
