from typing import Tuple

import filterpy.kalman
import numpy as np

# Constant velocity transition on the state (x, y, vx, vy).
TRANSITION = np.array(
    [
        [1, 0, 1, 0],
        [0, 1, 0, 1],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
    ],
    np.float64,
)
# Measurements are centre points.
MEASUREMENT = np.array(
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
    ],
    np.float64,
)


class KFState:
    """
    A first order Kalman filter state on one centre point.

    Attributes:
        mean (`(4) ndarray[float64]`): `(x, y, vx, vy)` in pixels and pixels per frame.
        covariance (`(4 x 4) ndarray[float64]`): symmetric positive-definite covariance.
    """

    mean: np.ndarray
    covariance: np.ndarray

    def __init__(self, mean: np.ndarray, covariance: np.ndarray) -> None:
        mean = np.asarray(mean, np.float64)
        covariance = np.asarray(covariance, np.float64)
        assert mean.shape == (4,)
        assert covariance.shape == (4, 4)
        self.mean = mean
        self.covariance = covariance

    @property
    def position(self) -> Tuple[float, float]:
        return float(self.mean[0]), float(self.mean[1])


def init_state(center: Tuple[float, float], p_init_diag: Tuple[float, ...]) -> KFState:
    """
    A state at rest on the given centre point.

    Args:
        center (tuple of two floats): `(x, y)` pixel position.
        p_init_diag (tuple of four floats): initial variances of `(x, y, vx, vy)`.

    Returns:
        KFState: state.
    """
    assert len(p_init_diag) == 4
    return KFState(np.array([center[0], center[1], 0, 0], np.float64), np.diag(np.array(p_init_diag, np.float64)))


def kf_predict(s: KFState, Q: np.ndarray) -> KFState:
    """
    Constant velocity prediction, `x += vx` and `y += vy`, with covariance `F P F^T + Q`.

    Args:
        s (KFState): state.
        Q (`(4 x 4) ndarray[float]`): process noise covariance.

    Returns:
        KFState: prediction.
    """
    assert Q.shape == (4, 4)
    mean, covariance = filterpy.kalman.predict(s.mean, s.covariance, F=TRANSITION, Q=Q)
    return KFState(mean, _symmetrise(covariance))


def kf_update(s: KFState, z: np.ndarray, R: np.ndarray) -> KFState:
    """
    Kalman update on a centre point measurement. The covariance is updated with the Joseph form.

    Args:
        s (KFState): predicted state.
        z (`(2) ndarray[float]`): `(x, y)` measurement in pixels.
        R (`(2 x 2) ndarray[float]`): measurement noise covariance.

    Returns:
        KFState: posterior.
    """
    z = np.asarray(z, np.float64)
    assert z.shape == (2,)
    assert R.shape == (2, 2)
    mean, covariance = filterpy.kalman.update(s.mean, s.covariance, z, R, H=MEASUREMENT)
    return KFState(mean, _symmetrise(covariance))


def _symmetrise(covariance: np.ndarray) -> np.ndarray:
    return (covariance + covariance.T) / 2
