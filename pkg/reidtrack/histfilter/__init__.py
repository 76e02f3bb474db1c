from .base import (
    FilterParameters,
    GaussianBelief2D,
    OutOfBoundsError,
    TrackState,
    emit,
    init_track,
    measure_velocity,
    predict,
    update,
)
from .tracker import IntegratedTracker

__all__ = [
    "FilterParameters",
    "GaussianBelief2D",
    "OutOfBoundsError",
    "TrackState",
    "emit",
    "init_track",
    "measure_velocity",
    "predict",
    "update",
    "IntegratedTracker",
]
