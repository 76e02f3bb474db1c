from .base import (
    AssociationConfig,
    Detection,
    TrackManagementConfig,
    associate,
    combined_distance,
    hungarian,
)
from .tracker import KalmanTrack, TrackerWorld, emit_boxes, step

__all__ = [
    "AssociationConfig",
    "Detection",
    "TrackManagementConfig",
    "associate",
    "combined_distance",
    "hungarian",
    "KalmanTrack",
    "TrackerWorld",
    "emit_boxes",
    "step",
]
