from .base import (
    DimMismatchError,
    DistanceGrid,
    EmbeddingMap,
    distance_map,
    distance_maps,
    gate_entropy,
    gate_missing,
    softmin,
)

__all__ = [
    "DimMismatchError",
    "DistanceGrid",
    "EmbeddingMap",
    "distance_map",
    "distance_maps",
    "gate_entropy",
    "gate_missing",
    "softmin",
]
