from .base import (
    ProbabilityGrid,
    ZeroMassError,
    entropy,
    expectation,
    map_peak,
    multiply_update,
    normalize,
    probability_grid_from_gaussian,
)
from .kernel import GaussianKernel, NonPSDError, convolve, gaussian_kernel

__all__ = [
    "ProbabilityGrid",
    "ZeroMassError",
    "entropy",
    "expectation",
    "map_peak",
    "multiply_update",
    "normalize",
    "probability_grid_from_gaussian",
    "GaussianKernel",
    "NonPSDError",
    "convolve",
    "gaussian_kernel",
]
