import math
from typing import Optional

import numpy as np
import scipy

from .base import ProbabilityGrid, ZeroMassError, normalize


class NonPSDError(ValueError):
    """
    Raised when a kernel covariance is not symmetric positive-definite.
    """


class GaussianKernel:
    """
    A truncated, discretised Gaussian transition kernel. `support[radius + d_row, radius + d_col]` is the probability
    of moving by `(d_row, d_col)` cells in one frame.

    Attributes:
        mean (`(2) ndarray[float]`): shift in cells per frame, ordered `(row, col)`.
        covariance (`(2 x 2) ndarray[float]`): covariance in cells squared, ordered `(row, col)`.
        radius (int): the support spans `[-radius, radius]` cells along both axes.
        support (`(2 * radius + 1 x 2 * radius + 1) ndarray[float64]`): weights summing to one.
    """

    mean: np.ndarray
    covariance: np.ndarray
    radius: int
    support: np.ndarray

    def __init__(self, mean: np.ndarray, covariance: np.ndarray, radius: int, support: np.ndarray) -> None:
        assert support.shape == (2 * radius + 1, 2 * radius + 1)
        self.mean = mean
        self.covariance = covariance
        self.radius = radius
        self.support = support


def minimum_radius(mean: np.ndarray, cov: np.ndarray, sigma_cutoff: float = 3.0) -> int:
    """
    The smallest kernel radius holding `sigma_cutoff` standard deviations along the widest axis, plus the shift.
    """
    max_eigenvalue = float(np.linalg.eigvalsh(cov).max())
    # Rounding noise in the eigenvalues must not add a cell.
    return int(math.ceil(sigma_cutoff * math.sqrt(max_eigenvalue) + float(np.abs(mean).max()) - 1e-9))


def gaussian_kernel(
    mean: np.ndarray, cov: np.ndarray, radius: Optional[int] = None, sigma_cutoff: float = 3.0
) -> GaussianKernel:
    """
    Discretise a bivariate Gaussian over integer cell offsets.

    Args:
        mean (`(2) ndarray[float]`): kernel shift in cells, ordered `(row, col)`.
        cov (`(2 x 2) ndarray[float]`): kernel covariance in cells squared, ordered `(row, col)`. A vanishingly small
            covariance gives a delta at the rounded mean.
        radius (int, optional): support radius in cells. Default: the minimum radius for `sigma_cutoff`.
        sigma_cutoff (float, optional): number of standard deviations the support must cover. Default: 3.

    Returns:
        GaussianKernel: kernel. Truncated weights, renormalized to sum to one.

    Raises:
        NonPSDError: `cov` is not symmetric positive-definite.
    """
    mean = np.asarray(mean, np.float64)
    cov = np.asarray(cov, np.float64)
    assert mean.shape == (2,)
    assert cov.shape == (2, 2)
    if not np.isfinite(cov).all() or not np.allclose(cov, cov.T, rtol=0, atol=1e-12):
        raise NonPSDError(f"Kernel covariance must be symmetric, got {cov.tolist()}")
    if np.linalg.eigvalsh(cov).min() <= 0:
        raise NonPSDError(f"Kernel covariance must be positive-definite, got {cov.tolist()}")
    required_radius = minimum_radius(mean, cov, sigma_cutoff)
    if radius is None:
        radius = required_radius
    if radius < required_radius:
        raise ValueError(f"Kernel radius {radius} is below the required {required_radius} for {sigma_cutoff} sigma")

    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    d_row, d_col = np.meshgrid(offsets - mean[0], offsets - mean[1], indexing="ij")
    deltas = np.stack([d_row, d_col], axis=-1)
    precision = np.linalg.inv(cov)
    log_density = -0.5 * np.einsum("...i,ij,...j->...", deltas, precision, deltas)
    # Evaluated in log space with a max shift, so tiny covariances collapse to a delta instead of all zeros.
    support = np.exp(log_density - log_density.max())
    support /= support.sum()

    return GaussianKernel(mean, cov, radius, support)


def convolve(posterior: ProbabilityGrid, k: GaussianKernel) -> ProbabilityGrid:
    """
    Push a belief through a transition kernel:
    `output[r, c] = sum over (dr, dc) of posterior[r - dr, c - dc] * k[dr, dc]`. Mass moved outside of the grid is
    dropped and the result is renormalized.

    Args:
        posterior (ProbabilityGrid): normalized belief.
        k (GaussianKernel): transition kernel.

    Returns:
        ProbabilityGrid: prediction. The normalized prediction.

    Raises:
        ZeroMassError: all probability mass left the grid.
    """
    predicted = scipy.signal.convolve2d(posterior.values, k.support, mode="full", boundary="fill", fillvalue=0)
    # The full convolution is offset by the radius in both directions, crop back onto the grid.
    predicted = predicted[k.radius : k.radius + posterior.height, k.radius : k.radius + posterior.width]
    try:
        return normalize(posterior.with_values(np.clip(predicted, 0, None)))
    except ZeroMassError as e:
        raise ZeroMassError("All probability mass left the grid during convolution") from e
