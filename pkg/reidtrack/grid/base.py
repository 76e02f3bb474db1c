import math
from typing import Tuple

import numpy as np
import scipy
from typing_extensions import Self


class ZeroMassError(ValueError):
    """
    Raised when a grid holds no probability mass, meaning the belief has fully vanished (for example every cell left
    the grid after a convolution). The owner of the belief must terminate or reinitialise it.
    """


class ProbabilityGrid:
    """
    A dense, immutable `(height x width)` grid of non-negative cell values over an image. Cell `(row, col)` covers
    pixels `[col * cell_size, (col + 1) * cell_size)` along x and `[row * cell_size, (row + 1) * cell_size)` along y.

    Beliefs and measurement likelihoods are both probability grids. Pixel positions are always given as `(x, y)`, cell
    indices always as `(row, col)`, i.e. yx.

    Attributes:
        values (`(height x width) ndarray[float64]`): read-only cell values.
        cell_size (float): side length of one cell in pixels.
    """

    values: np.ndarray
    cell_size: float

    def __init__(self, values: np.ndarray, cell_size: float = 1.0) -> None:
        """
        Args:
            values (`(height x width) ndarray[float]`): non-negative, finite cell values. The array is copied.
            cell_size (float, optional): pixels per cell. Default: 1.
        """
        assert type(values) is np.ndarray
        assert values.ndim == 2
        assert values.size > 0
        assert cell_size > 0
        values = values.astype(np.float64, copy=True)
        if not np.isfinite(values).all():
            raise ValueError("Probability grid values must be finite")
        if (values < 0).any():
            raise ValueError("Probability grid values must be non-negative")
        values.flags.writeable = False

        self.values = values
        self.cell_size = float(cell_size)

    @classmethod
    def uniform(cls, width: int, height: int, cell_size: float = 1.0) -> Self:
        assert width > 0 and height > 0
        return cls(np.full((height, width), 1 / (width * height)), cell_size)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def size(self) -> int:
        return self.values.size

    def with_values(self, values: np.ndarray) -> Self:
        """
        A new grid with the same geometry and the given values.
        """
        assert values.shape == self.shape, f"Expected shape {self.shape}, got {values.shape}"
        return type(self)(values, self.cell_size)

    def is_normalized(self, tolerance: float = 1e-9) -> bool:
        return abs(float(self.values.sum()) - 1) <= tolerance

    def cell_center(self, row: int, col: int) -> Tuple[float, float]:
        """
        The `(x, y)` pixel position of the given cell's centre.
        """
        return (col + 0.5) * self.cell_size, (row + 0.5) * self.cell_size

    def cell_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Returns:
            Tuple containing:
                - (`(height x width) ndarray[float]`): centre_x. The x pixel position of every cell centre.
                - (`(height x width) ndarray[float]`): centre_y. The y pixel position of every cell centre.
        """
        centre_y, centre_x = np.meshgrid(
            (np.arange(self.height) + 0.5) * self.cell_size,
            (np.arange(self.width) + 0.5) * self.cell_size,
            indexing="ij",
        )
        return centre_x, centre_y

    def contains(self, x: float, y: float) -> bool:
        return 0 <= x < self.width * self.cell_size and 0 <= y < self.height * self.cell_size

    def cell_of(self, x: float, y: float) -> Tuple[int, int]:
        """
        The `(row, col)` of the cell containing pixel position `(x, y)`. Positions outside of the grid are clamped onto
        the closest border cell.
        """
        row = int(np.clip(math.floor(y / self.cell_size), 0, self.height - 1))
        col = int(np.clip(math.floor(x / self.cell_size), 0, self.width - 1))
        return row, col

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProbabilityGrid):
            return NotImplemented
        return self.cell_size == other.cell_size and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"ProbabilityGrid(height={self.height}, width={self.width}, cell_size={self.cell_size})"


def normalize(g: ProbabilityGrid) -> ProbabilityGrid:
    """
    Scale the grid to sum to one, keeping the ratio between every pair of cells.

    Raises:
        ZeroMassError: every cell is zero.
    """
    total = g.values.sum()
    if total <= 0:
        raise ZeroMassError("Probability grid has no mass to normalize")
    return g.with_values(g.values / total)


def multiply_update(prior: ProbabilityGrid, likelihood: ProbabilityGrid) -> ProbabilityGrid:
    """
    The Bayes update: the element-wise product of the prior and the measurement likelihood, renormalized.

    Args:
        prior (ProbabilityGrid): the normalized prediction.
        likelihood (ProbabilityGrid): non-negative measurement likelihood of the same shape.

    Returns:
        ProbabilityGrid: posterior. The normalized posterior.

    Raises:
        ZeroMassError: prior and likelihood have disjoint support.
    """
    assert prior.shape == likelihood.shape, f"Grid shapes {prior.shape} and {likelihood.shape} differ"
    try:
        return normalize(prior.with_values(prior.values * likelihood.values))
    except ZeroMassError as e:
        raise ZeroMassError("Prior and likelihood have disjoint support") from e


def map_peak(g: ProbabilityGrid) -> Tuple[Tuple[int, int], float]:
    """
    The most probable cell. Ties resolve to the first cell in row-major order.

    Returns:
        Tuple containing:
            - (tuple of two ints): cell. The `(row, col)` of the peak.
            - (float): probability. The peak's value.
    """
    index = int(np.argmax(g.values))
    row, col = np.unravel_index(index, g.shape)
    return (int(row), int(col)), float(g.values[row, col])


def expectation(g: ProbabilityGrid) -> Tuple[float, float]:
    """
    The probability weighted mean of every cell centre, as an `(x, y)` pixel position.
    """
    centre_x, centre_y = g.cell_centers()
    return float((g.values * centre_x).sum()), float((g.values * centre_y).sum())


def covariance(g: ProbabilityGrid) -> np.ndarray:
    """
    The `(2 x 2)` positional covariance of the grid in squared pixels, ordered `(x, y)`.
    """
    centre_x, centre_y = g.cell_centers()
    mean_x, mean_y = expectation(g)
    dx, dy = centre_x - mean_x, centre_y - mean_y
    cov_xy = float((g.values * dx * dy).sum())
    return np.array([[(g.values * dx**2).sum(), cov_xy], [cov_xy, (g.values * dy**2).sum()]], np.float64)


def entropy(g: ProbabilityGrid) -> float:
    """
    Shannon entropy in nats, with `0 log 0 = 0`. Lies in `[0, ln(width * height)]` for normalized grids.
    """
    return float(scipy.special.entr(g.values).sum())


def probability_grid_from_gaussian(
    width: int, height: int, cell_size: float, center_xy: Tuple[float, float], sigma_cells: float
) -> ProbabilityGrid:
    """
    An isotropic Gaussian belief centred on a pixel position, evaluated at every cell centre and normalized.

    Args:
        width (int): grid width in cells.
        height (int): grid height in cells.
        cell_size (float): pixels per cell.
        center_xy (tuple of two floats): the Gaussian's mean in pixels.
        sigma_cells (float): standard deviation in cells. Zero gives a delta at the cell containing `center_xy`.

    Returns:
        ProbabilityGrid: belief. The normalized belief.
    """
    assert sigma_cells >= 0
    grid = ProbabilityGrid(np.zeros((height, width)), cell_size)
    if sigma_cells == 0:
        values = np.zeros((height, width))
        values[grid.cell_of(*center_xy)] = 1
        return grid.with_values(values)

    centre_x, centre_y = grid.cell_centers()
    sigma_px = sigma_cells * cell_size
    log_density = -0.5 * ((centre_x - center_xy[0]) ** 2 + (centre_y - center_xy[1]) ** 2) / sigma_px**2
    # Shift by the maximum so very narrow Gaussians cannot underflow to zero everywhere.
    values = np.exp(log_density - log_density.max())
    return normalize(grid.with_values(values))
