import math

import numpy as np

from reidtrack.grid import base
from reidtrack.grid.base import ProbabilityGrid


def test_ProbabilityGrid() -> None:
    grid = ProbabilityGrid(np.zeros((3, 4)), cell_size=8.0)
    assert grid.width == 4
    assert grid.height == 3
    assert grid.shape == (3, 4)
    assert grid.cell_center(0, 0) == (4.0, 4.0)
    assert grid.cell_center(2, 1) == (12.0, 20.0)
    assert grid.cell_of(12.0, 20.0) == (2, 1)
    assert grid.cell_of(-5.0, 100.0) == (2, 0)
    assert grid.contains(31.9, 23.9)
    assert not grid.contains(32.0, 0.0)
    assert not grid.values.flags.writeable

    for bad_values in (np.array([[-1.0, 1.0]]), np.array([[np.nan, 1.0]])):
        try:
            ProbabilityGrid(bad_values)
            raise AssertionError("Expected ValueError")
        except ValueError:
            pass


def test_normalize() -> None:
    normalized = base.normalize(ProbabilityGrid(np.ones((2, 2))))
    assert np.allclose(normalized.values, 0.25)
    assert normalized.is_normalized()

    normalized = base.normalize(ProbabilityGrid(np.array([[3.0, 1.0]])))
    assert np.allclose(normalized.values, [[0.75, 0.25]])

    try:
        base.normalize(ProbabilityGrid(np.zeros((2, 2))))
        raise AssertionError("Expected ZeroMassError")
    except base.ZeroMassError:
        pass

    rng = np.random.RandomState(0)
    for _ in range(20):
        grid = ProbabilityGrid(rng.rand(rng.randint(1, 10), rng.randint(1, 10)))
        once = base.normalize(grid)
        twice = base.normalize(once)
        assert np.abs(once.values - twice.values).max() < 1e-12
        assert np.allclose(once.values * grid.values.sum(), grid.values)


def test_multiply_update() -> None:
    rng = np.random.RandomState(0)
    prior = base.normalize(ProbabilityGrid(rng.rand(6, 6)))

    posterior = base.multiply_update(prior, ProbabilityGrid.uniform(6, 6))
    assert np.abs(posterior.values - prior.values).max() < 1e-12

    delta = np.zeros((6, 6))
    delta[2, 3] = 1.0
    posterior = base.multiply_update(prior, ProbabilityGrid(delta))
    assert posterior.values[2, 3] == 1.0
    assert posterior.values.sum() == 1.0

    likelihood = ProbabilityGrid(rng.rand(6, 6))
    posterior = base.multiply_update(prior, likelihood)
    expected = np.zeros((6, 6))
    for row in range(6):
        for col in range(6):
            expected[row, col] = prior.values[row, col] * likelihood.values[row, col]
    expected /= expected.sum()
    assert np.abs(posterior.values - expected).max() < 1e-12

    prior_values = np.zeros((6, 6))
    prior_values[0, 0] = 1.0
    try:
        base.multiply_update(ProbabilityGrid(prior_values), ProbabilityGrid(delta))
        raise AssertionError("Expected ZeroMassError")
    except base.ZeroMassError:
        pass


def test_map_peak() -> None:
    delta = np.zeros((5, 6))
    delta[3, 4] = 1.0
    assert base.map_peak(ProbabilityGrid(delta)) == ((3, 4), 1.0)
    assert base.map_peak(ProbabilityGrid.uniform(2, 2)) == ((0, 0), 0.25)
    cell, probability = base.map_peak(ProbabilityGrid(np.array([[0.1, 0.7, 0.2]])))
    assert cell == (0, 1)
    assert math.isclose(probability, 0.7)


def test_expectation() -> None:
    delta = np.zeros((4, 4))
    # Cell (2, 1) has its centre at x = 12, y = 20 with 8 pixel cells.
    delta[2, 1] = 1.0
    assert base.expectation(ProbabilityGrid(delta, cell_size=8.0)) == (12.0, 20.0)
    delta = np.zeros((4, 4))
    delta[0, 0] = 1.0
    assert base.expectation(ProbabilityGrid(delta, cell_size=20.0)) == (10.0, 10.0)

    two_masses = np.zeros((1, 3))
    two_masses[0, 0] = 0.5
    two_masses[0, 2] = 0.5
    x, y = base.expectation(ProbabilityGrid(two_masses, cell_size=5.0))
    assert math.isclose(x, 7.5)
    assert math.isclose(y, 2.5)

    rng = np.random.RandomState(0)
    grid = base.normalize(ProbabilityGrid(rng.rand(7, 5), cell_size=3.0))
    expected_x, expected_y = 0.0, 0.0
    for row in range(7):
        for col in range(5):
            expected_x += grid.values[row, col] * (col + 0.5) * 3.0
            expected_y += grid.values[row, col] * (row + 0.5) * 3.0
    x, y = base.expectation(grid)
    assert math.isclose(x, expected_x, rel_tol=1e-12)
    assert math.isclose(y, expected_y, rel_tol=1e-12)


def test_entropy() -> None:
    assert math.isclose(base.entropy(ProbabilityGrid.uniform(4, 4)), math.log(16))
    delta = np.zeros((4, 4))
    delta[1, 1] = 1.0
    assert base.entropy(ProbabilityGrid(delta)) == 0
    assert math.isclose(base.entropy(ProbabilityGrid(np.array([[0.5, 0.5]]))), math.log(2))

    rng = np.random.RandomState(0)
    for _ in range(50):
        width, height = rng.randint(1, 12), rng.randint(1, 12)
        values = rng.rand(height, width) ** 8
        values[rng.rand(height, width) > 0.7] = 0
        values[0, 0] += 1e-3
        grid = base.normalize(ProbabilityGrid(values))
        assert 0 <= base.entropy(grid) <= math.log(width * height) + 1e-12


def test_covariance() -> None:
    two_masses = np.zeros((1, 3))
    two_masses[0, 0] = 0.5
    two_masses[0, 2] = 0.5
    cov = base.covariance(ProbabilityGrid(two_masses, cell_size=5.0))
    assert np.allclose(cov, [[25.0, 0.0], [0.0, 0.0]])


def test_probability_grid_from_gaussian() -> None:
    belief = base.probability_grid_from_gaussian(8, 6, 8.0, (36.0, 20.0), 0.0)
    assert base.map_peak(belief) == ((2, 4), 1.0)

    belief = base.probability_grid_from_gaussian(8, 6, 8.0, (36.0, 20.0), 1.0)
    assert belief.is_normalized()
    assert base.map_peak(belief)[0] == (2, 4)
    x, y = base.expectation(belief)
    assert abs(x - 36.0) < 4.0
    assert abs(y - 20.0) < 4.0
