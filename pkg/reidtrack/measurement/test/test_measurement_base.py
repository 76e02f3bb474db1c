import math

import numpy as np

from reidtrack.grid.base import ProbabilityGrid, entropy, map_peak
from reidtrack.measurement import base
from reidtrack.measurement.base import DistanceGrid, EmbeddingMap


def _random_unit_map(rng: np.random.RandomState, height: int, width: int, dim: int) -> EmbeddingMap:
    values = rng.randn(height, width, dim)
    values /= np.linalg.norm(values, axis=2, keepdims=True)
    return EmbeddingMap(values, cell_size=8.0)


def test_distance_map() -> None:
    rng = np.random.RandomState(0)
    embedding_map = _random_unit_map(rng, 4, 5, 16)
    reference = embedding_map.values[2, 3].copy()
    distances = base.distance_map(embedding_map, reference)
    assert type(distances) is DistanceGrid
    assert distances.shape == (4, 5)
    assert distances.cell_size == 8.0
    assert distances.values[2, 3] == 0
    assert (distances.values >= 0).all()
    assert (distances.values > 0).sum() == 19

    orthogonal = np.zeros((1, 1, 2))
    orthogonal[0, 0, 0] = 1.0
    distances = base.distance_map(EmbeddingMap(orthogonal), np.array([0.0, 1.0]))
    assert math.isclose(distances.values[0, 0], math.sqrt(2))

    reference = rng.randn(16)
    distances = base.distance_map(embedding_map, reference)
    for row in range(4):
        for col in range(5):
            expected = math.sqrt(sum([(a - b) ** 2 for a, b in zip(embedding_map.values[row, col], reference)]))
            assert math.isclose(distances.values[row, col], expected, rel_tol=1e-12)

    try:
        base.distance_map(embedding_map, np.zeros(15))
        raise AssertionError("Expected DimMismatchError")
    except base.DimMismatchError:
        pass


def test_distance_maps() -> None:
    rng = np.random.RandomState(1)
    embedding_map = _random_unit_map(rng, 6, 3, 32)
    references = rng.randn(4, 32)
    distances = base.distance_maps(embedding_map, references)
    assert distances.shape == (4, 6, 3)
    for i in range(4):
        assert np.abs(distances[i] - base.distance_map(embedding_map, references[i]).values).max() < 1e-12
    assert base.distance_maps(embedding_map, np.zeros((0, 32))).shape == (0, 6, 3)
    try:
        base.distance_maps(embedding_map, np.zeros((2, 31)))
        raise AssertionError("Expected DimMismatchError")
    except base.DimMismatchError:
        pass


def test_softmin() -> None:
    likelihood = base.softmin(DistanceGrid(np.full((3, 3), 0.7)), 0.1)
    assert np.allclose(likelihood.values, 1 / 9)

    likelihood = base.softmin(DistanceGrid(np.array([[0.0, math.log(3)]])), 1.0)
    assert np.allclose(likelihood.values, [[0.75, 0.25]])

    rng = np.random.RandomState(0)
    distances = DistanceGrid(rng.rand(5, 6) * 2)
    likelihood = base.softmin(distances, 0.5)
    assert likelihood.is_normalized()
    unshifted = np.exp(-distances.values.astype(np.longdouble) / 0.5)
    unshifted /= unshifted.sum()
    assert np.abs(likelihood.values / unshifted.astype(np.float64) - 1).max() < 1e-12

    # Order reversing.
    flat_distances = distances.values.ravel()
    flat_likelihood = likelihood.values.ravel()
    order = np.argsort(flat_distances)
    assert (np.diff(flat_likelihood[order]) < 0).all()

    shifted = base.softmin(DistanceGrid(distances.values + 3.5), 0.5)
    assert np.abs(shifted.values - likelihood.values).max() < 1e-12

    # Tiny temperatures stay finite and approach a delta at the smallest distance.
    sharp = base.softmin(distances, 1e-6)
    assert np.isfinite(sharp.values).all()
    assert map_peak(sharp)[0] == np.unravel_index(np.argmin(distances.values), distances.shape)
    assert map_peak(sharp)[1] > 0.999

    entropies = [entropy(base.softmin(distances, temperature)) for temperature in (0.01, 0.1, 1.0, 10.0, 1000.0)]
    assert (np.diff(entropies) > 0).all()
    assert math.isclose(entropies[-1], math.log(30), rel_tol=1e-3)


def test_gate_missing() -> None:
    distances = DistanceGrid(np.array([[0.2, 1.7], [1.9, 1.4]]))
    assert base.gate_missing(distances, 1.0)
    assert not base.gate_missing(DistanceGrid(np.array([[1.5, 1.7]])), 1.0)
    assert base.gate_missing(DistanceGrid(np.array([[1.0, 1.7]])), 1.0)


def test_gate_entropy() -> None:
    delta = np.zeros((4, 4))
    delta[0, 2] = 1.0
    assert base.gate_entropy(ProbabilityGrid(delta), 0.9)
    assert not base.gate_entropy(ProbabilityGrid.uniform(4, 4), 0.9)
    assert base.gate_entropy(ProbabilityGrid(np.array([[0.5, 0.5]])), 1.0)
