import math

import numpy as np
import scipy
import torch

from ..grid.base import ProbabilityGrid, entropy
from ..utils import system


class DimMismatchError(ValueError):
    """
    Raised when an embedding's dimension differs from the embedding map's.
    """


class EmbeddingMap:
    """
    A low-resolution map of identity embeddings, one `dim` long vector per grid cell.

    Attributes:
        values (`(height x width x dim) ndarray[float]`): read-only embeddings.
        cell_size (float): pixels per cell.
    """

    values: np.ndarray
    cell_size: float

    def __init__(self, values: np.ndarray, cell_size: float = 1.0) -> None:
        assert type(values) is np.ndarray
        assert values.ndim == 3
        assert cell_size > 0
        if not np.isfinite(values).all():
            raise ValueError("Embedding map values must be finite")
        values = values.copy()
        values.flags.writeable = False

        self.values = values
        self.cell_size = float(cell_size)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def dim(self) -> int:
        return self.values.shape[2]


class DistanceGrid(ProbabilityGrid):
    """
    Per-cell Euclidean embedding distances to one reference embedding. Shares the geometry of a probability grid but is
    never normalized.
    """


def distance_map(embedding_map: EmbeddingMap, reference: np.ndarray) -> DistanceGrid:
    """
    The Euclidean distance between every cell's embedding and the reference embedding.

    Args:
        embedding_map (EmbeddingMap): the frame's embedding map.
        reference (`(dim) ndarray[float]`): the track's reference embedding.

    Returns:
        DistanceGrid: distances. Zero exactly where the cell embedding equals the reference.

    Raises:
        DimMismatchError: the reference's dimension is not the map's dimension.
    """
    reference = np.asarray(reference)
    if reference.shape != (embedding_map.dim,):
        raise DimMismatchError(f"Reference embedding has shape {reference.shape}, expected ({embedding_map.dim},)")
    distances = np.linalg.norm(embedding_map.values - reference[np.newaxis, np.newaxis], axis=2)
    return DistanceGrid(distances, embedding_map.cell_size)


def distance_maps(embedding_map: EmbeddingMap, references: np.ndarray, force_cpu: bool = True) -> np.ndarray:
    """
    Distance maps of many references against one shared embedding map, computed as a single batched operation.

    Args:
        embedding_map (EmbeddingMap): the frame's embedding map.
        references (`(n_tracks x dim) ndarray[float]`): reference embeddings.
        force_cpu (bool, optional): compute on the CPU even when a GPU is available. Default: true.

    Returns:
        `(n_tracks x height x width) ndarray[float64]`: distances. `distances[i]` equals
            `distance_map(embedding_map, references[i]).values`.
    """
    assert type(references) is np.ndarray
    assert references.ndim == 2
    if references.shape[1] != embedding_map.dim:
        raise DimMismatchError(f"References have dimension {references.shape[1]}, expected {embedding_map.dim}")
    if references.shape[0] == 0:
        return np.zeros((0, embedding_map.height, embedding_map.width), np.float64)

    device = system.get_device(force_cpu)
    embeddings_torch = torch.from_numpy(embedding_map.values.astype(np.float64)).to(device)
    references_torch = torch.from_numpy(references.astype(np.float64)).to(device)
    # Has shape (n_tracks, height, width, dim).
    differences = embeddings_torch[np.newaxis] - references_torch[:, np.newaxis, np.newaxis]
    distances = torch.linalg.vector_norm(differences, dim=3)

    return distances.cpu().numpy()


def softmin(distances: DistanceGrid, temperature: float) -> ProbabilityGrid:
    """
    Turn a distance map into a measurement likelihood, `exp(-d / temperature)` normalized over the grid. Smaller
    distances get larger likelihoods.

    Args:
        distances (DistanceGrid): distance map.
        temperature (float): positive softness. Near zero the likelihood approaches a delta at the smallest distance,
            large temperatures approach a uniform likelihood.

    Returns:
        ProbabilityGrid: likelihood. Normalized.
    """
    assert temperature > 0
    # Softmax subtracts the maximum before exponentiating, keeping tiny temperatures finite.
    likelihood = scipy.special.softmax(-distances.values / temperature)
    return ProbabilityGrid(likelihood, distances.cell_size)


def gate_missing(distances: DistanceGrid, n_app: float) -> bool:
    """
    Returns false when no cell is within `n_app` of the reference, meaning the identity is not visible and the
    measurement should be treated as missing.
    """
    assert n_app > 0
    return bool(distances.values.min() <= n_app)


def gate_entropy(likelihood: ProbabilityGrid, fraction: float) -> bool:
    """
    Returns false when the likelihood is too close to uniform to be informative: its entropy is above `fraction` of
    the largest possible entropy for the grid.
    """
    assert 0 < fraction <= 1
    # Tolerates rounding so a fraction of one always accepts.
    return entropy(likelihood) <= fraction * math.log(likelihood.size) + 1e-12
