import json
import os
from typing import Any

import numpy as np

from .. import log
from ..assoc.base import Detection
from ..measurement.base import EmbeddingMap
from .base import FrameObservation, Identity, Scenario, ScenarioConfig

FORMAT_VERSION = 1
EMBEDDINGS_SUFFIX = ".embeddings.f4"
DETECTIONS_SUFFIX = ".detections.jsonl"
# Sidecar layout: frame major, then row, then column, embedding dimension innermost.
SIDECAR_DTYPE = "<f4"


def _sidecar_paths(json_path: str) -> tuple[str, str]:
    stem = os.path.splitext(json_path)[0]
    return stem + EMBEDDINGS_SUFFIX, stem + DETECTIONS_SUFFIX


def _detection_to_dict(detection: Detection) -> dict[str, Any]:
    return {
        "frame": detection.frame,
        "x": detection.center[0],
        "y": detection.center[1],
        "score": detection.score,
        "identity": detection.identity,
        "embedding": None if detection.embedding is None else detection.embedding.tolist(),
    }


def _detection_from_dict(values: dict[str, Any]) -> Detection:
    embedding = None if values["embedding"] is None else np.array(values["embedding"], np.float64)
    return Detection((values["x"], values["y"]), values["score"], values["frame"], embedding, values["identity"])


def write_detections(scenario: Scenario, path: str) -> None:
    """
    Write every frame's detections as JSON lines, one detection per line in frame order.
    """
    with open(path, "w") as file:
        for observation in scenario.frames:
            for detection in observation.detections:
                file.write(json.dumps(_detection_to_dict(detection)) + "\n")


def read_detections(path: str, n_frames: int) -> list[list[Detection]]:
    detections = [[] for _ in range(n_frames)]
    with open(path, "r") as file:
        for line in file:
            if not line.strip():
                continue
            detection = _detection_from_dict(json.loads(line))
            detections[detection.frame].append(detection)
    return detections


def save_scenario(scenario: Scenario, path: str) -> None:
    """
    Save a rendered scenario as a JSON document at `path` plus two sidecar files next to it: the embedding maps as
    little endian 32 bit floats and the detections as JSON lines.

    Args:
        scenario (Scenario): a scenario with every frame rendered.
        path (str): JSON file path.
    """
    assert type(scenario) is Scenario
    cfg = scenario.config
    if len(scenario.frames) != cfg.frames:
        raise ValueError(f"Scenario has {len(scenario.frames)} rendered frames, expected {cfg.frames}")
    n_rows, n_cols = cfg.grid_shape
    embeddings_path, detections_path = _sidecar_paths(path)

    document = {
        "format_version": FORMAT_VERSION,
        "config": cfg.to_dict(),
        "header": {"frames": cfg.frames, "height": n_rows, "width": n_cols, "dim": cfg.embedding_dim},
        "embeddings_file": os.path.basename(embeddings_path),
        "detections_file": os.path.basename(detections_path),
        "identities": [
            {
                "id": ident.id,
                "embedding": ident.embedding.tolist(),
                "height_factor": ident.height_factor,
                "start_frame": ident.start_frame,
                "end_frame": ident.end_frame,
                "positions": [None if np.isnan(p).any() else p.tolist() for p in ident.positions],
            }
            for ident in scenario.identities
        ],
        "confuser": None,
    }
    if scenario.confuser_cell is not None:
        document["confuser"] = {
            "cell": list(scenario.confuser_cell),
            "identity": scenario.confuser_identity,
            "embedding": scenario.confuser_embedding.tolist(),
        }

    with open(path, "w") as file:
        json.dump(document, file, indent=1)
    maps = np.array([observation.embedding_map.values for observation in scenario.frames], dtype=SIDECAR_DTYPE)
    maps.tofile(embeddings_path)
    write_detections(scenario, detections_path)
    log.debug(f"Saved scenario to {path}")


def load_scenario(path: str) -> Scenario:
    """
    Load a scenario written by `save_scenario`, frames included.

    Args:
        path (str): JSON file path.

    Returns:
        Scenario: scenario.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"No scenario at {path}")
    with open(path, "r") as file:
        document = json.load(file)
    if document.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"Unsupported scenario format version {document.get('format_version')} in {path}")

    cfg = ScenarioConfig.from_dict(document["config"])
    identities = []
    for values in document["identities"]:
        positions = np.array([[np.nan, np.nan] if p is None else p for p in values["positions"]], np.float64)
        identities.append(
            Identity(
                values["id"],
                np.array(values["embedding"], np.float64),
                values["height_factor"],
                values["start_frame"],
                values["end_frame"],
                positions.reshape((-1, 2)),
            )
        )
    scenario = Scenario(cfg, identities)
    if document["confuser"] is not None:
        scenario.confuser_cell = tuple(document["confuser"]["cell"])
        scenario.confuser_identity = document["confuser"]["identity"]
        scenario.confuser_embedding = np.array(document["confuser"]["embedding"], np.float64)

    header = document["header"]
    directory = os.path.dirname(path)
    maps = np.fromfile(os.path.join(directory, document["embeddings_file"]), dtype=SIDECAR_DTYPE)
    shape = (header["frames"], header["height"], header["width"], header["dim"])
    if maps.size != np.prod(shape):
        raise ValueError(f"Embedding sidecar of {path} holds {maps.size} values, expected shape {shape}")
    maps = maps.reshape(shape).astype(np.float64)
    detections = read_detections(os.path.join(directory, document["detections_file"]), cfg.frames)
    scenario.frames = []
    for t in range(cfg.frames):
        gt_boxes = scenario.gt_boxes(t)
        # Present identities hold distinct cells, so the cell under a centre holds that identity's observation.
        identity_embeddings = {ident_id: maps[t][cfg.cell_of(center)].copy() for ident_id, center, _ in gt_boxes}
        embedding_map = EmbeddingMap(maps[t], cfg.cell_size)
        scenario.frames.append(FrameObservation(t, embedding_map, detections[t], gt_boxes, identity_embeddings))
    log.debug(f"Loaded scenario from {path}")
    return scenario
