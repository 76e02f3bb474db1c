import itertools

import numpy as np

from reidtrack.assoc import base
from reidtrack.assoc.base import AssociationConfig, Detection


class _Track:
    def __init__(self, position: tuple[float, float], reference_embedding: np.ndarray | None = None) -> None:
        self.position = position
        self.reference_embedding = reference_embedding


def _brute_force(cost: np.ndarray) -> tuple[float, list[tuple[int, int]]]:
    n_rows, n_cols = cost.shape
    best_cost, best_assignment = np.inf, None
    if n_rows <= n_cols:
        candidates = [list(zip(range(n_rows), cols)) for cols in itertools.permutations(range(n_cols), n_rows)]
    else:
        candidates = [sorted(zip(rows, range(n_cols))) for rows in itertools.permutations(range(n_rows), n_cols)]
    for assignment in candidates:
        total = sum([cost[i, j] for i, j in assignment])
        if total < best_cost - 1e-12 or (abs(total - best_cost) <= 1e-12 and assignment < best_assignment):
            best_cost, best_assignment = total, assignment
    return best_cost, best_assignment


def test_combined_distance() -> None:
    cfg = AssociationConfig("combined", n_pos=40.0, n_app=0.5)
    assert base.combined_distance(40.0, 0.5, cfg) == 1.0
    assert base.combined_distance(0.0, 0.9, cfg) == 0.0
    assert base.combined_distance(80.0, 0.25, cfg) == 1.0
    assert base.combined_distance(20.0, 0.9, AssociationConfig("pos", n_pos=40.0)) == 0.5
    assert base.combined_distance(20.0, 0.9, AssociationConfig("app", n_app=0.5)) == 1.8

    # Scaling the position distance and its normaliser together changes nothing.
    rng = np.random.RandomState(0)
    for _ in range(20):
        d_pos, d_app, scale = rng.rand() * 100, rng.rand() * 2, rng.rand() * 10 + 0.1
        scaled = AssociationConfig("combined", n_pos=40.0 * scale, n_app=0.5)
        expected = base.combined_distance(d_pos, d_app, cfg)
        assert np.isclose(base.combined_distance(d_pos * scale, d_app, scaled), expected)


def test_hungarian() -> None:
    assert base.hungarian(np.array([[5.0]])) == [(0, 0)]
    assert base.hungarian(np.array([[1.0, 2.0], [2.0, 1.0]])) == [(0, 0), (1, 1)]
    assert base.hungarian(np.zeros((0, 3))) == []
    assert base.hungarian(np.zeros((3, 3))) == [(0, 0), (1, 1), (2, 2)]
    assert base.hungarian(np.zeros((3, 2))) == [(0, 0), (1, 1)]
    assert base.hungarian(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])) == [(0, 1), (1, 0)]
    try:
        base.hungarian(np.array([[np.inf]]))
        raise AssertionError("Expected ValueError")
    except ValueError:
        pass

    rng = np.random.RandomState(0)
    for _ in range(1000):
        cost = rng.rand(6, 6)
        assignment = base.hungarian(cost)
        assert len(assignment) == 6
        best_cost, _ = _brute_force(cost)
        assert abs(sum([cost[i, j] for i, j in assignment]) - best_cost) < 1e-9

    # Small integer costs force many ties.
    for _ in range(200):
        n_rows, n_cols = rng.randint(1, 6), rng.randint(1, 6)
        cost = rng.randint(0, 3, size=(n_rows, n_cols)).astype(float)
        assignment = base.hungarian(cost)
        best_cost, best_assignment = _brute_force(cost)
        assert len(assignment) == min(n_rows, n_cols)
        assert abs(sum([cost[i, j] for i, j in assignment]) - best_cost) < 1e-9
        assert assignment == best_assignment, f"{cost}: {assignment} != {best_assignment}"
        assert len({j for _, j in assignment}) == len(assignment)


def test_associate() -> None:
    embedding = np.array([1.0, 0.0])
    cfg = AssociationConfig("combined", n_pos=40.0, n_app=0.5, gate=2.0)
    matches, unmatched_tracks, unmatched_detections = base.associate(
        [_Track((10.0, 10.0), embedding)], [Detection((10.0, 10.0), 0.9, 0, embedding)], cfg
    )
    assert matches == [(0, 0)]
    assert unmatched_tracks == []
    assert unmatched_detections == []

    cfg = AssociationConfig("pos", n_pos=10.0, gate=1.0)
    matches, unmatched_tracks, unmatched_detections = base.associate(
        [_Track((0.0, 0.0)), _Track((100.0, 0.0))],
        [Detection((50.0, 50.0), 0.9, 0), Detection((200.0, 0.0), 0.9, 0), Detection((0.0, 300.0), 0.9, 0)],
        cfg,
    )
    assert matches == []
    assert unmatched_tracks == [0, 1]
    assert unmatched_detections == [0, 1, 2]

    # Greedy nearest neighbour would pair track 0 with detection 0 and leave a worse remainder.
    cfg = AssociationConfig("pos", n_pos=1.0, gate=100.0)
    tracks = [_Track((0.0, 0.0)), _Track((2.0, 0.0)), _Track((20.0, 0.0))]
    detections = [Detection((1.0, 0.0), 0.9, 0), Detection((3.5, 0.0), 0.9, 0), Detection((-1.5, 0.0), 0.9, 0)]
    matches, _, _ = base.associate(tracks, detections, cfg)
    cost = np.array([[abs(t.position[0] - d.center[0]) for d in detections] for t in tracks])
    best_cost, best_assignment = _brute_force(cost)
    assert matches == best_assignment
    greedy_cost = 1.0 + 1.5 + 21.5
    assert sum([cost[i, j] for i, j in matches]) < greedy_cost

    # Appearance only mode cannot match a detection without an embedding.
    cfg = AssociationConfig("app", n_app=0.5, gate=2.0)
    matches, _, unmatched_detections = base.associate(
        [_Track((0.0, 0.0), embedding)], [Detection((0.0, 0.0), 1, 0)], cfg
    )
    assert matches == []
    assert unmatched_detections == [0]

    # Appearance separates two tracks at the same position.
    cfg = AssociationConfig("app", n_app=0.5, gate=2.0)
    other = np.array([0.0, 1.0])
    matches, _, _ = base.associate(
        [_Track((0.0, 0.0), embedding), _Track((0.0, 0.0), other)],
        [Detection((0.0, 0.0), 1, 0, other), Detection((0.0, 0.0), 1, 0, embedding)],
        cfg,
    )
    assert matches == [(0, 1), (1, 0)]


def test_appearance_only_association() -> None:
    # Two noisy observations sit 1 apart when of one identity, sqrt(2) apart otherwise.
    e_a, e_b = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    seen_a, seen_b = np.array([0.5, 0.0, np.sqrt(0.75)]), np.array([0.0, 0.5, np.sqrt(0.75)])
    # Both predictions overshot, so each track is nearer the other identity's detection.
    tracks = [_Track((20.0, 0.0), e_a), _Track((24.0, 0.0), e_b)]
    detections = [Detection((25.0, 0.0), 0.9, 0, seen_a), Detection((19.0, 0.0), 0.9, 0, seen_b)]
    for mode, expected in (("pos", [(0, 1), (1, 0)]), ("combined", [(0, 1), (1, 0)]), ("app", [(0, 0), (1, 1)])):
        matches, _, _ = base.associate(tracks, detections, AssociationConfig(mode, n_pos=40.0, n_app=1.0, gate=2.0))
        assert matches == expected, f"{mode} matched {matches}"

    # A background looking detection far from the only track passes the app gate but not the combined one.
    far = [Detection((60.0, 0.0), 0.9, 0, np.array([0.0, 0.0, 1.0]))]
    matches, _, _ = base.associate([_Track((0.0, 0.0), e_a)], far, AssociationConfig("app", n_app=1.0, gate=2.0))
    assert matches == [(0, 0)]
    combined = AssociationConfig("combined", n_pos=40.0, n_app=1.0, gate=2.0)
    matches, _, unmatched_detections = base.associate([_Track((0.0, 0.0), e_a)], far, combined)
    assert matches == []
    assert unmatched_detections == [0]


def test_Detection() -> None:
    try:
        Detection((np.nan, 1.0), 0.5, 0)
        raise AssertionError("Expected ValueError")
    except ValueError:
        pass
