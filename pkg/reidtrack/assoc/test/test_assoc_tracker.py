import numpy as np

from reidtrack.assoc import tracker
from reidtrack.assoc.base import AssociationConfig, Detection, TrackManagementConfig
from reidtrack.bboxreg.base import BBoxRegressor


def _world() -> tracker.TrackerWorld:
    return tracker.TrackerWorld(np.diag([1.0, 1.0, 0.25, 0.25]), np.eye(2) * 4, (4.0, 4.0, 16.0, 16.0))


def test_low_scores_never_start_tracks() -> None:
    world = _world()
    tm = TrackManagementConfig(sigma_init=0.3, d_init=3)
    for frame in range(30):
        tracker.step(world, [Detection((50.0 + frame, 40.0), 0.2, frame)], tm, AssociationConfig(), frame)
    assert len(world.tracks) == 0


def test_track_initialisation() -> None:
    world = _world()
    tm = TrackManagementConfig(sigma_init=0.3, d_init=3)
    ac = AssociationConfig()
    tracker.step(world, [Detection((50.0, 40.0), 0.9, 0)], tm, ac, 0)
    tracker.step(world, [Detection((52.0, 40.0), 0.9, 1)], tm, ac, 1)
    tracker.step(world, [], tm, ac, 2)
    tracker.step(world, [Detection((56.0, 40.0), 0.9, 3)], tm, ac, 3)
    assert len(world.tracks) == 0
    tracker.step(world, [Detection((58.0, 40.0), 0.9, 4)], tm, ac, 4)
    assert len(world.tracks) == 0
    tracker.step(world, [Detection((60.0, 40.0), 0.9, 5)], tm, ac, 5)
    assert len(world.tracks) == 1
    assert world.tracks[0].id == 0
    assert world.tracks[0].position == (60.0, 40.0)
    assert len(world.chains) == 0

    # A chain breaks when the next detection is outside of the gate.
    world = _world()
    tracker.step(world, [Detection((10.0, 10.0), 0.9, 0)], tm, ac, 0)
    tracker.step(world, [Detection((200.0, 10.0), 0.9, 1)], tm, ac, 1)
    tracker.step(world, [Detection((202.0, 10.0), 0.9, 2)], tm, ac, 2)
    assert len(world.tracks) == 0


def test_track_deletion() -> None:
    world = _world()
    tm = TrackManagementConfig(d_init=1, d_miss=5)
    ac = AssociationConfig()
    tracker.step(world, [Detection((50.0, 40.0), 0.9, 0)], tm, ac, 0)
    assert len(world.tracks) == 1
    for frame in range(1, 6):
        tracker.step(world, [], tm, ac, frame)
        assert len(world.tracks) == 1
        assert world.tracks[0].misses == frame
    tracker.step(world, [], tm, ac, 6)
    assert len(world.tracks) == 0

    # Ids are never reused.
    tracker.step(world, [Detection((50.0, 40.0), 0.9, 7)], tm, ac, 7)
    assert world.tracks[0].id == 1


def test_gt_init() -> None:
    world = _world()
    tm = TrackManagementConfig(sigma_init=0.3, d_init=1, sigma_cont=-0.3, d_miss=90, gt_init=True)
    ac = AssociationConfig()
    # Detections never start tracks with ground truth initialisation.
    tracker.step(world, [Detection((10.0, 10.0), 0.9, 0)], tm, ac, 0)
    assert len(world.tracks) == 0
    embedding = np.array([0.0, 1.0])
    tracker.step(world, [], tm, ac, 1, gt_starts=[((30.0, 30.0), embedding), ((90.0, 30.0), None)])
    assert [track.id for track in world.tracks] == [0, 1]
    assert world.tracks[0].reference_embedding is embedding
    assert world.tracks[1].reference_embedding is None

    # Negative scores are still used to continue tracks.
    tracker.step(world, [Detection((31.0, 30.0), -0.2, 2), Detection((89.0, 30.0), 0.5, 2)], tm, ac, 2)
    assert all([track.misses == 0 for track in world.tracks])
    assert all([track.hits == 2 for track in world.tracks])


def test_one_to_one() -> None:
    rng = np.random.RandomState(0)
    world = _world()
    tm = TrackManagementConfig(d_init=1, d_miss=2)
    ac = AssociationConfig(gate=5.0)
    for frame in range(50):
        detections = [Detection(tuple(rng.uniform(0, 100, size=2)), rng.rand(), frame) for _ in range(rng.randint(6))]
        n_tracks_before = len(world.tracks)
        tracker.step(world, detections, tm, ac, frame)
        matched = [track for track in world.tracks if track.misses == 0 and track.hits > 1]
        assert len(matched) <= min(n_tracks_before, len(detections))
        ids = [track.id for track in world.tracks]
        assert len(ids) == len(set(ids))


def test_emit_boxes() -> None:
    world = _world()
    tm = TrackManagementConfig(d_init=1, d_miss=10, emit_max_missed=1)
    ac = AssociationConfig()
    regressor = BBoxRegressor(0.5, 0.0)
    tracker.step(world, [Detection((50.0, 40.0), 0.9, 0)], tm, ac, 0)
    boxes = tracker.emit_boxes(world, regressor, tm)
    assert len(boxes) == 1
    assert boxes[0].to_row() == (0, 0, 50.0, 40.0, 8.0, 20.0)
    tracker.step(world, [], tm, ac, 1)
    assert len(tracker.emit_boxes(world, regressor, tm)) == 1
    tracker.step(world, [], tm, ac, 2)
    assert len(tracker.emit_boxes(world, regressor, tm)) == 0
    # No positive height at this position.
    assert tracker.emit_boxes(world, BBoxRegressor(0.0, -1.0), TrackManagementConfig(emit_max_missed=5)) == []
