import numpy as np

from reidtrack.metrics import base
from reidtrack.metrics.base import EvalLedger, MetricsConfig


def test_iou() -> None:
    assert base.iou((0, 0, 2, 2), (0, 0, 2, 2)) == 1
    assert base.iou((0, 0, 2, 2), (10, 0, 2, 2)) == 0
    assert np.isclose(base.iou((0, 0, 2, 2), (1, 0, 2, 2)), 1 / 3)
    assert base.iou((0, 0, 0, 0), (0, 0, 0, 0)) == 0

    rng = np.random.RandomState(0)
    boxes_a = np.concatenate((rng.rand(8, 2) * 20, rng.rand(8, 2) * 10 + 1), axis=1)
    boxes_b = np.concatenate((rng.rand(5, 2) * 20, rng.rand(5, 2) * 10 + 1), axis=1)
    overlaps = base.iou_matrix(boxes_a, boxes_b)
    assert overlaps.shape == (8, 5)
    assert (overlaps >= 0).all() and (overlaps <= 1).all()
    assert np.allclose(overlaps, base.iou_matrix(boxes_b, boxes_a).T)
    assert np.allclose(np.diag(base.iou_matrix(boxes_a, boxes_a)), 1)


def test_match_frame() -> None:
    cfg = MetricsConfig()
    gt = {0: (10.0, 10.0, 4.0, 10.0), 1: (50.0, 10.0, 4.0, 10.0)}
    correspondence, counts = base.match_frame(gt, {7: gt[1], 3: gt[0]}, {}, cfg)
    assert correspondence == {0: 3, 1: 7}
    assert (counts.matches, counts.fp, counts.fn, counts.ids) == (2, 0, 0, 0)
    assert counts.overlap_sum == 2.0
    assert counts.matched_gt == [0, 1]

    correspondence, counts = base.match_frame(gt, {}, {0: 3}, cfg)
    assert correspondence == {0: 3}
    assert (counts.matches, counts.fp, counts.fn, counts.ids) == (0, 0, 2, 0)

    correspondence, counts = base.match_frame({}, {1: gt[0]}, {}, cfg)
    assert (counts.matches, counts.fp, counts.fn) == (0, 1, 0)

    # Below the overlap threshold nothing corresponds.
    correspondence, counts = base.match_frame({0: (0.0, 0.0, 2.0, 2.0)}, {0: (1.0, 0.0, 2.0, 2.0)}, {}, cfg)
    assert (counts.matches, counts.fp, counts.fn) == (0, 1, 1)
    assert correspondence == {}

    # A ground truth keeps a still valid hypothesis even when another now overlaps better.
    hyp = {4: (10.5, 10.0, 4.0, 10.0), 5: (10.0, 10.0, 4.0, 10.0)}
    correspondence, counts = base.match_frame({0: gt[0]}, hyp, {0: 4}, cfg)
    assert correspondence == {0: 4}
    assert counts.ids == 0
    correspondence, counts = base.match_frame({0: gt[0]}, hyp, {0: 4}, MetricsConfig(continuity=False))
    assert correspondence == {0: 5}
    assert counts.ids == 1

    # Centre distance matching.
    cfg = MetricsConfig(match_mode="distance", distance_threshold=5.0)
    _, counts = base.match_frame({0: (0.0, 0.0, 2.0, 2.0)}, {0: (4.0, 0.0, 2.0, 2.0)}, {}, cfg)
    assert counts.matches == 1
    assert counts.overlap_sum == 0
    _, counts = base.match_frame({0: (0.0, 0.0, 2.0, 2.0)}, {0: (6.0, 0.0, 2.0, 2.0)}, {}, cfg)
    assert counts.matches == 0


def test_identity_switch() -> None:
    box = (20.0, 20.0, 8.0, 20.0)
    ledger = EvalLedger()
    for frame in range(10):
        ledger.add_frame(frame, {0: box}, {1 if frame < 5 else 2: box})
    assert ledger.total("ids") == 1
    assert ledger.total("fp") == 0
    assert ledger.total("fn") == 0
    mota, motp = base.mota_motp(ledger)
    assert np.isclose(mota, 0.9)
    assert motp == 1

    # Switching back to the first hypothesis is another switch.
    ledger.add_frame(10, {0: box}, {1: box})
    assert ledger.total("ids") == 2

    try:
        ledger.add_frame(3, {}, {})
        raise AssertionError("Expected ValueError")
    except ValueError:
        pass


def test_mota_motp() -> None:
    box = (20.0, 20.0, 8.0, 20.0)
    ledger = EvalLedger()
    for frame in range(4):
        ledger.add_frame(frame, {0: box, 1: (60.0, 20.0, 8.0, 20.0)}, {})
    mota, motp = base.mota_motp(ledger)
    assert mota == 0
    assert motp == 0
    assert ledger.total("fn") == ledger.total("gt") == 8

    # MOTA is not clamped at zero.
    ledger = EvalLedger()
    for frame in range(4):
        ledger.add_frame(frame, {0: box}, {i: (100.0 + 20 * i, 0.0, 8.0, 20.0) for i in range(3)})
    mota, _ = base.mota_motp(ledger)
    assert np.isclose(mota, 1 - (12 + 4) / 4)
    assert mota < 0

    try:
        base.mota_motp(EvalLedger())
        raise AssertionError("Expected EmptyGTError")
    except base.EmptyGTError:
        pass
    ledger = EvalLedger()
    ledger.add_frame(0, {}, {0: box})
    try:
        base.mota_motp(ledger)
        raise AssertionError("Expected EmptyGTError")
    except base.EmptyGTError:
        pass

    # Matches and misses account for every ground truth box of every frame.
    rng = np.random.RandomState(0)
    ledger = EvalLedger()
    for frame in range(50):
        gt = {i: (rng.rand() * 50, rng.rand() * 50, 8.0, 20.0) for i in range(rng.randint(5))}
        hyp = {i: (rng.rand() * 50, rng.rand() * 50, 8.0, 20.0) for i in range(rng.randint(5))}
        counts = ledger.add_frame(frame, gt, hyp)
        assert counts.matches + counts.fn == counts.gt
        assert counts.matches + counts.fp == counts.hyp
    assert ledger.total("matches") + ledger.total("fn") == ledger.total("gt")


def test_mt_ml() -> None:
    box = (20.0, 20.0, 8.0, 20.0)
    far = (90.0, 20.0, 8.0, 20.0)
    ledger = EvalLedger()
    for frame in range(10):
        gt = {0: box, 1: (40.0, 20.0, 8.0, 20.0), 2: (60.0, 20.0, 8.0, 20.0)}
        hyp = {0: box, 1: gt[1] if frame == 0 else far, 2: gt[2] if frame < 5 else far}
        ledger.add_frame(frame, gt, hyp)
    assert ledger.coverage() == {0: 1.0, 1: 0.1, 2: 0.5}
    assert base.mt_ml(ledger) == (1, 1)
