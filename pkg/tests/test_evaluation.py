import math

import numpy as np
import pytest

from hvacfdd.dataset_io import FaultInterval, TimeSeriesFrame, apply_fault_intervals, iso_to_epoch
from hvacfdd.errors import AllNoise, EmptyCounts, LengthMismatch
from hvacfdd.evaluation import (
    ConfusionCounts,
    assign_fault_flags,
    classification_metrics,
    confusion_counts,
    fault_intervals,
    format_metric,
)
from hvacfdd.optics import ClusterLabels


def labels_of(ids):
    ids = np.asarray(ids)
    return ClusterLabels(
        cluster_id=ids, threshold=1.0, num_clusters=int(ids.max(initial=-1)) + 1
    )


def test_majority_rule():
    ids = np.array([0] * 900 + [1] * 50 + [-1] * 10)
    fa = assign_fault_flags(labels_of(ids))
    assert fa.normal_cluster == 0
    assert int((fa.flags == 0).sum()) == 900
    assert int((fa.flags == 1).sum()) == 60
    assert not fa.ambiguous_majority


def test_single_cluster_all_normal():
    fa = assign_fault_flags(labels_of(np.zeros(20, dtype=int)))
    assert fa.flags.sum() == 0


def test_equal_clusters_ambiguous_lowest_id_normal():
    ids = np.array([0] * 25 + [1] * 25)
    fa = assign_fault_flags(labels_of(ids))
    assert fa.normal_cluster == 0
    assert fa.ambiguous_majority


def test_all_noise_surfaces():
    with pytest.raises(AllNoise):
        assign_fault_flags(labels_of(np.full(5, -1)))


def test_assignment_invariant_under_relabeling():
    ids = np.array([0] * 10 + [1] * 70 + [2] * 20)
    swapped = np.array([1] * 10 + [0] * 70 + [2] * 20)
    a = assign_fault_flags(labels_of(ids))
    b = assign_fault_flags(labels_of(swapped))
    assert np.array_equal(a.flags, b.flags)


def test_confusion_counts_exact():
    truth = np.array([1] * 10 + [0] * 90, dtype=np.int8)
    assert confusion_counts(truth, truth) == ConfusionCounts(10, 0, 0, 90)
    silent = np.zeros(100, dtype=np.int8)
    assert confusion_counts(silent, truth) == ConfusionCounts(0, 0, 10, 90)


def test_confusion_counts_sum_property(rng):
    for _ in range(50):
        n = int(rng.integers(1, 40))
        pred = rng.integers(0, 2, n).astype(np.int8)
        truth = rng.integers(0, 2, n).astype(np.int8)
        c = confusion_counts(pred, truth)
        assert c.total == n


def test_confusion_counts_length_mismatch():
    with pytest.raises(LengthMismatch):
        confusion_counts(np.zeros(3, dtype=np.int8), np.zeros(4, dtype=np.int8))


@pytest.mark.parametrize(
    "counts, expected",
    [
        ((7219, 0, 9, 19547), (1.0, 0.999, 0.999, 0.999)),
        ((0, 46, 4279, 22450), (0.0, 0.0, math.nan, 0.838)),
        ((1995, 0, 1836, 22944), (1.0, 0.520, 0.684, 0.931)),
        ((941, 48, 0, 2714), (0.951, 1.0, 0.975, 0.987)),
    ],
)
def test_metrics_reference_rows(counts, expected):
    row = classification_metrics(ConfusionCounts(*counts))
    got = (row.precision, row.recall, row.f1, row.accuracy)
    for g, e in zip(got, expected):
        if math.isnan(e):
            assert math.isnan(g)
        else:
            assert g == pytest.approx(e, abs=1e-3)


def test_metrics_empty_counts():
    with pytest.raises(EmptyCounts):
        classification_metrics(ConfusionCounts(0, 0, 0, 0))


def test_format_metric_rounding():
    assert format_metric(1.0) == "1.000"
    assert format_metric(0.99875) == "0.999"
    assert format_metric(math.nan) == "NaN"
    assert format_metric(0.0625) == "0.062"  # ties to even
    assert format_metric(0.9375) == "0.938"


def minute_frame(start, n):
    t0 = iso_to_epoch(start)
    return TimeSeriesFrame(
        timestamps=t0 + 60 * np.arange(n),
        channels={"T": np.zeros(n)},
        cadence_s=60,
    )


def test_fault_intervals_empty_and_single_run():
    frame = minute_frame("2020-06-01T00:00:00", 10)
    assert fault_intervals(np.zeros(10, dtype=np.int8), frame.timestamps, 60) == []
    flags = np.zeros(10, dtype=np.int8)
    flags[3:6] = 1
    (iv,) = fault_intervals(flags, frame.timestamps, 60)
    assert iv.start == frame.timestamps[3]
    assert iv.end == frame.timestamps[5]


def test_fault_intervals_split_on_large_gap():
    t0 = iso_to_epoch("2020-06-01T00:00:00")
    timestamps = np.array([t0, t0 + 60, t0 + 120, t0 + 600, t0 + 660], dtype=np.int64)
    flags = np.ones(5, dtype=np.int8)
    intervals = fault_intervals(flags, timestamps, 60)
    assert len(intervals) == 2  # 480 s hole > 2 x 60 s cadence
    assert intervals[0].end == t0 + 120
    assert intervals[1].start == t0 + 600


def test_interval_round_trip_through_flags():
    frame = minute_frame("2018-06-04T09:00:00", 24 * 60)
    spans = [
        ("2018-06-04T09:29:00", "2018-06-04T17:08:00"),
        ("2018-06-04T20:00:00", "2018-06-04T21:30:00"),
    ]
    intervals = [
        FaultInterval(start=iso_to_epoch(a), end=iso_to_epoch(b)) for a, b in spans
    ]
    flagged = apply_fault_intervals(frame, intervals)
    back = fault_intervals(flagged.ground_truth, flagged.timestamps, frame.cadence_s)
    assert [(iv.start, iv.end) for iv in back] == [
        (iv.start, iv.end) for iv in intervals
    ]
