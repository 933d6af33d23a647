import numpy as np
import pytest

from hvacfdd import dataset_io
from hvacfdd.dataset_io import (
    ChannelSchema,
    FaultInterval,
    TimeSeriesFrame,
    apply_fault_intervals,
    epoch_to_iso,
    export_labels,
    iso_to_epoch,
    load_frame,
    load_labels,
    save_frame,
)
from hvacfdd.errors import (
    EmptyFile,
    IrregularCadence,
    LengthMismatch,
    NonMonotonicTimestamps,
    UnknownChannel,
)

SCHEMA = [
    ChannelSchema("T", kind="temperature"),
    ChannelSchema("CLG-O", kind="valve_command"),
]


def write_csv(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_load_minimal_frame(tmp_path):
    path = write_csv(
        tmp_path / "tiny.csv",
        [
            "timestamp,T,CLG-O",
            "2020-06-01T00:00:00,21.5,0.4",
            "2020-06-01T00:01:00,21.6,0.5",
            "2020-06-01T00:02:00,21.4,0.6",
        ],
    )
    frame = load_frame(path, SCHEMA)
    assert len(frame) == 3
    assert frame.channel_names == ["T", "CLG-O"]
    assert frame.cadence_s == 60
    assert frame.ground_truth is None
    assert frame.channels["T"][1] == 21.6


def test_load_with_fault_column_and_missing_cells(tmp_path):
    path = write_csv(
        tmp_path / "fault.csv",
        [
            "timestamp,T,CLG-O,fault",
            "2020-06-01T00:00:00,21.5,0.4,0",
            "2020-06-01T00:01:00,n/a,0.5,1",
            "2020-06-01T00:02:00,21.4,,1",
        ],
    )
    frame = load_frame(path, SCHEMA)
    assert frame.ground_truth.tolist() == [0, 1, 1]
    assert np.isnan(frame.channels["T"][1])
    assert np.isnan(frame.channels["CLG-O"][2])


def test_load_wide_minute_frame_with_fault_flag(tmp_path, rng):
    # shape of a year-long unit export: minute cadence, 29 feature
    # columns plus the trailing fault flag
    names = [f"F{i:02d}" for i in range(29)]
    schema = [ChannelSchema(n) for n in names]
    lines = ["timestamp," + ",".join(names) + ",fault"]
    t0 = iso_to_epoch("2018-06-01T00:00:00")
    for i in range(120):
        cells = ",".join(format(v, ".6g") for v in rng.standard_normal(29))
        lines.append(f"{epoch_to_iso(t0 + 60 * i)},{cells},{1 if 40 <= i < 60 else 0}")
    frame = load_frame(write_csv(tmp_path / "wide.csv", lines), schema)
    assert len(frame.channel_names) == 29
    assert frame.cadence_s == 60
    assert frame.ground_truth is not None
    assert int(frame.ground_truth.sum()) == 20


def test_non_monotonic_timestamps_rejected(tmp_path):
    path = write_csv(
        tmp_path / "bad.csv",
        [
            "timestamp,T,CLG-O",
            "2020-06-01T00:01:00,21.5,0.4",
            "2020-06-01T00:00:00,21.6,0.5",
        ],
    )
    with pytest.raises(NonMonotonicTimestamps):
        load_frame(path, SCHEMA)


def test_unknown_channel_rejected(tmp_path):
    path = write_csv(
        tmp_path / "bad.csv",
        ["timestamp,T,BOGUS", "2020-06-01T00:00:00,1,2"],
    )
    with pytest.raises(UnknownChannel):
        load_frame(path, SCHEMA)


def test_empty_file_rejected(tmp_path):
    path = write_csv(tmp_path / "empty.csv", ["timestamp,T,CLG-O"])
    with pytest.raises(EmptyFile):
        load_frame(path, SCHEMA)


def test_irregular_cadence_rejected(tmp_path):
    lines = ["timestamp,T,CLG-O"]
    # gaps of 60, 90, 60 seconds: 90 is not a multiple of the modal 60
    for off in (0, 60, 150, 210):
        lines.append(f"{epoch_to_iso(iso_to_epoch('2020-06-01T00:00:00') + off)},1,2")
    with pytest.raises(IrregularCadence):
        load_frame(write_csv(tmp_path / "gap.csv", lines), SCHEMA)


def test_gaps_multiple_of_cadence_accepted(tmp_path):
    lines = ["timestamp,T,CLG-O"]
    offsets = list(range(0, 60 * 30, 60)) + [60 * 40]  # one 10-minute hole
    for off in offsets:
        lines.append(f"{epoch_to_iso(iso_to_epoch('2020-06-01T00:00:00') + off)},1,2")
    frame = load_frame(write_csv(tmp_path / "hole.csv", lines), SCHEMA)
    assert frame.cadence_s == 60
    assert len(frame) == 31


def test_save_load_round_trip_bit_exact(tmp_path, rng):
    n = 50
    t0 = iso_to_epoch("2020-06-01T00:00:00")
    frame = TimeSeriesFrame(
        timestamps=t0 + 60 * np.arange(n),
        channels={
            "T": rng.standard_normal(n) * 7.31,
            "CLG-O": rng.random(n),
        },
        cadence_s=60,
        ground_truth=(rng.random(n) < 0.2).astype(np.int8),
    )
    path = tmp_path / "round.csv"
    save_frame(frame, path)
    back = load_frame(path, SCHEMA)
    assert np.array_equal(back.timestamps, frame.timestamps)
    for name in frame.channel_names:
        assert np.array_equal(back.channels[name], frame.channels[name])
    assert np.array_equal(back.ground_truth, frame.ground_truth)


def make_minute_frame(start, n):
    t0 = iso_to_epoch(start)
    return TimeSeriesFrame(
        timestamps=t0 + 60 * np.arange(n),
        channels={"T": np.zeros(n)},
        cadence_s=60,
    )


def test_apply_fault_intervals_closed_bounds():
    frame = make_minute_frame("2018-06-04T09:00:00", 60)
    iv = FaultInterval(
        start=iso_to_epoch("2018-06-04T09:29:00"),
        end=iso_to_epoch("2018-06-04T09:40:00"),
    )
    flagged = apply_fault_intervals(frame, [iv])
    marked = np.where(flagged.ground_truth == 1)[0]
    assert marked.tolist() == list(range(29, 41))  # inclusive on both ends


def test_apply_fault_intervals_empty_and_union():
    frame = make_minute_frame("2020-01-01T00:00:00", 100)
    assert apply_fault_intervals(frame, []).ground_truth.sum() == 0
    a = FaultInterval(frame.timestamps[10], frame.timestamps[19])
    b = FaultInterval(frame.timestamps[50], frame.timestamps[54])
    flagged = apply_fault_intervals(frame, [a, b])
    assert flagged.ground_truth.sum() == 10 + 5  # disjoint: counts add up


def test_apply_fault_intervals_idempotent_order_independent():
    frame = make_minute_frame("2020-01-01T00:00:00", 50)
    a = FaultInterval(frame.timestamps[5], frame.timestamps[14])
    b = FaultInterval(frame.timestamps[10], frame.timestamps[29])
    once = apply_fault_intervals(frame, [a, b])
    twice = apply_fault_intervals(once, [b, a])
    assert np.array_equal(once.ground_truth, twice.ground_truth)


def test_export_labels_round_trip(tmp_path):
    frame = make_minute_frame("2020-01-01T00:00:00", 4)
    ids = np.array([0, 0, 1, -1])
    flags = np.array([0, 0, 1, 1], dtype=np.int8)
    path = tmp_path / "labels.csv"
    export_labels(frame, ids, flags, path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 5  # header + 4 rows
    assert lines[-1].endswith(",-1,1,true")  # noise sentinel convention
    ts, back_ids, back_flags = load_labels(path)
    assert np.array_equal(ts, frame.timestamps)
    assert np.array_equal(back_ids, ids)
    assert np.array_equal(back_flags, flags)


def test_export_labels_length_mismatch(tmp_path):
    frame = make_minute_frame("2020-01-01T00:00:00", 4)
    with pytest.raises(LengthMismatch):
        export_labels(frame, np.array([0, 1]), np.array([0, 1]), tmp_path / "x.csv")


def test_schema_duplicate_designation_rejected():
    with pytest.raises(UnknownChannel):
        dataset_io.validate_schema([ChannelSchema("T"), ChannelSchema("T")])


def test_frame_is_immutable(synthetic_frame):
    with pytest.raises(ValueError):
        synthetic_frame.timestamps[0] = 0
    with pytest.raises(ValueError):
        synthetic_frame.channels["T"][0] = 0.0
