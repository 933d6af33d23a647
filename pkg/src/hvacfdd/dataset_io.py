"""Ingest, validate and persist telemetry datasets and their fault labels.

CSV layout: first column ``timestamp`` (ISO-8601, local building time),
remaining columns are channel designations, optional final column
``fault`` in {0,1}. Timestamps are stored internally as integer seconds
since epoch together with a declared local-time offset; all wall-clock
logic (weekday, time of day) happens on ``epoch + utc_offset_s``.
"""

from __future__ import annotations

import calendar
import csv
import time
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    EmptyFile,
    IoFailure,
    IrregularCadence,
    LengthMismatch,
    NonMonotonicTimestamps,
    UnknownChannel,
)

NORMAL = 0
FAULT = 1

CHANNEL_KINDS = frozenset(
    {"temperature", "flow", "valve_command", "air_quality", "binary_status", "other"}
)

DEFAULT_TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%S"


def iso_to_epoch(text: str, fmt: str = DEFAULT_TIMESTAMP_FORMAT) -> int:
    """Parse a wall-clock timestamp string to integer epoch seconds."""
    return calendar.timegm(time.strptime(text.strip(), fmt))


def epoch_to_iso(ts: int, fmt: str = DEFAULT_TIMESTAMP_FORMAT) -> str:
    """Format integer epoch seconds back to the wall-clock string."""
    return time.strftime(fmt, time.gmtime(int(ts)))


@dataclass(frozen=True)
class ChannelSchema:
    """One telemetry point: short code, description, kind and unit."""

    designation: str
    description: str = ""
    kind: str = "other"
    unit: str = ""

    def __post_init__(self):
        if not self.designation:
            raise UnknownChannel("channel designation must be non-empty")
        if self.kind not in CHANNEL_KINDS:
            raise UnknownChannel(f"unknown channel kind {self.kind!r}")


def validate_schema(schema: list[ChannelSchema]) -> dict[str, ChannelSchema]:
    by_name: dict[str, ChannelSchema] = {}
    for ch in schema:
        if ch.designation in by_name:
            raise UnknownChannel(f"duplicate designation {ch.designation!r}")
        by_name[ch.designation] = ch
    return by_name


@dataclass(frozen=True)
class FaultInterval:
    """Closed time interval [start, end] known to contain a fault."""

    start: int
    end: int
    label: str = ""

    def __post_init__(self):
        if self.start > self.end:
            raise LengthMismatch(f"interval start {self.start} after end {self.end}")


@dataclass(frozen=True)
class TimeSeriesFrame:
    """Timestamped multichannel telemetry with optional per-row fault flags.

    ``timestamps`` are strictly increasing epoch seconds at a uniform
    cadence (gaps are integer multiples of ``cadence_s``); every channel
    holds exactly one float per timestamp with NaN marking missing values.
    """

    timestamps: np.ndarray
    channels: dict[str, np.ndarray]
    cadence_s: int
    ground_truth: np.ndarray | None = None
    utc_offset_s: int = 0
    schema: tuple[ChannelSchema, ...] = field(default=())

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        object.__setattr__(self, "timestamps", ts)
        if ts.size == 0:
            raise EmptyFile("frame has no rows")
        gaps = np.diff(ts)
        if np.any(gaps <= 0):
            pos = int(np.argmax(gaps <= 0))
            raise NonMonotonicTimestamps(
                f"timestamps not strictly increasing at row {pos + 1}"
            )
        if self.cadence_s <= 0:
            raise IrregularCadence(f"cadence must be positive, got {self.cadence_s}")
        if gaps.size and np.any(gaps % self.cadence_s != 0):
            raise IrregularCadence("timestamp gaps are not multiples of the cadence")
        chans = {}
        for name, values in self.channels.items():
            arr = np.asarray(values, dtype=np.float64)
            if arr.shape != ts.shape:
                raise LengthMismatch(
                    f"channel {name!r} has {arr.size} values for {ts.size} timestamps"
                )
            arr.setflags(write=False)
            chans[name] = arr
        object.__setattr__(self, "channels", chans)
        if self.ground_truth is not None:
            gt = np.asarray(self.ground_truth, dtype=np.int8)
            if gt.shape != ts.shape:
                raise LengthMismatch("ground_truth length differs from timestamps")
            if not np.all((gt == NORMAL) | (gt == FAULT)):
                raise LengthMismatch("ground_truth values must be 0 or 1")
            gt.setflags(write=False)
            object.__setattr__(self, "ground_truth", gt)
        ts.setflags(write=False)

    def __len__(self) -> int:
        return int(self.timestamps.size)

    @property
    def channel_names(self) -> list[str]:
        return list(self.channels.keys())

    def take(self, mask: np.ndarray) -> "TimeSeriesFrame":
        """Row subset by boolean mask; order and values untouched."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != self.timestamps.shape:
            raise LengthMismatch("mask length differs from frame length")
        if not mask.any():
            raise EmptyFile("filter removed every row")
        return TimeSeriesFrame(
            timestamps=self.timestamps[mask],
            channels={k: v[mask] for k, v in self.channels.items()},
            cadence_s=self.cadence_s,
            ground_truth=None if self.ground_truth is None else self.ground_truth[mask],
            utc_offset_s=self.utc_offset_s,
            schema=self.schema,
        )


def _infer_cadence(timestamps: np.ndarray) -> int:
    gaps = np.diff(timestamps)
    if gaps.size == 0:
        return 1
    modal_gap, _ = Counter(gaps.tolist()).most_common(1)[0]
    non_modal = int(np.count_nonzero(gaps != modal_gap))
    if non_modal > 0.05 * gaps.size:
        raise IrregularCadence(
            f"{non_modal}/{gaps.size} gaps differ from the modal gap {modal_gap}s"
        )
    if np.any(gaps % modal_gap != 0):
        raise IrregularCadence("timestamp gaps are not multiples of the modal gap")
    return int(modal_gap)


def load_frame(
    path,
    schema: list[ChannelSchema],
    timestamp_format: str = DEFAULT_TIMESTAMP_FORMAT,
    utc_offset_s: int = 0,
) -> TimeSeriesFrame:
    """Load a telemetry CSV into a validated frame.

    Header names must map onto the schema designations; unparseable
    numeric cells become NaN; cadence is inferred as the modal gap.
    """
    by_name = validate_schema(schema)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise EmptyFile(f"{path}: file is empty") from None
            rows = list(reader)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    header = [h.strip() for h in header]
    if not header or header[0] != "timestamp":
        raise UnknownChannel(f"{path}: first column must be 'timestamp'")
    has_fault = bool(header[1:]) and header[-1] == "fault"
    channel_cols = header[1:-1] if has_fault else header[1:]
    for name in channel_cols:
        if name not in by_name:
            raise UnknownChannel(f"{path}: column {name!r} is not in the schema")
    if not rows:
        raise EmptyFile(f"{path}: no data rows")

    n = len(rows)
    timestamps = np.empty(n, dtype=np.int64)
    values = np.full((n, len(channel_cols)), np.nan)
    fault = np.zeros(n, dtype=np.int8) if has_fault else None
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise UnknownChannel(f"{path}: row {i + 2} has {len(row)} cells")
        timestamps[i] = iso_to_epoch(row[0], timestamp_format)
        for j, cell in enumerate(row[1 : 1 + len(channel_cols)]):
            try:
                values[i, j] = float(cell)
            except ValueError:
                pass  # stays NaN
        if has_fault:
            try:
                fault[i] = FAULT if float(row[-1]) != 0 else NORMAL
            except ValueError:
                fault[i] = NORMAL

    cadence = _infer_cadence(timestamps)
    return TimeSeriesFrame(
        timestamps=timestamps,
        channels={name: values[:, j] for j, name in enumerate(channel_cols)},
        cadence_s=cadence,
        ground_truth=fault,
        utc_offset_s=utc_offset_s,
        schema=tuple(by_name[name] for name in channel_cols),
    )


def save_frame(frame: TimeSeriesFrame, path, timestamp_format: str = DEFAULT_TIMESTAMP_FORMAT):
    """Write a frame back to CSV, floats at 17 significant digits."""
    names = frame.channel_names
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["timestamp"] + names
            if frame.ground_truth is not None:
                header.append("fault")
            writer.writerow(header)
            for i in range(len(frame)):
                row = [epoch_to_iso(frame.timestamps[i], timestamp_format)]
                for name in names:
                    v = frame.channels[name][i]
                    row.append("" if np.isnan(v) else format(v, ".17g"))
                if frame.ground_truth is not None:
                    row.append(str(int(frame.ground_truth[i])))
                writer.writerow(row)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def apply_fault_intervals(
    frame: TimeSeriesFrame, intervals: list[FaultInterval]
) -> TimeSeriesFrame:
    """Stamp per-row ground truth from closed fault intervals.

    A row is a fault iff its timestamp falls inside any interval
    (inclusive on both ends); idempotent and order-independent.
    """
    flags = np.zeros(len(frame), dtype=np.int8)
    for iv in intervals:
        flags[(frame.timestamps >= iv.start) & (frame.timestamps <= iv.end)] = FAULT
    return replace(frame, ground_truth=flags)


def export_labels(
    frame: TimeSeriesFrame,
    cluster_ids: np.ndarray,
    fault_flags: np.ndarray,
    path,
    timestamp_format: str = DEFAULT_TIMESTAMP_FORMAT,
):
    """Persist per-row labels as (timestamp, cluster_id, fault_flag, is_noise)."""
    cluster_ids = np.asarray(cluster_ids, dtype=np.int64)
    fault_flags = np.asarray(fault_flags, dtype=np.int8)
    if cluster_ids.size != len(frame) or fault_flags.size != len(frame):
        raise LengthMismatch(
            f"{cluster_ids.size} labels / {fault_flags.size} flags for {len(frame)} rows"
        )
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["timestamp", "cluster_id", "fault_flag", "is_noise"])
            for i in range(len(frame)):
                writer.writerow(
                    [
                        epoch_to_iso(frame.timestamps[i], timestamp_format),
                        int(cluster_ids[i]),
                        int(fault_flags[i]),
                        "true" if cluster_ids[i] == -1 else "false",
                    ]
                )
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_labels(path, timestamp_format: str = DEFAULT_TIMESTAMP_FORMAT):
    """Read back an exported label file.

    Returns (timestamps, cluster_ids, fault_flags) numpy arrays.
    """
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise EmptyFile(f"{path}: file is empty")
            rows = list(reader)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if header[:3] != ["timestamp", "cluster_id", "fault_flag"]:
        raise UnknownChannel(f"{path}: not a label export")
    ts = np.array([iso_to_epoch(r[0], timestamp_format) for r in rows], dtype=np.int64)
    ids = np.array([int(r[1]) for r in rows], dtype=np.int64)
    flags = np.array([int(r[2]) for r in rows], dtype=np.int8)
    return ts, ids, flags
