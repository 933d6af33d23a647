"""Synthetic telemetry generators.

Both generators are their own ground truth: they return frames whose
``ground_truth`` flags mark exactly the rows drawn from the fault
regime, which makes them suitable as end-to-end oracles.
"""

from __future__ import annotations

import numpy as np

from .dataset_io import ChannelSchema, FaultInterval, TimeSeriesFrame, apply_fault_intervals, iso_to_epoch

TEN_CHANNELS = (
    "T",
    "Q",
    "INSLAB-T",
    "DA-T",
    "CLG-O",
    "HTG-O",
    "ST",
    "RT",
    "VR",
    "EA-T",
)

_BASE_MEANS = (21.0, 600.0, 23.0, 14.0, 0.5, 0.1, 7.0, 12.0, 0.8, 22.0)
_BASE_SCALES = (1.5, 80.0, 1.2, 2.0, 0.15, 0.05, 1.0, 1.5, 0.1, 1.8)


def schema_for(channels=TEN_CHANNELS) -> list[ChannelSchema]:
    return [ChannelSchema(designation=name) for name in channels]


def make_synthetic_frame(
    n_rows: int = 2000,
    fault_fraction: float = 0.05,
    shift_std: float = 8.0,
    shifted_channels: tuple[str, ...] = ("DA-T", "RT", "ST"),
    fault_tightness: float = 1.0,
    seed: int = 7,
    cadence_s: int = 60,
    start: str = "2020-06-01T00:00:00",
) -> TimeSeriesFrame:
    """Ten-channel frame with one contiguous block of fault rows.

    Normal rows are independent per-channel gaussians; fault rows come
    from a regime shifted by ``shift_std`` normal-regime standard
    deviations on the chosen channels. ``fault_tightness`` scales the
    fault regime's spread relative to normal.
    """
    rng = np.random.default_rng(seed)
    names = TEN_CHANNELS
    n_fault = int(round(n_rows * fault_fraction))
    fault_start = int(n_rows * 0.6)
    truth = np.zeros(n_rows, dtype=np.int8)
    truth[fault_start : fault_start + n_fault] = 1

    channels: dict[str, np.ndarray] = {}
    for name, mean, scale in zip(names, _BASE_MEANS, _BASE_SCALES):
        values = mean + scale * rng.standard_normal(n_rows)
        fault_noise = mean + fault_tightness * scale * rng.standard_normal(n_fault)
        if name in shifted_channels:
            fault_noise += shift_std * scale
        values[truth == 1] = fault_noise
        channels[name] = values

    t0 = iso_to_epoch(start)
    timestamps = t0 + cadence_s * np.arange(n_rows, dtype=np.int64)
    return TimeSeriesFrame(
        timestamps=timestamps,
        channels=channels,
        cadence_s=cadence_s,
        ground_truth=truth,
        schema=tuple(schema_for(names)),
    )


def make_seasonal_frame(
    seed: int = 3,
    cadence_s: int = 600,
    fault_interval: tuple[str, str] = ("2020-06-12T03:20:00", "2020-06-18T09:50:00"),
) -> TimeSeriesFrame:
    """December + June telemetry for a fan-coil with one June fault.

    December runs the heating valve, June the cooling valve; the device
    is ON during occupied weekday hours only. During the fault the
    discharge temperature stops responding to the cooling valve (it
    stays high while CLG-O saturates), mimicking starved chilled water.
    """
    rng = np.random.default_rng(seed)
    segments = [
        ("2019-12-01T00:00:00", "2020-01-01T00:00:00", "heating"),
        ("2020-06-01T00:00:00", "2020-07-01T00:00:00", "cooling"),
    ]
    ts_parts, mode_parts = [], []
    for begin, end, mode in segments:
        t = np.arange(iso_to_epoch(begin), iso_to_epoch(end), cadence_s, dtype=np.int64)
        ts_parts.append(t)
        mode_parts.extend([mode] * t.size)
    timestamps = np.concatenate(ts_parts)
    n = timestamps.size
    cooling = np.array([m == "cooling" for m in mode_parts])

    day_second = timestamps % 86400
    weekday = ((timestamps // 86400) + 3) % 7  # epoch day 0 was a Thursday
    occupied = (weekday < 5) & (day_second >= 6 * 3600) & (day_second < 18 * 3600)
    on = occupied.astype(float)

    clg = np.where(cooling, np.clip(0.5 + 0.12 * rng.standard_normal(n), 0, 1), 0.0)
    htg = np.where(~cooling, np.clip(0.6 + 0.12 * rng.standard_normal(n), 0, 1), 0.0)
    zone_t = np.where(cooling, 23.5, 21.0) + 0.6 * rng.standard_normal(n)
    da_t = np.where(cooling, 14.0 - 3.0 * (clg - 0.5), 30.0 + 8.0 * (htg - 0.6))
    da_t = da_t + 0.4 * rng.standard_normal(n)
    st = np.where(cooling, 7.0, 45.0) + 0.5 * rng.standard_normal(n)
    rt = np.where(cooling, 12.0, 38.0) + 0.5 * rng.standard_normal(n)

    frame = TimeSeriesFrame(
        timestamps=timestamps,
        channels={
            "T": zone_t,
            "DA-T": da_t,
            "CLG-O": clg,
            "HTG-O": htg,
            "ST": st,
            "RT": rt,
            "ON": on,
        },
        cadence_s=cadence_s,
        schema=tuple(schema_for(("T", "DA-T", "CLG-O", "HTG-O", "ST", "RT")))
        + (ChannelSchema(designation="ON", kind="binary_status"),),
    )
    start, end = (iso_to_epoch(s) for s in fault_interval)
    faulty = (frame.timestamps >= start) & (frame.timestamps <= end)
    da_t = frame.channels["DA-T"].copy()
    st_v = frame.channels["ST"].copy()
    # no chilled water: discharge and supply temperatures drift to zone level
    da_t[faulty] = 23.0 + 0.3 * rng.standard_normal(int(faulty.sum()))
    st_v[faulty] = 18.0 + 0.3 * rng.standard_normal(int(faulty.sum()))
    channels = dict(frame.channels)
    channels["DA-T"] = da_t
    channels["ST"] = st_v
    frame = TimeSeriesFrame(
        timestamps=frame.timestamps,
        channels=channels,
        cadence_s=cadence_s,
        schema=frame.schema,
    )
    return apply_fault_intervals(
        frame, [FaultInterval(start=start, end=end, label="no chilled water")]
    )
