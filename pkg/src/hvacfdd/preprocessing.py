"""Reduce raw telemetry to the dense single-mode subset used for clustering.

The chain is: month-level heating/cooling categorization from the valve
signals, an occupied-hours / device-ON filter, an interquartile-range
filter on the season's control valve, then matrix construction and
standardization. Filters only ever remove rows; they never reorder or
modify values, so every surviving timestamp exists in the source frame.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .dataset_io import TimeSeriesFrame
from .errors import AllColumnsDegenerate, LengthMismatch, MissingChannel, TooFewRows

HEATING = "heating"
COOLING = "cooling"
EXCLUDED = "excluded"

WEEKDAYS_MON_FRI = frozenset({0, 1, 2, 3, 4})  # Monday=0


def parse_time_of_day(text: str) -> int:
    """'HH:MM' -> seconds since midnight."""
    h, m = text.split(":")
    return int(h) * 3600 + int(m) * 60


@dataclass(frozen=True)
class ModeConfig:
    """Operating-mode and occupancy configuration.

    ``occupied_start``/``occupied_end`` are seconds since local midnight;
    the start is inclusive, the end exclusive. ``on_signal`` set to None
    skips the device-ON filter.
    """

    cooling_signal: str
    heating_signal: str
    on_signal: str | None = None
    occupied_days: frozenset[int] = WEEKDAYS_MON_FRI
    occupied_start: int = 6 * 3600
    occupied_end: int = 18 * 3600

    def __post_init__(self):
        if self.occupied_start >= self.occupied_end:
            raise LengthMismatch("occupied_start must precede occupied_end")
        if self.cooling_signal == self.heating_signal:
            raise MissingChannel("cooling and heating signals must differ")


def _require_channel(frame: TimeSeriesFrame, name: str) -> np.ndarray:
    if name not in frame.channels:
        raise MissingChannel(f"channel {name!r} not in frame")
    return frame.channels[name]


def _local_struct(frame: TimeSeriesFrame):
    local = frame.timestamps + frame.utc_offset_s
    return [time.gmtime(int(t)) for t in local]


def month_key(ts: int, utc_offset_s: int = 0) -> str:
    st = time.gmtime(int(ts) + utc_offset_s)
    return f"{st.tm_year:04d}-{st.tm_mon:02d}"


def classify_months(frame: TimeSeriesFrame, config: ModeConfig) -> dict[str, str]:
    """Label each calendar month heating, cooling or excluded.

    A month is cooling when the mean cooling-valve opening exceeds the
    mean heating-valve opening over that month's rows, heating when it
    is strictly lower, excluded on an exact tie or when no usable rows
    exist.
    """
    cool = _require_channel(frame, config.cooling_signal)
    heat = _require_channel(frame, config.heating_signal)
    keys = np.array(
        [month_key(t, frame.utc_offset_s) for t in frame.timestamps.tolist()]
    )
    out: dict[str, str] = {}
    for key in sorted(set(keys.tolist())):
        sel = keys == key
        c, h = cool[sel], heat[sel]
        if np.all(np.isnan(c)) or np.all(np.isnan(h)):
            out[key] = EXCLUDED
            continue
        mc, mh = np.nanmean(c), np.nanmean(h)
        if mc > mh:
            out[key] = COOLING
        elif mc < mh:
            out[key] = HEATING
        else:
            out[key] = EXCLUDED
    return out


def select_months(frame: TimeSeriesFrame, months: list[str]) -> TimeSeriesFrame:
    """Keep only rows falling in the given 'YYYY-MM' months."""
    wanted = set(months)
    keys = [month_key(t, frame.utc_offset_s) for t in frame.timestamps.tolist()]
    mask = np.array([k in wanted for k in keys], dtype=bool)
    return frame.take(mask)


def filter_operational(frame: TimeSeriesFrame, config: ModeConfig) -> TimeSeriesFrame:
    """Keep rows in occupied hours on occupied days with the device ON."""
    mask = np.ones(len(frame), dtype=bool)
    if config.on_signal is not None:
        on = _require_channel(frame, config.on_signal)
        mask &= ~np.isnan(on) & (on != 0)
    structs = _local_struct(frame)
    weekday = np.array([st.tm_wday for st in structs])
    second_of_day = np.array(
        [st.tm_hour * 3600 + st.tm_min * 60 + st.tm_sec for st in structs]
    )
    mask &= np.isin(weekday, list(config.occupied_days))
    mask &= (second_of_day >= config.occupied_start) & (
        second_of_day < config.occupied_end
    )
    return frame.take(mask)


def iqr_filter(frame: TimeSeriesFrame, signal: str) -> TimeSeriesFrame:
    """Keep rows whose signal value lies within [Q1, Q3].

    Quartiles use linear interpolation between closest ranks, computed
    over the non-missing values of the input rows.
    """
    values = _require_channel(frame, signal)
    finite = values[~np.isnan(values)]
    if finite.size < 4:
        raise TooFewRows(f"need >= 4 non-missing values of {signal!r}, got {finite.size}")
    q1, q3 = np.quantile(finite, [0.25, 0.75], method="linear")
    with np.errstate(invalid="ignore"):
        mask = (values >= q1) & (values <= q3)
    return frame.take(mask)


@dataclass(frozen=True)
class FeatureMatrix:
    """Numeric matrix with row->timestamp and column->channel maps."""

    values: np.ndarray
    timestamps: np.ndarray
    columns: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        ts = np.asarray(self.timestamps, dtype=np.int64)
        if values.ndim != 2:
            raise LengthMismatch("matrix values must be 2-D")
        if values.shape[0] != ts.size:
            raise LengthMismatch("row count differs from timestamp count")
        if values.shape[1] != len(self.columns):
            raise LengthMismatch("column count differs from column names")
        values.setflags(write=False)
        ts.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def build_matrix(
    frame: TimeSeriesFrame, channels: list[str]
) -> tuple[FeatureMatrix, np.ndarray]:
    """Stack the selected channels into a matrix, dropping incomplete rows.

    Returns the matrix and the boolean row mask applied to the frame, so
    callers can subset ground truth the same way.
    """
    cols = [_require_channel(frame, name) for name in channels]
    values = np.column_stack(cols) if cols else np.empty((len(frame), 0))
    mask = ~np.isnan(values).any(axis=1)
    matrix = FeatureMatrix(
        values=values[mask], timestamps=frame.timestamps[mask], columns=tuple(channels)
    )
    return matrix, mask


@dataclass(frozen=True)
class StandardScaler:
    """Per-column centering/scaling parameters, with degenerate columns dropped."""

    means: np.ndarray
    stds: np.ndarray
    kept_columns: tuple[str, ...]
    dropped_columns: tuple[str, ...] = ()

    def transform(self, values: np.ndarray) -> np.ndarray:
        return (values - self.means) / self.stds

    def inverse(self, values: np.ndarray) -> np.ndarray:
        return values * self.stds + self.means


def standardize(matrix: FeatureMatrix) -> tuple[FeatureMatrix, StandardScaler]:
    """Scale each column to mean 0, sample variance 1 (m-1 denominator).

    Zero-variance columns are dropped and reported on the scaler.
    """
    m = matrix.shape[0]
    if m < 2:
        raise TooFewRows(f"standardization needs >= 2 rows, got {m}")
    means = matrix.values.mean(axis=0)
    stds = matrix.values.std(axis=0, ddof=1)
    keep = stds > 0
    if not keep.any():
        raise AllColumnsDegenerate("every column has zero variance")
    kept = tuple(c for c, k in zip(matrix.columns, keep) if k)
    dropped = tuple(c for c, k in zip(matrix.columns, keep) if not k)
    scaler = StandardScaler(
        means=means[keep], stds=stds[keep], kept_columns=kept, dropped_columns=dropped
    )
    out = FeatureMatrix(
        values=scaler.transform(matrix.values[:, keep]),
        timestamps=matrix.timestamps,
        columns=kept,
    )
    return out, scaler
