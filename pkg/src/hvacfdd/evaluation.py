"""Score cluster labels against ground truth.

The fault flag convention: the largest cluster is normal operation,
every other cluster and all noise points are faults (faults are rare, so
the dominant mode of a single-season, single-mode dataset is normal).
The positive class for all metrics is fault. Undefined ratios are
carried as NaN, never silently zeroed; display rounding is 3 decimals,
half-to-even.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset_io import FAULT, NORMAL, FaultInterval
from .errors import AllNoise, EmptyCounts, LengthMismatch
from .optics import ClusterLabels


@dataclass(frozen=True)
class ConfusionCounts:
    """Confusion matrix with fault as the positive class."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsRow:
    """Precision/recall/F1/accuracy; NaN marks undefined ratios."""

    precision: float
    recall: float
    f1: float
    accuracy: float

    def as_dict(self) -> dict[str, float | None]:
        """JSON-safe mapping with NaN encoded as null."""
        return {
            name: (None if math.isnan(value) else value)
            for name, value in (
                ("precision", self.precision),
                ("recall", self.recall),
                ("f1", self.f1),
                ("accuracy", self.accuracy),
            )
        }


def format_metric(value: float) -> str:
    """Display form: three decimals, ties to even; NaN verbatim."""
    if math.isnan(value):
        return "NaN"
    return format(value, ".3f")


@dataclass(frozen=True)
class FaultAssignment:
    """Per-row flags plus which cluster was called normal."""

    flags: np.ndarray
    normal_cluster: int
    ambiguous_majority: bool

    def __post_init__(self):
        flags = np.asarray(self.flags, dtype=np.int8)
        flags.setflags(write=False)
        object.__setattr__(self, "flags", flags)


def assign_fault_flags(labels: ClusterLabels) -> FaultAssignment:
    """Flag rows: largest cluster -> normal, everything else -> fault.

    Equal-size tops pick the lowest cluster id and are reported as an
    ambiguous majority rather than resolved silently.
    """
    sizes = labels.sizes()
    cluster_sizes = {cid: n for cid, n in sizes.items() if cid >= 0}
    if not cluster_sizes:
        raise AllNoise("every point is noise; no cluster can be called normal")
    top = max(cluster_sizes.values())
    winners = sorted(cid for cid, n in cluster_sizes.items() if n == top)
    normal = winners[0]
    flags = np.where(labels.cluster_id == normal, NORMAL, FAULT).astype(np.int8)
    return FaultAssignment(
        flags=flags, normal_cluster=normal, ambiguous_majority=len(winners) > 1
    )


def confusion_counts(pred, truth) -> ConfusionCounts:
    """Count agreement between predicted and true fault flags."""
    pred = np.asarray(pred, dtype=np.int8)
    truth = np.asarray(truth, dtype=np.int8)
    if pred.shape != truth.shape:
        raise LengthMismatch(f"{pred.size} predictions vs {truth.size} truths")
    return ConfusionCounts(
        tp=int(np.count_nonzero((pred == FAULT) & (truth == FAULT))),
        fp=int(np.count_nonzero((pred == FAULT) & (truth == NORMAL))),
        fn=int(np.count_nonzero((pred == NORMAL) & (truth == FAULT))),
        tn=int(np.count_nonzero((pred == NORMAL) & (truth == NORMAL))),
    )


def classification_metrics(c: ConfusionCounts) -> MetricsRow:
    """Precision, recall, F1 and accuracy from confusion counts.

    A zero denominator yields NaN for the affected ratio; F1 is NaN when
    either component is undefined or both are zero.
    """
    if c.total == 0:
        raise EmptyCounts("confusion counts sum to zero")
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else math.nan
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else math.nan
    if math.isnan(precision) or math.isnan(recall) or precision + recall == 0:
        f1 = math.nan
    else:
        f1 = 2 * precision * recall / (precision + recall)
    accuracy = (c.tp + c.tn) / c.total
    return MetricsRow(precision=precision, recall=recall, f1=f1, accuracy=accuracy)


def fault_intervals(flags, timestamps, cadence_s: int) -> list[FaultInterval]:
    """Maximal contiguous fault runs as closed [first, last] intervals.

    Rows survive several filters before scoring, so consecutive fault
    rows can be far apart in wall time; a gap beyond twice the cadence
    starts a new interval.
    """
    flags = np.asarray(flags, dtype=np.int8)
    timestamps = np.asarray(timestamps, dtype=np.int64)
    if flags.shape != timestamps.shape:
        raise LengthMismatch(f"{flags.size} flags vs {timestamps.size} timestamps")
    out: list[FaultInterval] = []
    start = prev = None
    for ts, flag in zip(timestamps.tolist(), flags.tolist()):
        if flag == FAULT:
            if start is None or ts - prev > 2 * cadence_s:
                if start is not None:
                    out.append(FaultInterval(start=start, end=prev, label="detected"))
                start = ts
            prev = ts
        elif start is not None:
            out.append(FaultInterval(start=start, end=prev, label="detected"))
            start = prev = None
    if start is not None:
        out.append(FaultInterval(start=start, end=prev, label="detected"))
    return out
