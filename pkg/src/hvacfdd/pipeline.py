"""End-to-end orchestration and the on-disk run store.

A run is: load -> ground truth -> month/mode selection -> occupied-hours
filter -> IQR filter on the season's valve -> matrix -> standardize ->
PCA -> k-distance curve -> density ordering -> k-means -> threshold
extraction -> fault flags -> metrics -> persisted artifacts.

Runs are content-addressed: the id is a digest of the normalized config
plus the dataset bytes, so identical inputs always land in the same
store directory with bit-identical artifacts. A run configured with
threshold "pending" stops after the reachability and k-distance curves
and waits for an analyst to extract interactively; extraction what-ifs
never mutate the record.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dataset_io, evaluation, kmeans, optics, pca, preprocessing
from .dataset_io import FaultInterval, epoch_to_iso, iso_to_epoch
from .errors import EmptyFile, InvalidConfig, NonPositiveThreshold, RunNotReady, UnknownRun

PENDING = "pending"
SUGGEST = "suggest"

STAGES = (
    "load",
    "preprocess",
    "standardize",
    "pca",
    "kdist",
    "optics",
    "kmeans",
    "extract",
    "evaluate",
    "persist",
)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _clean_float(x: float) -> float | None:
    x = float(x)
    return None if not np.isfinite(x) else x


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run; mirrors the JSON config."""

    dataset: str
    analysis_channels: tuple[str, ...]
    season: str = "cooling"
    schema: tuple[dict, ...] | None = None
    mode: dict | None = None
    months: tuple[str, ...] | None = None
    month_overrides: dict | None = None
    iqr_signal: str | None = "auto"
    use_pca: bool = False
    pc_selection: dict = field(default_factory=lambda: {"method": "scree_gap"})
    optics_params: dict = field(
        default_factory=lambda: {"min_pts": 15, "eps": SUGGEST}
    )
    threshold: float | str = PENDING
    kmeans_params: dict = field(
        default_factory=lambda: {"k": 2, "seed": 0, "restarts": 10}
    )
    truth_intervals: tuple[dict, ...] | None = None
    timestamp_format: str = dataset_io.DEFAULT_TIMESTAMP_FORMAT
    utc_offset_s: int = 0

    def __post_init__(self):
        if self.season not in (preprocessing.HEATING, preprocessing.COOLING):
            raise InvalidConfig(f"season must be heating or cooling, got {self.season!r}")
        if not self.analysis_channels:
            raise InvalidConfig("analysis_channels must not be empty")
        if self.threshold != PENDING and not (
            isinstance(self.threshold, (int, float)) and self.threshold > 0
        ):
            raise InvalidConfig(f"threshold must be positive or 'pending', got {self.threshold!r}")
        eps = self.optics_params.get("eps", SUGGEST)
        if eps != SUGGEST and not (isinstance(eps, (int, float)) and eps > 0):
            raise InvalidConfig(f"optics eps must be positive or 'suggest', got {eps!r}")
        if self.schema is not None:
            names = {entry["designation"] for entry in self.schema}
            referenced = set(self.analysis_channels)
            if self.mode:
                referenced |= {
                    self.mode.get("cooling_signal"),
                    self.mode.get("heating_signal"),
                }
                if self.mode.get("on_signal"):
                    referenced.add(self.mode["on_signal"])
            missing = sorted(c for c in referenced if c and c not in names)
            if missing:
                raise InvalidConfig(f"channels {missing} not in schema")

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {
            "dataset",
            "analysis_channels",
            "season",
            "schema",
            "mode",
            "months",
            "month_overrides",
            "iqr_signal",
            "use_pca",
            "pc_selection",
            "optics",
            "threshold",
            "kmeans",
            "truth_intervals",
            "timestamp_format",
            "utc_offset_s",
        }
        unknown = set(raw) - known
        if unknown:
            raise InvalidConfig(f"unknown config fields: {sorted(unknown)}")
        if "dataset" not in raw or "analysis_channels" not in raw:
            raise InvalidConfig("config requires 'dataset' and 'analysis_channels'")
        kwargs = dict(
            dataset=raw["dataset"],
            analysis_channels=tuple(raw["analysis_channels"]),
            season=raw.get("season", "cooling"),
            schema=tuple(raw["schema"]) if raw.get("schema") else None,
            mode=raw.get("mode"),
            months=tuple(raw["months"]) if raw.get("months") else None,
            month_overrides=raw.get("month_overrides"),
            iqr_signal=raw.get("iqr_signal", "auto"),
            use_pca=bool(raw.get("use_pca", False)),
            pc_selection=raw.get("pc_selection", {"method": "scree_gap"}),
            optics_params=raw.get("optics", {"min_pts": 15, "eps": SUGGEST}),
            threshold=raw.get("threshold", PENDING),
            kmeans_params=raw.get("kmeans", {"k": 2, "seed": 0, "restarts": 10}),
            truth_intervals=tuple(raw["truth_intervals"])
            if raw.get("truth_intervals")
            else None,
            timestamp_format=raw.get(
                "timestamp_format", dataset_io.DEFAULT_TIMESTAMP_FORMAT
            ),
            utc_offset_s=int(raw.get("utc_offset_s", 0)),
        )
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "analysis_channels": list(self.analysis_channels),
            "season": self.season,
            "schema": list(self.schema) if self.schema else None,
            "mode": self.mode,
            "months": list(self.months) if self.months else None,
            "month_overrides": self.month_overrides,
            "iqr_signal": self.iqr_signal,
            "use_pca": self.use_pca,
            "pc_selection": self.pc_selection,
            "optics": self.optics_params,
            "threshold": self.threshold,
            "kmeans": self.kmeans_params,
            "truth_intervals": list(self.truth_intervals)
            if self.truth_intervals
            else None,
            "timestamp_format": self.timestamp_format,
            "utc_offset_s": self.utc_offset_s,
        }


def dataset_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def run_id_for(config: RunConfig, digest: str) -> str:
    payload = canonical_json({"config": config.to_dict(), "dataset_sha256": digest})
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class RunRecord:
    """Persisted execution: config, intermediate artifacts, labels, metrics."""

    run_id: str
    config: RunConfig
    dataset_sha256: str
    status: str  # complete | awaiting_threshold
    row_timestamps: np.ndarray
    truth: np.ndarray | None
    cadence_s: int
    scaler: preprocessing.StandardScaler
    pca_model: pca.PcaModel
    scree: tuple[float, ...]
    pc_count: int
    pc_coords: np.ndarray
    kdist_curve: np.ndarray
    suggested_eps: float
    optics_result: optics.OpticsResult
    kmeans_result: kmeans.KmeansResult
    extraction: dict | None
    metrics: dict
    intervals: dict

    def to_dict(self) -> dict:
        opt = self.optics_result
        km = self.kmeans_result
        return {
            "run_id": self.run_id,
            "config": self.config.to_dict(),
            "dataset_sha256": self.dataset_sha256,
            "status": self.status,
            "cadence_s": self.cadence_s,
            "rows": {
                "count": int(self.row_timestamps.size),
                "timestamps": self.row_timestamps.tolist(),
                "truth": None if self.truth is None else self.truth.tolist(),
            },
            "scaler": {
                "means": self.scaler.means.tolist(),
                "stds": self.scaler.stds.tolist(),
                "kept_columns": list(self.scaler.kept_columns),
                "dropped_columns": list(self.scaler.dropped_columns),
            },
            "pca": {
                "eigenvalues": self.pca_model.eigenvalues.tolist(),
                "components": self.pca_model.components.tolist(),
                "explained_variance_ratio": self.pca_model.explained_variance_ratio.tolist(),
                "column_names": list(self.pca_model.column_names),
            },
            "scree": list(self.scree),
            "pc_count": self.pc_count,
            "pc_coords": self.pc_coords.tolist(),
            "kdist": {
                "curve": self.kdist_curve.tolist(),
                "suggested_eps": self.suggested_eps,
            },
            "optics": {
                "params": {
                    "eps": opt.params.eps,
                    "min_pts": opt.params.min_pts,
                    "start_seed": opt.params.start_seed,
                },
                "ordering": opt.ordering.tolist(),
                "reachability": [_clean_float(x) for x in opt.reachability],
                "core_distance": [_clean_float(x) for x in opt.core_distance],
                "predecessor": opt.predecessor.tolist(),
            },
            "kmeans": {
                "labels": km.labels.tolist(),
                "centroids": km.centroids.tolist(),
                "inertia": km.inertia,
                "iterations": km.iterations,
                "seed": km.seed,
            },
            "extraction": self.extraction,
            "metrics": self.metrics,
            "intervals": self.intervals,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "RunRecord":
        opt = raw["optics"]
        inf = float("inf")
        optics_result = optics.OpticsResult(
            ordering=np.array(opt["ordering"], dtype=np.int64),
            reachability=np.array(
                [inf if x is None else x for x in opt["reachability"]]
            ),
            core_distance=np.array(
                [inf if x is None else x for x in opt["core_distance"]]
            ),
            predecessor=np.array(opt["predecessor"], dtype=np.int64),
            params=optics.OpticsParams(**opt["params"]),
        )
        km = raw["kmeans"]
        kmeans_result = kmeans.KmeansResult(
            labels=np.array(km["labels"], dtype=np.int64),
            centroids=np.array(km["centroids"]),
            inertia=km["inertia"],
            iterations=km["iterations"],
            seed=km["seed"],
            inertia_history=(km["inertia"],),
        )
        sc = raw["scaler"]
        scaler = preprocessing.StandardScaler(
            means=np.array(sc["means"]),
            stds=np.array(sc["stds"]),
            kept_columns=tuple(sc["kept_columns"]),
            dropped_columns=tuple(sc["dropped_columns"]),
        )
        pc = raw["pca"]
        model = pca.PcaModel(
            eigenvalues=np.array(pc["eigenvalues"]),
            components=np.array(pc["components"]),
            explained_variance_ratio=np.array(pc["explained_variance_ratio"]),
            column_names=tuple(pc["column_names"]),
        )
        rows = raw["rows"]
        return cls(
            run_id=raw["run_id"],
            config=RunConfig.from_dict(raw["config"]),
            dataset_sha256=raw["dataset_sha256"],
            status=raw["status"],
            row_timestamps=np.array(rows["timestamps"], dtype=np.int64),
            truth=None if rows["truth"] is None else np.array(rows["truth"], dtype=np.int8),
            cadence_s=raw["cadence_s"],
            scaler=scaler,
            pca_model=model,
            scree=tuple(raw["scree"]),
            pc_count=raw["pc_count"],
            pc_coords=np.array(raw["pc_coords"]),
            kdist_curve=np.array(raw["kdist"]["curve"]),
            suggested_eps=raw["kdist"]["suggested_eps"],
            optics_result=optics_result,
            kmeans_result=kmeans_result,
            extraction=raw["extraction"],
            metrics=raw["metrics"],
            intervals=raw["intervals"],
        )


def _interval_to_dict(iv: FaultInterval, fmt: str) -> dict:
    return {
        "start": epoch_to_iso(iv.start, fmt),
        "end": epoch_to_iso(iv.end, fmt),
        "label": iv.label,
    }


def _flags_block(assignment: evaluation.FaultAssignment) -> dict:
    return {
        "flags": assignment.flags.tolist(),
        "normal_cluster": assignment.normal_cluster,
        "ambiguous_majority": assignment.ambiguous_majority,
    }


def _score(flags, truth, timestamps, cadence_s, fmt):
    metrics = None
    if truth is not None:
        counts = evaluation.confusion_counts(flags, truth)
        metrics = evaluation.classification_metrics(counts).as_dict()
        metrics["counts"] = {
            "tp": counts.tp,
            "fp": counts.fp,
            "fn": counts.fn,
            "tn": counts.tn,
        }
    ivs = evaluation.fault_intervals(flags, timestamps, cadence_s)
    return metrics, [_interval_to_dict(iv, fmt) for iv in ivs]


def extraction_block(
    result: optics.OpticsResult,
    threshold: float,
    truth,
    timestamps,
    cadence_s: int,
    fmt: str = dataset_io.DEFAULT_TIMESTAMP_FORMAT,
) -> dict:
    """Extract at a threshold and bundle labels, flags, metrics, intervals."""
    labels = optics.extract_clusters(result, threshold)
    assignment = evaluation.assign_fault_flags(labels)
    metrics, intervals = _score(
        assignment.flags, truth, timestamps, cadence_s, fmt
    )
    return {
        "algorithm": "optics",
        "threshold": float(threshold),
        "cluster_ids": labels.cluster_id.tolist(),
        "num_clusters": labels.num_clusters,
        "cluster_sizes": {str(k): v for k, v in sorted(labels.sizes().items())},
        **_flags_block(assignment),
        "metrics": metrics,
        "intervals": intervals,
    }


def execute_run(config: RunConfig, store: "RunStore", on_stage=None) -> RunRecord:
    """Run the full workflow and persist every artifact in the store.

    Deterministic for a fixed config and dataset. With threshold
    "pending" the run stops after the curves and reports
    ``awaiting_threshold`` so an analyst can extract interactively.
    """
    fmt = config.timestamp_format
    digest = dataset_digest(config.dataset)
    run_id = run_id_for(config, digest)
    store.init_run(run_id, config)

    def stage(name: str):
        store.set_status(run_id, f"running:{name}")
        if on_stage:
            on_stage(name)

    try:
        stage("load")
        schema = (
            [dataset_io.ChannelSchema(**entry) for entry in config.schema]
            if config.schema
            else None
        )
        if schema is None:
            schema = _schema_from_header(config.dataset)
        frame = dataset_io.load_frame(
            config.dataset, schema, timestamp_format=fmt, utc_offset_s=config.utc_offset_s
        )
        if config.truth_intervals:
            intervals = [
                FaultInterval(
                    start=iso_to_epoch(iv["start"], fmt),
                    end=iso_to_epoch(iv["end"], fmt),
                    label=iv.get("label", ""),
                )
                for iv in config.truth_intervals
            ]
            frame = dataset_io.apply_fault_intervals(frame, intervals)

        stage("preprocess")
        mode_config = _mode_config(config)
        if config.months:
            frame = preprocessing.select_months(frame, list(config.months))
        elif mode_config is not None:
            month_map = preprocessing.classify_months(frame, mode_config)
            if config.month_overrides:
                month_map.update(config.month_overrides)
            wanted = [m for m, mode in month_map.items() if mode == config.season]
            if not wanted:
                raise EmptyFile(f"no {config.season} months in dataset")
            frame = preprocessing.select_months(frame, wanted)
        if mode_config is not None:
            frame = preprocessing.filter_operational(frame, mode_config)
        iqr_signal = _resolve_iqr_signal(config, mode_config)
        if iqr_signal is not None:
            frame = preprocessing.iqr_filter(frame, iqr_signal)

        stage("standardize")
        matrix, mask = preprocessing.build_matrix(frame, list(config.analysis_channels))
        truth = None if frame.ground_truth is None else frame.ground_truth[mask]
        standardized, scaler = preprocessing.standardize(matrix)

        stage("pca")
        model = pca.fit_pca(standardized)
        scree = pca.scree_curve(model)
        sel = config.pc_selection
        pc_count = pca.select_pc_count(model, sel["method"], sel.get("k"))
        pc_coords = standardized.values @ model.components[:, : min(2, model.n)]
        cluster_input = (
            pca.project(model, standardized, pc_count) if config.use_pca else standardized
        )

        stage("kdist")
        min_pts = int(config.optics_params.get("min_pts", 15))
        kdist = optics.k_distance_curve(cluster_input, min_pts)
        suggested = optics.suggest_eps(kdist)
        eps_setting = config.optics_params.get("eps", SUGGEST)
        eps = suggested if eps_setting == SUGGEST else float(eps_setting)

        stage("optics")
        optics_result = optics.run_optics(
            cluster_input,
            optics.OpticsParams(
                eps=eps,
                min_pts=min_pts,
                start_seed=config.optics_params.get("start_seed"),
            ),
        )

        stage("kmeans")
        kp = config.kmeans_params
        kmeans_result = kmeans.fit_kmeans(
            cluster_input,
            k=int(kp.get("k", 2)),
            seed=int(kp.get("seed", 0)),
            restarts=int(kp.get("restarts", 10)),
        )

        extraction = None
        metrics: dict = {"optics": None, "kmeans": None}
        intervals: dict = {"optics": [], "kmeans": []}
        status = "awaiting_threshold"
        if config.threshold != PENDING:
            stage("extract")
            extraction = extraction_block(
                optics_result,
                float(config.threshold),
                truth,
                matrix.timestamps,
                frame.cadence_s,
                fmt,
            )
            stage("evaluate")
            metrics["optics"] = extraction["metrics"]
            intervals["optics"] = extraction["intervals"]
            km_sizes = np.bincount(kmeans_result.labels)
            km_normal = int(np.argmax(km_sizes))
            km_flags = (kmeans_result.labels != km_normal).astype(np.int8)
            metrics["kmeans"], intervals["kmeans"] = _score(
                km_flags, truth, matrix.timestamps, frame.cadence_s, fmt
            )
            status = "complete"

        record = RunRecord(
            run_id=run_id,
            config=config,
            dataset_sha256=digest,
            status=status,
            row_timestamps=matrix.timestamps,
            truth=truth,
            cadence_s=frame.cadence_s,
            scaler=scaler,
            pca_model=model,
            scree=tuple(scree),
            pc_count=pc_count,
            pc_coords=pc_coords,
            kdist_curve=kdist,
            suggested_eps=suggested,
            optics_result=optics_result,
            kmeans_result=kmeans_result,
            extraction=extraction,
            metrics=metrics,
            intervals=intervals,
        )
        stage("persist")
        store.save_record(record)
        store.set_status(run_id, status)
        return record
    except Exception as exc:
        store.set_status(run_id, f"failed:{type(exc).__name__}: {exc}")
        raise


def _schema_from_header(path) -> list[dataset_io.ChannelSchema]:
    import csv

    with open(path, newline="") as fh:
        header = next(csv.reader(fh), None)
    if not header:
        raise EmptyFile(f"{path}: file is empty")
    names = [h.strip() for h in header[1:]]
    if names and names[-1] == "fault":
        names = names[:-1]
    return [dataset_io.ChannelSchema(designation=n) for n in names]


def _mode_config(config: RunConfig) -> preprocessing.ModeConfig | None:
    if config.mode is None:
        return None
    raw = config.mode
    return preprocessing.ModeConfig(
        cooling_signal=raw["cooling_signal"],
        heating_signal=raw["heating_signal"],
        on_signal=raw.get("on_signal"),
        occupied_days=frozenset(raw.get("occupied_days", [0, 1, 2, 3, 4])),
        occupied_start=preprocessing.parse_time_of_day(raw.get("occupied_start", "06:00")),
        occupied_end=preprocessing.parse_time_of_day(raw.get("occupied_end", "18:00")),
    )


def _resolve_iqr_signal(config: RunConfig, mode_config) -> str | None:
    if config.iqr_signal is None:
        return None
    if config.iqr_signal != "auto":
        return config.iqr_signal
    if mode_config is None:
        return None
    return (
        mode_config.cooling_signal
        if config.season == preprocessing.COOLING
        else mode_config.heating_signal
    )


def whatif_extract(record: RunRecord, algorithm: str, threshold: float):
    """Re-extract a stored run at a new threshold; never mutates the record.

    Returns the extraction block (labels, flags, metrics when ground
    truth exists, and fault intervals).
    """
    if algorithm != "optics":
        raise InvalidConfig(f"threshold extraction applies to optics, got {algorithm!r}")
    if not isinstance(threshold, (int, float)) or not threshold > 0:
        raise NonPositiveThreshold(f"threshold must be > 0, got {threshold}")
    return extraction_block(
        record.optics_result,
        float(threshold),
        record.truth,
        record.row_timestamps,
        record.cadence_s,
        record.config.timestamp_format,
    )


class RunStore:
    """One directory per run id; single writer per run, many readers."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, run_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(run_id, threading.Lock())

    def run_dir(self, run_id: str) -> Path:
        return self.root / run_id

    def _require(self, run_id: str) -> Path:
        d = self.run_dir(run_id)
        if not d.is_dir():
            raise UnknownRun(f"no run {run_id!r} in store")
        return d

    def _write(self, path: Path, text: str):
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)

    def _write_json(self, path: Path, obj):
        self._write(path, json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n")

    def list_runs(self) -> list[dict]:
        out = []
        for d in sorted(self.root.iterdir()):
            if not d.is_dir() or not (d / "config.json").exists():
                continue
            out.append(self.summary(d.name))
        return out

    def summary(self, run_id: str) -> dict:
        d = self._require(run_id)
        config = json.loads((d / "config.json").read_text(encoding="utf-8"))
        return {
            "run_id": run_id,
            "status": self.get_status(run_id),
            "dataset": config.get("dataset"),
            "season": config.get("season"),
            "use_pca": config.get("use_pca"),
            "threshold": config.get("threshold"),
        }

    def init_run(self, run_id: str, config: RunConfig):
        with self._lock(run_id):
            d = self.run_dir(run_id)
            d.mkdir(parents=True, exist_ok=True)
            self._write_json(d / "config.json", config.to_dict())
            self._write_json(d / "status.json", {"run_id": run_id, "status": "queued"})

    def set_status(self, run_id: str, status: str):
        with self._lock(run_id):
            d = self._require(run_id)
            self._write_json(d / "status.json", {"run_id": run_id, "status": status})

    def get_status(self, run_id: str) -> str:
        d = self._require(run_id)
        try:
            return json.loads((d / "status.json").read_text(encoding="utf-8"))["status"]
        except FileNotFoundError:
            return "unknown"

    def save_record(self, record: RunRecord):
        with self._lock(record.run_id):
            d = self._require(record.run_id)
            self._write_json(d / "record.json", record.to_dict())
            self._write_reachability_csv(d, record)
            self._write_kdist_csv(d, record)
            self._write_json(d / "metrics.json", record.metrics)
            if record.extraction is not None:
                self._write_labels_locked(d, record, record.extraction)

    def load_record(self, run_id: str) -> RunRecord:
        d = self._require(run_id)
        path = d / "record.json"
        if not path.exists():
            raise RunNotReady(f"run {run_id!r} has not produced a record yet")
        return RunRecord.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def _write_reachability_csv(self, d: Path, record: RunRecord):
        opt = record.optics_result
        lines = ["position,row_index,reachability,core_distance"]
        for position in range(len(opt)):
            row = int(opt.ordering[position])
            reach = opt.reachability[position]
            core = opt.core_distance[row]
            lines.append(
                f"{position},{row},"
                f"{'' if not np.isfinite(reach) else format(reach, '.17g')},"
                f"{'' if not np.isfinite(core) else format(core, '.17g')}"
            )
        self._write(d / "reachability.csv", "\n".join(lines) + "\n")

    def _write_kdist_csv(self, d: Path, record: RunRecord):
        lines = ["index,distance"]
        for i, v in enumerate(record.kdist_curve):
            lines.append(f"{i},{format(float(v), '.17g')}")
        self._write(d / "kdist.csv", "\n".join(lines) + "\n")

    def labels_path(self, run_id: str, algorithm: str, threshold: float) -> Path:
        return self.run_dir(run_id) / f"labels-{algorithm}-{format(threshold, 'g')}.csv"

    def _write_labels_locked(self, d: Path, record: RunRecord, extraction: dict):
        path = d / (
            f"labels-{extraction['algorithm']}-{format(extraction['threshold'], 'g')}.csv"
        )
        lines = ["timestamp,cluster_id,fault_flag,is_noise"]
        fmt = record.config.timestamp_format
        for ts, cid, flag in zip(
            record.row_timestamps.tolist(),
            extraction["cluster_ids"],
            extraction["flags"],
        ):
            lines.append(
                f"{epoch_to_iso(ts, fmt)},{cid},{flag},{'true' if cid == -1 else 'false'}"
            )
        self._write(path, "\n".join(lines) + "\n")
        self._write_json(
            d / f"metrics-{extraction['algorithm']}-{format(extraction['threshold'], 'g')}.json",
            {"metrics": extraction["metrics"], "intervals": extraction["intervals"]},
        )
        return path

    def write_extraction(self, record: RunRecord, extraction: dict) -> Path:
        """Persist a what-if extraction's labels and metrics files."""
        with self._lock(record.run_id):
            d = self._require(record.run_id)
            return self._write_labels_locked(d, record, extraction)

    def append_annotation(self, run_id: str, entry: dict) -> list[dict]:
        """Append an analyst judgment; existing entries are never touched."""
        with self._lock(run_id):
            d = self._require(run_id)
            path = d / "annotations.json"
            existing = (
                json.loads(path.read_text(encoding="utf-8")) if path.exists() else []
            )
            stamped = dict(entry)
            stamped.setdefault("time", epoch_to_iso(int(time.time())))
            existing.append(stamped)
            self._write_json(path, existing)
            return existing

    def annotations(self, run_id: str) -> list[dict]:
        d = self._require(run_id)
        path = d / "annotations.json"
        return json.loads(path.read_text(encoding="utf-8")) if path.exists() else []
