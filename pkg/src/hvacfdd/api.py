"""JSON-over-HTTP service backing the interactive threshold console.

Run execution is asynchronous: POST /api/runs answers 202 immediately
and the caller polls GET /api/runs/{id} until the status reaches
``complete`` or ``awaiting_threshold``. Extraction what-ifs are
lock-free reads of the immutable record; annotation writes serialize
per run id inside the store.

Error bodies are ``{"code": <stable machine code>, "message": <human>}``:
400 invalid body, 404 unknown run, 409 run still executing (or failed),
422 invalid threshold.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from fastapi import Body, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import dataset_io, pca
from .errors import DataError, HvacFddError, InvalidConfig, UnknownRun
from .pipeline import RunConfig, RunRecord, RunStore, execute_run, whatif_extract

MAX_POINTS_PER_CHANNEL = 5000


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def decimate_minmax(timestamps: np.ndarray, values: np.ndarray, max_points: int):
    """Bucketed min/max decimation: keeps each bucket's extremes in time
    order, so the global minimum and maximum of the window always survive."""
    ok = ~np.isnan(values)
    timestamps, values = timestamps[ok], values[ok]
    n = timestamps.size
    if n <= max_points:
        return timestamps, values
    n_buckets = max_points // 2
    edges = np.linspace(0, n, n_buckets + 1).astype(int)
    keep: list[int] = []
    for b in range(n_buckets):
        lo, hi = int(edges[b]), int(edges[b + 1])
        if lo >= hi:
            continue
        seg = values[lo:hi]
        keep.append(lo + int(np.argmin(seg)))
        keep.append(lo + int(np.argmax(seg)))
    idx = np.unique(np.array(keep, dtype=np.int64))
    return timestamps[idx], values[idx]


def _status_parts(status: str) -> dict:
    if status.startswith("running:"):
        return {"state": "running", "stage": status.split(":", 1)[1], "error": None}
    if status.startswith("failed:"):
        return {"state": "failed", "stage": None, "error": status.split(":", 1)[1]}
    return {"state": status, "stage": None, "error": None}


def create_app(store: RunStore) -> FastAPI:
    app = FastAPI(title="hvacfdd", version="0.1.0")
    app.state.store = store
    app.state.executor = ThreadPoolExecutor(max_workers=os.cpu_count() or 2)
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"http://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return _error_response(400, "invalid_body", str(exc))

    @app.exception_handler(HvacFddError)
    async def _domain_error(_req: Request, exc: HvacFddError):
        if isinstance(exc, UnknownRun):
            return _error_response(404, "unknown_run", str(exc))
        if isinstance(exc, DataError):
            return _error_response(400, "invalid_body", str(exc))
        return _error_response(500, "internal_error", str(exc))

    def _ready_record(run_id: str) -> RunRecord:
        status = store.get_status(run_id)  # raises UnknownRun
        parts = _status_parts(status)
        if parts["state"] in ("queued", "running"):
            raise ApiError(409, "run_executing", f"run {run_id} is still executing")
        if parts["state"] == "failed":
            raise ApiError(409, "run_failed", f"run {run_id} failed: {parts['error']}")
        return store.load_record(run_id)

    @app.get("/api/runs")
    def list_runs():
        return {"runs": store.list_runs()}

    @app.post("/api/runs", status_code=202)
    def submit_run(payload: dict = Body(...)):
        try:
            config = RunConfig.from_dict(payload)
        except (InvalidConfig, KeyError, TypeError, ValueError) as exc:
            raise ApiError(400, "invalid_config", f"bad run config: {exc}") from exc
        if not os.path.exists(config.dataset):
            raise ApiError(400, "invalid_config", f"dataset not found: {config.dataset}")
        from .pipeline import dataset_digest, run_id_for

        run_id = run_id_for(config, dataset_digest(config.dataset))
        try:
            state = _status_parts(store.get_status(run_id))["state"]
        except UnknownRun:
            state = None
        if state in ("complete", "awaiting_threshold", "queued", "running"):
            # content-addressed: identical inputs, identical artifacts
            return {"run_id": run_id}
        store.init_run(run_id, config)

        def job():
            try:
                execute_run(config, store)
            except Exception:  # status already records the failure
                pass

        app.state.executor.submit(job)
        return {"run_id": run_id}

    @app.get("/api/runs/{run_id}")
    def run_status(run_id: str):
        status = store.get_status(run_id)
        return {"run_id": run_id, "status": status, **_status_parts(status)}

    @app.get("/api/runs/{run_id}/reachability")
    def reachability(run_id: str):
        record = _ready_record(run_id)
        opt = record.optics_result
        clean = lambda arr: [None if not np.isfinite(x) else float(x) for x in arr]  # noqa: E731
        return {
            "run_id": run_id,
            "ordering": opt.ordering.tolist(),
            "reachability": clean(opt.reachability),
            "core_distance": clean(opt.core_distance),
            "params": {"eps": opt.params.eps, "min_pts": opt.params.min_pts},
        }

    @app.get("/api/runs/{run_id}/kdist")
    def kdist(run_id: str):
        record = _ready_record(run_id)
        return {
            "run_id": run_id,
            "curve": record.kdist_curve.tolist(),
            "suggested_eps": float(record.suggested_eps),
        }

    @app.post("/api/runs/{run_id}/extract")
    def extract(run_id: str, payload: dict = Body(...)):
        record = _ready_record(run_id)
        threshold = payload.get("threshold")
        if not isinstance(threshold, (int, float)) or isinstance(threshold, bool) or not threshold > 0:
            raise ApiError(422, "invalid_threshold", f"threshold must be > 0, got {threshold!r}")
        extraction = whatif_extract(record, "optics", float(threshold))
        store.write_extraction(record, extraction)
        return {"run_id": run_id, **extraction}

    @app.get("/api/runs/{run_id}/timeseries")
    def timeseries(
        run_id: str,
        channels: str,
        t_from: str | None = Query(None, alias="from"),
        t_to: str | None = Query(None, alias="to"),
    ):
        return _timeseries_impl(run_id, channels, t_from, t_to)

    def _timeseries_impl(run_id: str, channels: str, t_from: str | None, t_to: str | None):
        record = _ready_record(run_id)
        config = record.config
        if not os.path.exists(config.dataset):
            raise ApiError(409, "dataset_missing", f"dataset not found: {config.dataset}")
        from .pipeline import _schema_from_header

        schema = (
            [dataset_io.ChannelSchema(**e) for e in config.schema]
            if config.schema
            else _schema_from_header(config.dataset)
        )
        frame = dataset_io.load_frame(
            config.dataset,
            schema,
            timestamp_format=config.timestamp_format,
            utc_offset_s=config.utc_offset_s,
        )
        names = [c for c in channels.split(",") if c]
        unknown = [c for c in names if c not in frame.channels]
        if unknown:
            raise ApiError(400, "unknown_channel", f"channels not in dataset: {unknown}")
        lo = dataset_io.iso_to_epoch(t_from, config.timestamp_format) if t_from else None
        hi = dataset_io.iso_to_epoch(t_to, config.timestamp_format) if t_to else None
        mask = np.ones(len(frame), dtype=bool)
        if lo is not None:
            mask &= frame.timestamps >= lo
        if hi is not None:
            mask &= frame.timestamps <= hi
        out = {}
        for name in names:
            ts, vs = decimate_minmax(
                frame.timestamps[mask], frame.channels[name][mask], MAX_POINTS_PER_CHANNEL
            )
            out[name] = {
                "timestamps": [dataset_io.epoch_to_iso(t, config.timestamp_format) for t in ts.tolist()],
                "values": vs.tolist(),
            }
        return {"run_id": run_id, "channels": out}

    @app.get("/api/runs/{run_id}/pca")
    def pca_report(run_id: str):
        record = _ready_record(run_id)
        report = pca.loadings_report(record.pca_model)
        return {
            "run_id": run_id,
            "eigenvalues": record.pca_model.eigenvalues.tolist(),
            "explained_variance_ratio": record.pca_model.explained_variance_ratio.tolist(),
            "pc_count": record.pc_count,
            "loadings": {name: list(w) for name, w in report.weights.items()},
            "correlation_classes": [
                {"a": a, "b": b, "class": cls, "weak": weak}
                for a, b, cls, weak in report.pairs
            ],
        }

    @app.put("/api/runs/{run_id}/annotations")
    def put_annotations(run_id: str, payload: dict = Body(...)):
        store.get_status(run_id)  # 404 for unknown runs
        threshold = payload.get("threshold")
        if not isinstance(threshold, (int, float)) or isinstance(threshold, bool) or not threshold > 0:
            raise ApiError(422, "invalid_threshold", f"threshold must be > 0, got {threshold!r}")
        verdicts = payload.get("verdicts", {})
        if not isinstance(verdicts, dict) or not all(
            v in ("normal", "fault") for v in verdicts.values()
        ):
            raise ApiError(400, "invalid_body", "verdicts must map cluster ids to normal|fault")
        entry = {
            "threshold": float(threshold),
            "verdicts": {str(k): v for k, v in verdicts.items()},
            "note": str(payload.get("note", "")),
            "author": str(payload.get("author", "")),
        }
        annotations = store.append_annotation(run_id, entry)
        return {"run_id": run_id, "annotations": annotations}

    @app.get("/api/runs/{run_id}/annotations")
    def get_annotations(run_id: str):
        store.get_status(run_id)
        return {"run_id": run_id, "annotations": store.annotations(run_id)}

    return app
