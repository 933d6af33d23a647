"""Command-line front door.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
Error messages go to standard error; results to standard out.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dataset_io, evaluation, plots
from .errors import DataError, HvacFddError
from .pipeline import RunConfig, RunStore, execute_run, whatif_extract

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="hvacfdd", description="HVAC terminal-unit fault detection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a dataset and print a summary")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", help="JSON list of channel entries; default from header")
    p.add_argument("--timestamp-format", default=dataset_io.DEFAULT_TIMESTAMP_FORMAT)

    p = sub.add_parser("run", help="execute a run from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--store", default="runs")

    p = sub.add_parser("extract", help="extract clusters from a stored run")
    p.add_argument("--run", required=True)
    p.add_argument("--threshold", required=True, type=float)
    p.add_argument("--store", default="runs")

    p = sub.add_parser("kdist", help="print the k-distance curve and suggested eps")
    p.add_argument("--run", required=True)
    p.add_argument("--store", default="runs")

    p = sub.add_parser("report", help="emit SVG plots for a stored run")
    p.add_argument("--run", required=True)
    p.add_argument("--store", default="runs")
    p.add_argument("--out", help="output directory; default: the run directory")

    p = sub.add_parser("eval", help="metrics from counts or label files")
    p.add_argument("--counts", help="TP,FP,FN,TN")
    p.add_argument("--labels", help="exported label CSV with predictions")
    p.add_argument("--truth", help="exported label CSV with ground truth")

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--store", default="runs")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8800)
    return parser


def _load_schema(args) -> list[dataset_io.ChannelSchema] | None:
    if not args.schema:
        return None
    entries = json.loads(Path(args.schema).read_text(encoding="utf-8"))
    return [dataset_io.ChannelSchema(**entry) for entry in entries]


def _cmd_ingest(args) -> int:
    schema = _load_schema(args)
    if schema is None:
        from .pipeline import _schema_from_header

        schema = _schema_from_header(args.data)
    frame = dataset_io.load_frame(args.data, schema, timestamp_format=args.timestamp_format)
    print(f"rows: {len(frame)}")
    print(f"cadence_s: {frame.cadence_s}")
    print(f"ground_truth: {'yes' if frame.ground_truth is not None else 'no'}")
    print(f"span: {dataset_io.epoch_to_iso(frame.timestamps[0])} .. "
          f"{dataset_io.epoch_to_iso(frame.timestamps[-1])}")
    for ch in frame.schema:
        missing = int(np.isnan(frame.channels[ch.designation]).sum())
        print(f"channel {ch.designation}: kind={ch.kind} missing={missing}")
    return EXIT_OK


def _cmd_run(args) -> int:
    raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    config = RunConfig.from_dict(raw)
    store = RunStore(args.store)
    record = execute_run(config, store)
    print(record.run_id)
    return EXIT_OK


def _cmd_extract(args) -> int:
    store = RunStore(args.store)
    record = store.load_record(args.run)
    extraction = whatif_extract(record, "optics", args.threshold)
    path = store.write_extraction(record, extraction)
    print(f"labels: {path}")
    print(f"clusters: {extraction['num_clusters']}  sizes: {extraction['cluster_sizes']}")
    if extraction["metrics"] is not None:
        m = extraction["metrics"]
        line = " ".join(
            evaluation.format_metric(float("nan") if m[k] is None else m[k])
            for k in ("precision", "recall", "f1", "accuracy")
        )
        print(f"metrics: {line}")
    return EXIT_OK


def _cmd_kdist(args) -> int:
    store = RunStore(args.store)
    record = store.load_record(args.run)
    print(f"suggested_eps: {record.suggested_eps:.17g}")
    for v in record.kdist_curve:
        print(format(float(v), ".17g"))
    return EXIT_OK


def _cmd_report(args) -> int:
    store = RunStore(args.store)
    record = store.load_record(args.run)
    out_dir = Path(args.out) if args.out else store.run_dir(args.run)
    out_dir.mkdir(parents=True, exist_ok=True)
    frame = None
    dataset = Path(record.config.dataset)
    if dataset.exists():
        from .pipeline import _schema_from_header

        schema = (
            [dataset_io.ChannelSchema(**e) for e in record.config.schema]
            if record.config.schema
            else _schema_from_header(dataset)
        )
        frame = dataset_io.load_frame(
            dataset,
            schema,
            timestamp_format=record.config.timestamp_format,
            utc_offset_s=record.config.utc_offset_s,
        )
    for name, svg in plots.report_svgs(record, frame).items():
        (out_dir / name).write_text(svg, encoding="utf-8")
        print(out_dir / name)
    return EXIT_OK


def _cmd_eval(args) -> int:
    if bool(args.counts) == bool(args.labels):
        raise _UsageError("eval needs exactly one of --counts or --labels/--truth")
    if args.counts:
        parts = args.counts.split(",")
        if len(parts) != 4:
            raise _UsageError("--counts expects TP,FP,FN,TN")
        tp, fp, fn, tn = (int(p) for p in parts)
        counts = evaluation.ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)
    else:
        if not args.truth:
            raise _UsageError("--labels requires --truth")
        _, _, pred = dataset_io.load_labels(args.labels)
        _, _, truth = dataset_io.load_labels(args.truth)
        counts = evaluation.confusion_counts(pred, truth)
    row = evaluation.classification_metrics(counts)
    print(
        " ".join(
            evaluation.format_metric(v)
            for v in (row.precision, row.recall, row.f1, row.accuracy)
        )
    )
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(RunStore(args.store))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


_COMMANDS = {
    "ingest": _cmd_ingest,
    "run": _cmd_run,
    "extract": _cmd_extract,
    "kdist": _cmd_kdist,
    "report": _cmd_report,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
}


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except HvacFddError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main():
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
