"""Benchmark harness for the public labeled fan-coil dataset.

Runs the five labeled fault scenarios from cases.json against a local
export of the dataset, once with projection and once without, and
prints a metrics row per configuration. The dataset itself is an
external download; this script is not part of the test gate and exits
quietly when no data file is supplied.

Thresholds were chosen per case by eye on the reachability plot in the
original study and are not published for these scenarios, so the
default here cuts at the largest gap in the sorted finite reachability
values and prints the value used; pass --threshold to override.

Example:

    python integration/run_benchmark.py --data fcu_2018.csv \
        --cooling-signal CLG_COIL_VLV --heating-signal HTG_COIL_VLV \
        --on-signal SF_STATUS
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from hvacfdd import optics
from hvacfdd.evaluation import format_metric
from hvacfdd.pipeline import RunConfig, RunStore, execute_run, whatif_extract


def build_config(args, case: dict, defaults: dict, use_pca: bool) -> RunConfig:
    raw = {
        "dataset": args.data,
        "analysis_channels": args.channels,
        "season": case["season"],
        "months": case["months"],
        "mode": {
            "cooling_signal": args.cooling_signal,
            "heating_signal": args.heating_signal,
            "on_signal": args.on_signal,
            "occupied_days": [0, 1, 2, 3, 4],
            "occupied_start": "06:00",
            "occupied_end": "18:00",
        },
        "iqr_signal": "auto",
        "use_pca": use_pca,
        "pc_selection": {"method": "manual", "k": defaults["pc_count"]},
        "optics": {"min_pts": defaults["min_pts"], "eps": defaults["eps"]},
        "threshold": "pending",
        "kmeans": defaults["kmeans"],
        "truth_intervals": case["intervals"],
    }
    return RunConfig.from_dict(raw)


def metrics_line(metrics: dict | None) -> str:
    if metrics is None:
        return "no ground truth"
    cells = [
        format_metric(float("nan") if metrics[k] is None else metrics[k])
        for k in ("precision", "recall", "f1", "accuracy")
    ]
    c = metrics["counts"]
    return (
        f"TP={c['tp']:6d} FP={c['fp']:6d} FN={c['fn']:6d} TN={c['tn']:6d}  "
        + " ".join(cells)
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--data", help="CSV export of the labeled dataset")
    parser.add_argument("--store", default="runs-benchmark")
    parser.add_argument("--case", help="run a single case by name substring")
    parser.add_argument("--threshold", type=float, help="override the automatic cut")
    parser.add_argument("--channels", help="comma-separated analysis channels; default: all")
    parser.add_argument("--cooling-signal", default="CLG-O")
    parser.add_argument("--heating-signal", default="HTG-O")
    parser.add_argument("--on-signal", default=None)
    args = parser.parse_args()

    if not args.data or not Path(args.data).exists():
        print("no dataset supplied (use --data <csv>); nothing to do")
        return 0

    spec = json.loads((Path(__file__).parent / "cases.json").read_text(encoding="utf-8"))
    defaults = spec["defaults"]
    if args.channels:
        args.channels = [c.strip() for c in args.channels.split(",") if c.strip()]
    else:
        import csv

        with open(args.data, newline="") as fh:
            header = next(csv.reader(fh))
        names = [h.strip() for h in header[1:]]
        if names and names[-1] == "fault":
            names = names[:-1]
        args.channels = names

    store = RunStore(args.store)
    for case in spec["cases"]:
        if args.case and args.case not in case["name"]:
            continue
        print(f"\n== {case['name']} ({case['season']}, months {', '.join(case['months'])})")
        for use_pca in (True, False):
            variant = f"pcs={defaults['pc_count']}" if use_pca else "raw"
            config = build_config(args, case, defaults, use_pca)
            record = execute_run(config, store)
            if args.threshold is not None:
                threshold = args.threshold
            else:
                reach = record.optics_result.reachability
                finite = np.sort(reach[np.isfinite(reach)])
                threshold = optics.suggest_eps(finite)
            extraction = whatif_extract(record, "optics", threshold)
            store.write_extraction(record, extraction)
            print(f"  [{variant:6s}] run {record.run_id}  threshold {threshold:.3f}")
            print(f"    optics  {metrics_line(extraction['metrics'])}")
            km = record.metrics.get("kmeans")
            if km is None:
                # pending-threshold runs skip the baseline scoring; score now
                labels = np.array(record.kmeans_result.labels)
                flags = (labels != np.argmax(np.bincount(labels))).astype(np.int8)
                from hvacfdd.evaluation import classification_metrics, confusion_counts

                counts = confusion_counts(flags, record.truth)
                row = classification_metrics(counts)
                km = row.as_dict()
                km["counts"] = {
                    "tp": counts.tp,
                    "fp": counts.fp,
                    "fn": counts.fn,
                    "tn": counts.tn,
                }
            print(f"    k-means {metrics_line(km)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
