"""Shared fixtures and the acceptance-criteria summary reporter."""

from __future__ import annotations

from collections import defaultdict

import numpy as np
import pytest

from hvacfdd import synthetic
from hvacfdd.dataset_io import save_frame

ACCEPTANCE_CRITERIA = {
    "c01": "metric-table reproduction (published benchmark rows, +/-0.001)",
    "c02": "hand-traced ordering/reachability/extraction oracle",
    "c03": "threshold extraction matches flat density clustering on core points",
    "c04": "PCA algebra (orthonormality, trace, residuals, reconstruction, shuffle)",
    "c05": "loadings correlation-rule fixture (direct/inverse/none)",
    "c06": "synthetic end-to-end fault detection (P,R >= 0.95)",
    "c07": "k-means determinism, monotone inertia, accuracy >= 0.95",
    "c08": "k-distance curve, eps suggestion, monotone extraction",
    "c09": "CLI and HTTP extraction produce byte-identical label CSVs",
}

_results: dict[str, list] = defaultdict(list)


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    for key in ACCEPTANCE_CRITERIA:
        if f"test_{key}" in name:
            _results[key].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key, description in ACCEPTANCE_CRITERIA.items():
        outcomes = _results.get(key)
        if not outcomes:
            status = "NOT RUN"
        elif all(outcomes):
            status = "PASS"
        else:
            status = f"FAIL ({outcomes.count(False)}/{len(outcomes)} cases)"
        terminalreporter.write_line(f"{key} {status:8s} {description}")


@pytest.fixture(scope="session")
def synthetic_frame():
    return synthetic.make_synthetic_frame(seed=7)


@pytest.fixture(scope="session")
def synthetic_csv(tmp_path_factory, synthetic_frame):
    path = tmp_path_factory.mktemp("data") / "synthetic.csv"
    save_frame(synthetic_frame, path)
    return path


@pytest.fixture()
def rng():
    return np.random.default_rng(20240612)
