import json
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from hvacfdd.api import create_app, decimate_minmax
from hvacfdd.pipeline import RunStore
from hvacfdd.synthetic import TEN_CHANNELS

import numpy as np

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "schemas"


def _registry():
    resources = []
    for path in SCHEMA_DIR.glob("*.schema.json"):
        schema = json.loads(path.read_text(encoding="utf-8"))
        resources.append((path.name, Resource.from_contents(schema)))
        resources.append((schema["$id"], Resource.from_contents(schema)))
    return Registry().with_resources(resources)


REGISTRY = _registry()


def validate(payload, schema_name):
    schema = json.loads((SCHEMA_DIR / schema_name).read_text(encoding="utf-8"))
    Draft202012Validator(schema, registry=REGISTRY).validate(payload)


@pytest.fixture(scope="module")
def api_env(tmp_path_factory, synthetic_csv_api):
    store = RunStore(tmp_path_factory.mktemp("api-store"))
    app = create_app(store)
    client = TestClient(app)
    config = {
        "dataset": str(synthetic_csv_api),
        "analysis_channels": list(TEN_CHANNELS),
        "season": "cooling",
        "mode": None,
        "iqr_signal": None,
        "use_pca": False,
        "optics": {"min_pts": 15, "eps": "suggest"},
        "threshold": 3.0,
        "kmeans": {"k": 2, "seed": 0, "restarts": 10},
    }
    response = client.post("/api/runs", json=config)
    assert response.status_code == 202
    run_id = response.json()["run_id"]
    deadline = time.time() + 60
    while time.time() < deadline:
        state = client.get(f"/api/runs/{run_id}").json()["state"]
        if state in ("complete", "failed"):
            break
        time.sleep(0.05)
    assert state == "complete"
    return client, store, run_id, config


@pytest.fixture(scope="module")
def synthetic_csv_api(tmp_path_factory):
    from hvacfdd.dataset_io import save_frame
    from hvacfdd.synthetic import make_synthetic_frame

    path = tmp_path_factory.mktemp("api-data") / "synthetic.csv"
    save_frame(make_synthetic_frame(seed=7), path)
    return path


def test_submit_and_status_schemas(api_env):
    client, _, run_id, config = api_env
    response = client.post("/api/runs", json=config)
    assert response.status_code == 202
    validate(response.json(), "run_submitted.schema.json")
    assert response.json()["run_id"] == run_id  # content-addressed: same id

    status = client.get(f"/api/runs/{run_id}")
    assert status.status_code == 200
    validate(status.json(), "run_status.schema.json")

    listing = client.get("/api/runs")
    assert listing.status_code == 200
    validate(listing.json(), "run_list.schema.json")
    assert any(r["run_id"] == run_id for r in listing.json()["runs"])


def test_reachability_and_kdist_schemas(api_env):
    client, _, run_id, _ = api_env
    r = client.get(f"/api/runs/{run_id}/reachability")
    assert r.status_code == 200
    body = r.json()
    validate(body, "reachability.schema.json")
    assert body["reachability"][0] is None  # run start is undefined
    assert len(body["ordering"]) == 2000

    k = client.get(f"/api/runs/{run_id}/kdist")
    assert k.status_code == 200
    validate(k.json(), "kdist.schema.json")
    curve = k.json()["curve"]
    assert all(a <= b for a, b in zip(curve, curve[1:]))


def test_extract_schema_and_validation(api_env):
    client, _, run_id, _ = api_env
    r = client.post(f"/api/runs/{run_id}/extract", json={"threshold": 3.0})
    assert r.status_code == 200
    validate(r.json(), "extract.schema.json")
    assert r.json()["metrics"]["recall"] == 1.0

    bad = client.post(f"/api/runs/{run_id}/extract", json={"threshold": 0})
    assert bad.status_code == 422
    validate(bad.json(), "error.schema.json")
    assert bad.json()["code"] == "invalid_threshold"

    missing = client.post(f"/api/runs/{run_id}/extract", json={})
    assert missing.status_code == 422


def test_extract_purity_two_calls_identical(api_env):
    client, _, run_id, _ = api_env
    a = client.post(f"/api/runs/{run_id}/extract", json={"threshold": 2.5}).json()
    b = client.post(f"/api/runs/{run_id}/extract", json={"threshold": 2.5}).json()
    assert a == b


def test_timeseries_schema_and_minmax_preserved(api_env, synthetic_csv_api):
    client, _, run_id, _ = api_env
    r = client.get(
        f"/api/runs/{run_id}/timeseries",
        params={"channels": "T,DA-T", "from": "2020-06-01T00:00:00", "to": "2020-06-01T12:00:00"},
    )
    assert r.status_code == 200
    validate(r.json(), "timeseries.schema.json")

    from hvacfdd.dataset_io import iso_to_epoch, load_frame
    from hvacfdd.pipeline import _schema_from_header

    frame = load_frame(synthetic_csv_api, _schema_from_header(synthetic_csv_api))
    lo, hi = iso_to_epoch("2020-06-01T00:00:00"), iso_to_epoch("2020-06-01T12:00:00")
    window = (frame.timestamps >= lo) & (frame.timestamps <= hi)
    for name in ("T", "DA-T"):
        values = r.json()["channels"][name]["values"]
        truth = frame.channels[name][window]
        assert min(values) == pytest.approx(float(np.nanmin(truth)))
        assert max(values) == pytest.approx(float(np.nanmax(truth)))

    bad = client.get(f"/api/runs/{run_id}/timeseries", params={"channels": "NOPE"})
    assert bad.status_code == 400


def test_decimation_bounds(rng):
    ts = np.arange(50000, dtype=np.int64)
    vs = rng.standard_normal(50000)
    dts, dvs = decimate_minmax(ts, vs, 5000)
    assert dts.size <= 5000
    assert float(dvs.min()) == float(vs.min())
    assert float(dvs.max()) == float(vs.max())
    assert np.all(np.diff(dts) > 0)


def test_pca_schema_and_classes(api_env):
    client, _, run_id, _ = api_env
    r = client.get(f"/api/runs/{run_id}/pca")
    assert r.status_code == 200
    body = r.json()
    validate(body, "pca.schema.json")
    n = len(TEN_CHANNELS)
    assert len(body["correlation_classes"]) == n * (n - 1) // 2


def test_annotations_roundtrip_schema(api_env):
    client, store, run_id, _ = api_env
    before = client.get(f"/api/runs/{run_id}").json()
    put = client.put(
        f"/api/runs/{run_id}/annotations",
        json={"threshold": 3.0, "verdicts": {"1": "fault"}, "note": "starved coil", "author": "cem"},
    )
    assert put.status_code == 200
    validate(put.json(), "annotations.schema.json")

    got = client.get(f"/api/runs/{run_id}/annotations")
    assert got.status_code == 200
    validate(got.json(), "annotations.schema.json")
    assert got.json()["annotations"][-1]["note"] == "starved coil"
    # earlier record fields unchanged
    after = client.get(f"/api/runs/{run_id}").json()
    assert after == before

    bad = client.put(
        f"/api/runs/{run_id}/annotations",
        json={"threshold": 3.0, "verdicts": {"1": "maybe"}},
    )
    assert bad.status_code == 400


def test_unknown_run_404(api_env):
    client, _, _, _ = api_env
    for path in ("", "/reachability", "/kdist", "/pca"):
        r = client.get(f"/api/runs/ffffffffffffffff{path}")
        assert r.status_code == 404, path
        validate(r.json(), "error.schema.json")


def test_executing_run_conflicts(api_env, tmp_path, synthetic_csv_api):
    client, store, _, config = api_env
    # simulate an in-flight run: init only, no record yet
    from hvacfdd.pipeline import RunConfig, dataset_digest, run_id_for

    cfg = RunConfig.from_dict({**config, "threshold": 1.23})
    rid = run_id_for(cfg, dataset_digest(cfg.dataset))
    store.init_run(rid, cfg)
    for path in ("/reachability", "/kdist", "/pca"):
        r = client.get(f"/api/runs/{rid}{path}")
        assert r.status_code == 409, path
        assert r.json()["code"] == "run_executing"
    r = client.post(f"/api/runs/{rid}/extract", json={"threshold": 1.0})
    assert r.status_code == 409


def test_invalid_config_400(api_env):
    client, _, _, config = api_env
    r = client.post("/api/runs", json={**config, "season": "spring"})
    assert r.status_code == 400
    validate(r.json(), "error.schema.json")
    r = client.post("/api/runs", json={**config, "dataset": "/nope.csv"})
    assert r.status_code == 400
