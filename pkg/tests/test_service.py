"""HTTP contract: model registry, evaluation, pump endpoints, concurrency."""

import concurrent.futures
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from podirom import pipeline, pod
from podirom.service import create_app
from podirom.snapshots import generate_multi_field_set

from conftest import linear_manifold_specs


@pytest.fixture(scope="module")
def saved_model(tmp_path_factory):
    root = tmp_path_factory.mktemp("models")
    sset, evaluators = generate_multi_field_set(linear_manifold_specs(n_dof=200))
    model = pipeline.train(sset, energy_threshold=0.99, parameter_range=[[3.0, 5.0]])
    path = root / "demo.podi"
    pipeline.save_model(model, path)
    free_model = pipeline.train(sset, energy_threshold=0.99)
    free_path = root / "free.podi"
    pipeline.save_model(free_model, free_path)
    return {
        "dir": root,
        "path": path,
        "free_path": free_path,
        "model": model,
        "sset": sset,
        "evaluators": evaluators,
    }


@pytest.fixture()
def client(saved_model):
    app = create_app(model_dir=None)
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def loaded(client, saved_model):
    response = client.post(
        "/models", json={"path": str(saved_model["path"]), "id": "demo"}
    )
    assert response.status_code == 201
    return client


def test_health_counts_models(client, saved_model):
    assert client.get("/health").json() == {"status": "ok", "models": 0}
    client.post("/models", json={"path": str(saved_model["path"]), "id": "m"})
    assert client.get("/health").json() == {"status": "ok", "models": 1}


def test_startup_scan_loads_models(saved_model):
    app = create_app(model_dir=str(saved_model["dir"]))
    with TestClient(app) as c:
        assert c.get("/health").json()["models"] == 2


def test_metadata_reflects_training(loaded, saved_model):
    body = loaded.get("/models/demo").json()
    model = saved_model["model"]
    assert body["n_snapshots"] == model.n_snapshots
    assert body["parameter_dim"] == 1
    assert body["parameter_range"] == [[3.0, 5.0]]
    assert body["training_bounds"] == [[3.0, 5.0]]
    for label, rom in model.fields.items():
        assert body["fields"][label] == {"n_dof": rom.n_dof, "rank": rom.rank}


def test_duplicate_id_conflict(loaded, saved_model):
    response = loaded.post(
        "/models", json={"path": str(saved_model["path"]), "id": "demo"}
    )
    assert response.status_code == 409
    assert response.json()["reason"] == "duplicate_id"


def test_unknown_model_404(client):
    assert client.get("/models/ghost").status_code == 404
    response = client.post(
        "/models/ghost/evaluate", json={"field": "p", "parameter": [4.0]}
    )
    assert response.status_code == 404


def test_corrupt_upload_rejected(client, tmp_path):
    bad = tmp_path / "bad.podi"
    bad.write_bytes(b"PODI" + b"\x00" * 32)
    response = client.post("/models", json={"path": str(bad)})
    assert response.status_code == 400
    assert response.json()["reason"] in ("corrupt_model", "version_mismatch")


def test_octet_stream_upload(client, saved_model):
    raw = saved_model["path"].read_bytes()
    response = client.post(
        "/models?id=uploaded",
        content=raw,
        headers={"content-type": "application/octet-stream"},
    )
    assert response.status_code == 201
    assert response.json()["id"] == "uploaded"
    assert client.get("/models/uploaded").status_code == 200


def test_evaluate_training_parameter_stats(loaded, saved_model):
    sset = saved_model["sset"]
    point = [float(sset.parameter_table[3, 0])]
    body = loaded.post(
        "/models/demo/evaluate", json={"field": "p", "parameter": point}
    ).json()
    snapshot = sset.fields["p"].data[:, 3]
    assert body["extrapolated"] is False
    assert body["values"] is None
    assert body["stats"]["min"] == pytest.approx(snapshot.min(), rel=1e-6)
    assert body["stats"]["max"] == pytest.approx(snapshot.max(), rel=1e-6)
    assert body["stats"]["mean"] == pytest.approx(snapshot.mean(), rel=1e-6, abs=1e-9)


def test_evaluate_midpoint_matches_oracle(loaded, saved_model):
    exact = saved_model["evaluators"]["wss"]([4.0])
    body = loaded.post(
        "/models/demo/evaluate", json={"field": "wss", "parameter": [4.0], "stride": 1}
    ).json()
    rec = np.array(body["values"])
    assert pod.relative_error_l2(exact, rec) < 1.0


def test_stats_invariant_under_stride(loaded):
    request = {"field": "p", "parameter": [3.7]}
    plain = loaded.post("/models/demo/evaluate", json=request).json()
    for stride in (1, 3, 7, 50):
        strided = loaded.post(
            "/models/demo/evaluate", json={**request, "stride": stride}
        ).json()
        assert strided["stats"] == plain["stats"]
        n_dof = 200
        assert len(strided["values"]) == -(-n_dof // stride)


def test_evaluate_dimension_mismatch_422(loaded):
    response = loaded.post(
        "/models/demo/evaluate", json={"field": "p", "parameter": [4.0, 2.0]}
    )
    assert response.status_code == 422
    assert response.json()["reason"] == "dimension_mismatch"


def test_evaluate_unknown_field_404(loaded):
    response = loaded.post(
        "/models/demo/evaluate", json={"field": "nope", "parameter": [4.0]}
    )
    assert response.status_code == 404
    assert response.json()["reason"] == "unknown_field"


def test_declared_range_enforced_422(loaded):
    response = loaded.post(
        "/models/demo/evaluate", json={"field": "p", "parameter": [5.5]}
    )
    assert response.status_code == 422
    body = response.json()
    assert body["reason"] == "parameter_out_of_range"
    assert body["low"] == [3.0] and body["high"] == [5.0]


def test_extrapolation_flagged_without_declared_range(client, saved_model):
    client.post("/models", json={"path": str(saved_model["free_path"]), "id": "free"})
    body = client.post(
        "/models/free/evaluate", json={"field": "p", "parameter": [5.5]}
    ).json()
    assert body["extrapolated"] is True


def test_identical_requests_byte_identical(loaded):
    request = {"field": "ux", "parameter": [4.3], "stride": 2}
    first = loaded.post("/models/demo/evaluate", json=request)
    second = loaded.post("/models/demo/evaluate", json=request)
    assert first.content == second.content


def test_concurrent_requests_match_sequential(loaded):
    requests = [
        {"field": field, "parameter": [3.0 + 0.02 * i]}
        for i, field in zip(range(100), ["p", "wss", "ux"] * 34)
    ]
    sequential = [
        loaded.post("/models/demo/evaluate", json=r).content for r in requests
    ]
    with concurrent.futures.ThreadPoolExecutor(max_workers=16) as pool:
        concurrent_results = list(
            pool.map(lambda r: loaded.post("/models/demo/evaluate", json=r).content, requests)
        )
    assert concurrent_results == sequential


# --- pump endpoints -----------------------------------------------------------------


def test_pump_forward(client):
    body = client.get("/pump/forward", params={"omega": 5000, "pf": 4}).json()
    assert body["head"] == pytest.approx(61.87, abs=1e-6)


def test_pump_inverse_roundtrip(client):
    head = client.get("/pump/forward", params={"omega": 5000, "pf": 4}).json()["head"]
    body = client.get("/pump/inverse", params={"omega": 5000, "dp": head}).json()
    assert body["flow"] == pytest.approx(4.0, abs=1e-6)


def test_pump_inverse_out_of_range_body(client):
    response = client.get("/pump/inverse", params={"omega": 5000, "dp": 86.25})
    assert response.status_code == 422
    body = response.json()
    assert body["reason"] == "flow_out_of_range"
    assert body["computed_flow"] == pytest.approx(0.0, abs=1e-9)
    assert body["pf_min"] == 3.0 and body["pf_max"] == 5.0


def test_pump_inverse_no_real_root(client):
    response = client.get("/pump/inverse", params={"omega": 5000, "dp": 500})
    assert response.status_code == 422
    assert response.json()["reason"] == "no_real_root"


def test_pump_calibrate(client):
    body = client.get("/pump/calibrate", params={"omega": 5000, "pf": 4}).json()
    assert body["head"] == pytest.approx(61.87, abs=1e-6)


def test_pump_curve_monotone(client):
    body = client.get("/pump/curve", params={"omega": 5000, "n": 5}).json()
    heads = [p["head"] for p in body["points"]]
    assert len(heads) == 5
    assert all(a > b for a, b in zip(heads, heads[1:]))


def test_pump_validation_422(client):
    assert client.get("/pump/forward", params={"omega": -10, "pf": 4}).status_code == 422
    assert client.get("/pump/curve", params={"omega": 5000, "n": 1}).status_code == 422


# --- protocol details ---------------------------------------------------------------------


def test_unacceptable_accept_header_406(client):
    response = client.get("/health", headers={"accept": "text/csv"})
    assert response.status_code == 406


def test_wildcard_accept_ok(client):
    assert client.get("/health", headers={"accept": "*/*"}).status_code == 200
    assert (
        client.get("/health", headers={"accept": "text/html,*/*;q=0.8"}).status_code
        == 200
    )


def test_openapi_document_served(client):
    body = client.get("/spec").json()
    assert "/models/{model_id}/evaluate" in body["paths"]
    assert "/pump/inverse" in body["paths"]


FRONTEND_DIR = Path(__file__).resolve().parent.parent / "frontend"


@pytest.mark.skipif(
    not (FRONTEND_DIR / "dist" / "main.js").exists(),
    reason="browser console not built (run `npm run build` in frontend/)",
)
def test_console_served_when_mounted():
    app = create_app(console_dir=str(FRONTEND_DIR))
    with TestClient(app) as c:
        page = c.get("/console/")
        assert page.status_code == 200
        assert "Panel 1" in page.text
        script = c.get("/console/dist/main.js")
        assert script.status_code == 200
        assert "ConsoleController" in script.text
