import math

import pytest
from fastapi.testclient import TestClient

from app.app import create_app


@pytest.fixture
def client():
    with TestClient(create_app()) as c:
        yield c


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["pool"] is True


def test_trace_id_is_echoed(client):
    resp = client.post("/api/roots", json={"model": "bbm", "omega0": 0.4}, headers={"X-Trace-Id": "abc123"})
    assert resp.headers["X-Trace-Id"] == "abc123"
    assert float(resp.headers["X-Elapsed-Ms"]) >= 0
    assert client.get("/health").headers["X-Trace-Id"]


def test_roots(client):
    resp = client.post("/api/roots", json={"model": "kdv", "omega0": 0.375, "n": -1})
    assert resp.status_code == 200
    body = resp.json()
    assert body["code"] == 0
    assert body["data"]["k0"] == pytest.approx([0.5, 0.0])


def test_roots_error_envelope(client):
    resp = client.post("/api/roots", json={"model": "kdv", "omega0": -1.0})
    assert resp.status_code == 422
    body = resp.json()
    assert body["message"] == "precondition_violation"
    assert body["data"]["code"] == "precondition_violation"


def test_general_model_needs_coefficients(client):
    resp = client.post("/api/roots", json={"model": "general", "omega0": 0.3})
    assert resp.status_code == 422


def test_dnmap_with_custom_harmonics(client):
    payload = {"model": "kdv", "omega0": 0.375, "harmonics": {"-1": [0.0, -0.5], "1": [0.0, 0.5]}, "t": [0.0], "j": 1}
    body = client.post("/api/dnmap", json=payload).json()
    assert body["data"]["is_real"] is True
    assert body["data"]["series"][0]["re"] == pytest.approx(0.5)


def test_evaluate(client):
    payload = {
        "model": "kdv",
        "omega0": 0.375,
        "method": "asym",
        "points": [[3.0, 400.0], [-1.0, 1.0]],
        "samples": {"xi": {"values": [0.5]}, "t": {"values": [100.0]}},
    }
    body = client.post("/api/evaluate", json=payload).json()
    rows = body["data"]
    assert len(rows) == 3
    assert rows[0]["value"] == pytest.approx(math.sin(1.5 - 150.0), abs=1e-12)
    assert rows[1]["value"] is None
    assert rows[1]["status"] == "precondition_violation"
    assert rows[2]["x"] == 50.0
    assert rows[2]["region"] == "IIa"


def test_evaluate_rejects_oracle(client):
    resp = client.post("/api/evaluate", json={"model": "kdv", "omega0": 0.375, "method": "oracle"})
    assert resp.status_code == 422


def test_evaluate_point_limit(client):
    payload = {"model": "kdv", "omega0": 0.375, "method": "asym",
               "samples": {"x": {"start": 0.0, "stop": 1.0, "num": 101}, "t": {"start": 1.0, "stop": 2.0, "num": 100}}}
    resp = client.post("/api/evaluate", json=payload)
    assert resp.status_code == 422
    assert resp.json()["message"] == "too_many_points"


def test_phase_diagram(client):
    body = client.post("/api/phase-diagram", json={"model": "kdv", "resolution": 4}).json()
    assert len(body["data"]["labels"]) == 16
    assert "l1" in body["data"]["curves"]
