import asyncio
import json

import pytest
from fastapi.testclient import TestClient

from floerd.main import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["version"] == "1.0.0"


def test_d_invariant(client):
    response = client.get("/api/v1/surgery/d", params={"knot": "torus:4,5", "q": 25, "m": 5})
    assert response.status_code == 200
    body = response.json()
    assert body["success"]
    assert (body["data"]["d"], body["data"]["tower_bottom"]) == ("0/1", -2)


def test_d_invariant_precondition(client):
    response = client.get("/api/v1/surgery/d", params={"knot": "torus:4,5", "q": 5})
    assert response.status_code == 422
    assert response.json()["errors"][0]["error"] == "PreconditionError"


def test_syntax_error(client):
    response = client.get("/api/v1/knots/complex", params={"expr": "torus:4,"})
    assert response.status_code == 400
    body = response.json()
    assert body["success"] is False
    assert body["errors"][0]["position"] == 8


def test_size_guard(client):
    response = client.get("/api/v1/knots/complex", params={"expr": "lp:7"})
    assert response.status_code == 413
    assert response.json()["errors"][0]["projected"] == 11 * 15 ** 10


def test_complex_document(client, golden):
    response = client.get("/api/v1/knots/complex", params={"expr": "torus:2,3"})
    assert response.status_code == 200
    expected = json.loads(golden("trefoil.json"))
    expected["name"] = "torus:2,3"
    assert response.json()["data"] == expected


def test_validate(client, golden):
    response = client.post("/api/v1/knots/validate", json=json.loads(golden("trefoil.json")))
    assert response.status_code == 200
    data = response.json()["data"]
    assert data["homology_rank"] == 1
    assert all(check["passed"] for check in data["checks"])


def test_validate_rejects_a_malformed_document(client):
    response = client.post("/api/v1/knots/validate", json={"name": "x", "basis": "nope"})
    assert response.status_code == 422
    assert response.json()["success"] is False


def test_constraints(client):
    response = client.get("/api/v1/knots/constraints", params={"expr": "dtref"})
    assert response.status_code == 200
    assert all(check["passed"] for check in response.json()["data"]["checks"])


def test_metabolizers(client):
    response = client.get("/api/v1/metabolizers", params={"p": 3, "n": 2, "form": "+-"})
    assert response.status_code == 200
    assert len(response.json()["data"]) == 3


def test_special_vector(client):
    response = client.post("/api/v1/metabolizers/special-vector", json={"p": 3, "generators": [[1, 3]]})
    assert response.status_code == 200
    assert response.json()["data"]["z"] == [3, 0]


def test_rho(client):
    response = client.get("/api/v1/metabolizers/rho", params={"p": 7})
    assert response.json()["data"]["permutation"] == [3, 1, 2]


def test_bounds(client):
    response = client.get("/api/v1/surgery/bounds", params={"p": 7})
    assert response.status_code == 200
    assert response.json()["data"]["d0_upper"] == "-8/1"


def test_dbar(client):
    response = client.get("/api/v1/surgery/dbar", params={"knot": "torus:4,5", "p": 5})
    assert response.status_code == 200
    assert [e["dbar"] for e in response.json()["data"]["entries"]] == ["0/1", "0/1", "0/1"]


def test_obstruction(client):
    response = client.get("/api/v1/obstruction", params={"p": 7, "bounds_only": True})
    assert response.status_code == 200
    data = response.json()["data"]
    assert (data["verdict"], data["mode"]) == ("obstructed", "bounds-only")


@pytest.fixture
def threadpool_calls(monkeypatch):
    from starlette.concurrency import run_in_threadpool

    from floerd.api.v1.routes import obstruction, surgery

    calls = []

    async def recording(func, *args, **kwargs):
        calls.append(func)
        return await run_in_threadpool(func, *args, **kwargs)

    monkeypatch.setattr(obstruction, "run_in_threadpool", recording)
    monkeypatch.setattr(surgery, "run_in_threadpool", recording)
    return calls


def test_obstruction_runs_in_a_worker_thread(client, threadpool_calls):
    response = client.get("/api/v1/obstruction", params={"p": 7, "bounds_only": True})
    assert response.status_code == 200
    assert asyncio.run in threadpool_calls


def test_dbar_runs_in_a_worker_thread(client, threadpool_calls):
    response = client.get("/api/v1/surgery/dbar", params={"knot": "torus:2,3", "p": 3})
    assert response.status_code == 200
    assert asyncio.run in threadpool_calls


def test_homology(client):
    response = client.get("/api/v1/knots/homology", params={"expr": "torus:4,5", "m": 5})
    assert response.status_code == 200
    data = response.json()["data"]
    assert (data["m"], data["tower_bottom"], data["stable"]) == (5, -2, True)
    assert data["representative"]
