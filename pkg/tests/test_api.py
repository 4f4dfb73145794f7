import time

import pytest
from fastapi.testclient import TestClient

from imputation_lab.api import streaming
from imputation_lab.api.app import app, create_app
from imputation_lab.api.routers import experiment as experiment_routes
from imputation_lab.api.routers.experiment import build_experiment_config, cancel_background_runs
from imputation_lab.api.schemas.experiment import ExperimentRequest
from imputation_lab.api.streaming import _sse_line, create_run, get_run
from imputation_lab.utils.config import load_config


@pytest.fixture
def client():
    with TestClient(app) as c:
        yield c


def _wait_for(client, run_id: str, timeout: float = 60.0) -> dict:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        body = client.get(f"/api/experiments/{run_id}").json()
        if body["status"] in ("completed", "failed"):
            return body
        time.sleep(0.1)
    raise AssertionError(f"run {run_id} did not finish in {timeout}s")


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_scenarios_are_listed(client):
    body = client.get("/api/experiments/scenarios").json()
    by_name = {s["scenario_type"]: s for s in body}

    assert set(by_name) == {"breast_cancer_like", "diabetes_like", "heart_like"}
    assert by_name["diabetes_like"]["target"] == "Outcome"
    assert by_name["heart_like"]["default_rows"] == 303


def test_unknown_run_is_404(client):
    assert client.get("/api/experiments/nope").status_code == 404
    assert client.get("/api/experiments/nope/stream").status_code == 404


def test_invalid_requests_are_422(client):
    bad_rate = {"scenario_type": "heart_like", "rates": [1.5]}
    too_few_rows = {"scenario_type": "heart_like", "rows": 5}

    assert client.post("/api/experiments", json=bad_rate).status_code == 422
    assert client.post("/api/experiments", json=too_few_rows).status_code == 422


def test_ranking_run_completes(client):
    request = {
        "scenario_type": "diabetes_like",
        "rows": 60,
        "methods": ["mean", "median"],
        "rates": [0.1],
        "seeds": [0, 1],
        "n_trees": 3,
    }
    started = client.post("/api/experiments", json=request).json()
    assert started["status"] == "pending"

    body = _wait_for(client, started["run_id"])

    assert body["status"] == "completed"
    assert body["cells_done"] == body["cells_total"] == 2
    assert {a["method"] for a in body["aggregates"]} == {"mean", "median"}
    assert len(body["summary"]) == 2


def test_request_maps_onto_config():
    request = ExperimentRequest(
        experiment="ordering",
        scenario_type="heart_like",
        rows=80,
        methods=["mice"],
        rates=[0.2],
        n_trees=7,
    )
    config = build_experiment_config(request)

    assert config.datasets[0].synthetic == "heart_like"
    assert config.datasets[0].target == "target"
    assert config.ordering.methods == ["mice"]
    assert config.ordering.rates == [0.2]
    assert config.sfs.forest.n_trees == 7
    assert config.mice.forest.n_trees == 7


def test_sse_line_format():
    assert _sse_line("done", {"run_id": "x"}) == 'event: done\ndata: {"run_id": "x"}\n\n'


def test_cors_allows_only_configured_origins():
    with TestClient(create_app(["http://lab.test"])) as c:
        allowed = c.options(
            "/health",
            headers={"Origin": "http://lab.test", "Access-Control-Request-Method": "GET"},
        )
        other = c.get("/health", headers={"Origin": "http://elsewhere.test"})

    assert allowed.headers["access-control-allow-origin"] == "http://lab.test"
    assert "access-control-allow-origin" not in other.headers


def test_cors_origins_come_from_environment(monkeypatch):
    monkeypatch.setenv("IMPUTATION_LAB_CORS_ORIGINS", "http://a.test, http://b.test,")

    assert load_config()["cors_origins"] == ["http://a.test", "http://b.test"]


def test_finished_runs_are_evicted_oldest_first(monkeypatch):
    monkeypatch.setattr(streaming, "_runs", {})
    monkeypatch.setattr(streaming, "MAX_FINISHED_RUNS", 2)
    runs = [create_run("ranking", "heart_like") for _ in range(4)]
    for state in runs[:3]:
        state.status = "completed"

    create_run("ranking", "heart_like")

    assert get_run(runs[0].run_id) is None
    assert get_run(runs[1].run_id) is runs[1]
    assert get_run(runs[3].run_id) is runs[3]
    assert len(streaming._runs) == 4


def test_background_run_is_released_when_it_finishes(client):
    request = {
        "scenario_type": "diabetes_like",
        "rows": 60,
        "methods": ["mean"],
        "rates": [0.1],
        "seeds": [0],
        "n_trees": 3,
    }
    started = client.post("/api/experiments", json=request).json()
    assert _wait_for(client, started["run_id"])["status"] == "completed"

    deadline = time.monotonic() + 5.0
    while experiment_routes._background_runs and time.monotonic() < deadline:
        time.sleep(0.05)
    assert not experiment_routes._background_runs
    assert cancel_background_runs() == 0
