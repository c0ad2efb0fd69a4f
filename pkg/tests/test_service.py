import json

import pytest
from fastapi.testclient import TestClient

from riskgraph import metrics
from riskgraph.ingest import build_model, parse_ncr
from riskgraph.service import create_app
from riskgraph.store import ModelStore


@pytest.fixture
def client():
    return TestClient(create_app(ModelStore()))


@pytest.fixture
def fig3_records(fixtures_dir):
    return json.loads((fixtures_dir / "fig3.ncr.json").read_text())


@pytest.fixture
def fig3_id(client, fig3_records):
    response = client.post("/model", json=fig3_records)
    assert response.status_code == 200
    return response.json()["model_id"]


def test_upload_is_content_addressed(client, fig3_records):
    first = client.post("/model", json=fig3_records).json()["model_id"]
    second = client.post("/model", json=fig3_records).json()["model_id"]
    assert first == second


def test_upload_rejects_bad_records(client):
    response = client.post("/model", json=[{"id": "x"}])
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "schema-violation"
    assert "field" in body


def test_upload_rejects_cycles_with_409(client):
    records = []
    for rid, attrs in (
        ("c1", {"name": "c", "level": "system", "criticality": 1.0}),
        ("v1", {"exists_on": "c1", "enables": ["v2"]}),
        ("v2", {"exists_on": "c1", "enables": ["v1"]}),
    ):
        rtype = "component" if rid.startswith("c") else "vulnerability"
        records.append({
            "id": rid, "record_type": rtype, "attributes": attrs,
            "quality": {"completeness": 1.0, "source_id": "s"},
            "provenance": {"adapter": "t", "ingested_at": "2026-01-01T00:00:00Z"},
        })
    response = client.post("/model", json=records)
    assert response.status_code == 409
    assert response.json()["code"] == "graph-cycle"


def test_metrics_match_engine(client, fig3_id, fig3_records):
    model = build_model(parse_ncr(json.dumps(fig3_records)))
    payload = client.get(f"/model/{fig3_id}/metrics").json()
    expected = metrics.evaluate(model)
    assert payload["total_risk"] == pytest.approx(metrics.total_risk(model), abs=1e-12)
    rows = {row["id"]: row for row in payload["vulnerabilities"]}
    assert set(rows) == set(expected)
    for vid, vm in expected.items():
        assert rows[vid]["rho"] == pytest.approx(vm.rho, abs=1e-12)
        assert rows[vid]["risk_contribution"] == pytest.approx(
            vm.risk_contribution, abs=1e-12)


def test_metrics_unknown_model_404(client):
    response = client.get("/model/deadbeef/metrics")
    assert response.status_code == 404
    assert response.json()["code"] == "dangling-reference"


def test_missing_variables_maps_to_422(client):
    records = [
        {"id": "c1", "record_type": "component",
         "attributes": {"name": "c", "level": "system", "criticality": 1.0},
         "quality": {"completeness": 1.0, "source_id": "s"},
         "provenance": {"adapter": "t", "ingested_at": "2026-01-01T00:00:00Z"}},
        {"id": "v1", "record_type": "vulnerability",
         "attributes": {"exists_on": "c1"},
         "quality": {"completeness": 1.0, "source_id": "s"},
         "provenance": {"adapter": "t", "ingested_at": "2026-01-01T00:00:00Z"}},
    ]
    model_id = client.post("/model", json=records).json()["model_id"]
    response = client.get(f"/model/{model_id}/metrics")
    assert response.status_code == 422
    assert response.json()["code"] == "missing-variables"


def test_top_risks_sorted_with_id_ties(client, fig3_id):
    payload = client.get(f"/model/{fig3_id}/risks/top", params={"n": 2}).json()
    contributions = [row["risk_contribution"] for row in payload["top"]]
    assert contributions == sorted(contributions, reverse=True)
    assert len(payload["top"]) == 2
    everything = client.get(f"/model/{fig3_id}/risks/top", params={"n": 100}).json()
    rows = everything["top"]
    for a, b in zip(rows, rows[1:]):
        if a["risk_contribution"] == b["risk_contribution"]:
            assert a["id"] < b["id"]


def test_whatif_empty_is_identity(client, fig3_id):
    response = client.post(f"/model/{fig3_id}/whatif", json={"actions": []})
    assert response.status_code == 200
    body = response.json()
    assert body["before"] == body["after"]
    assert body["total_delta"] == 0.0
    assert all(row["delta"] == 0.0 for row in body["deltas"])


def test_whatif_is_pure_and_deterministic(client, fig3_id):
    request = {"actions": [
        {"id": "w1", "kind": "patch", "vulnerability": "v1"},
    ]}
    baseline = client.get(f"/model/{fig3_id}/metrics").json()
    first = client.post(f"/model/{fig3_id}/whatif", json=request).json()
    second = client.post(f"/model/{fig3_id}/whatif", json=request).json()
    assert first == second
    # stored model unchanged by any number of what-ifs
    assert client.get(f"/model/{fig3_id}/metrics").json() == baseline
    removed = [row for row in first["deltas"] if row["id"] == "v1"]
    assert removed[0]["removed"] is True
    assert removed[0]["risk_contribution_after"] == 0.0


def test_whatif_label_override(client, fig3_id):
    # Silence rf-west so only the east factor is injected into the copy.
    request = {"label_overrides": [
        {"risk_factor": "rf-east", "label": "high"},
        {"risk_factor": "rf-west", "label": "none"},
    ]}
    body = client.post(f"/model/{fig3_id}/whatif", json=request).json()
    v1_before = next(r for r in body["before"]["vulnerabilities"] if r["id"] == "v1")
    v1_after = next(r for r in body["after"]["vulnerabilities"] if r["id"] == "v1")
    # fixture ships uninjected, so the override + injection raises rho
    assert v1_after["rho"] > v1_before["rho"]
    v3_before = next(r for r in body["before"]["vulnerabilities"] if r["id"] == "v3")
    v3_after = next(r for r in body["after"]["vulnerabilities"] if r["id"] == "v3")
    assert v3_after["rho"] == v3_before["rho"]


def test_whatif_unknown_action_target_404(client, fig3_id):
    response = client.post(f"/model/{fig3_id}/whatif", json={
        "actions": [{"id": "w1", "kind": "patch", "vulnerability": "ghost"}]
    })
    assert response.status_code == 404


def test_plan_and_feedback_closed_form(client):
    records = [
        {"id": "src-solo", "record_type": "source",
         "attributes": {"name": "solo feed"},
         "quality": {"completeness": 1.0, "source_id": "src-solo"},
         "provenance": {"adapter": "t", "ingested_at": "2026-01-01T00:00:00Z"}},
        {"id": "c1", "record_type": "component",
         "attributes": {"name": "c", "level": "system", "criticality": 1.0},
         "quality": {"completeness": 1.0, "source_id": "src-solo"},
         "provenance": {"adapter": "t", "ingested_at": "2026-01-01T00:00:00Z"}},
        {"id": "v1", "record_type": "vulnerability",
         "attributes": {"exists_on": "c1", "bindings": [
             {"name": "exploitability", "raw": 5},
             {"name": "impact", "raw": 5},
         ]},
         "quality": {"completeness": 1.0, "source_id": "src-solo"},
         "provenance": {"adapter": "t", "ingested_at": "2026-01-01T00:00:00Z"}},
    ]
    model_id = client.post("/model", json=records).json()["model_id"]
    plan_body = client.post(f"/model/{model_id}/plan", json={
        "budget": 1.0,
        "candidates": [{"id": "a1", "kind": "patch", "vulnerability": "v1", "cost": 1.0}],
    }).json()
    assert plan_body["plan"]["delta"] > 0
    assert plan_body["plan"]["contributing_sources"] == ["src-solo"]
    plan_id = plan_body["plan_id"]

    feedback = client.post(f"/plans/{plan_id}/feedback", json={"verdict": 1.0})
    assert feedback.status_code == 200
    scores = feedback.json()["reputation"]["scores"]
    assert scores["src-solo"] == pytest.approx(0.925, abs=1e-9)
    # cross-check against the reputation module directly
    from riskgraph.reputation import FeedbackGraph, score

    expected = score(FeedbackGraph(
        sources={"src-solo"}, plans={plan_id},
        contributes={("src-solo", plan_id)}, verdicts={plan_id: 1.0},
    ))
    via_api = client.get("/reputation").json()
    assert via_api["scores"]["src-solo"] == expected.scores["src-solo"]
    assert via_api["converged"]


def test_feedback_errors(client, fig3_id):
    assert client.post("/plans/ghost/feedback", json={"verdict": 1.0}).status_code == 404
    plan_id = client.post(f"/model/{fig3_id}/plan", json={
        "budget": 0.0, "candidates": [],
    }).json()["plan_id"]
    bad = client.post(f"/plans/{plan_id}/feedback", json={"verdict": 1.5})
    assert bad.status_code == 400
    assert bad.json()["code"] == "range-violation"


def test_events_endpoint_creates_new_model(client, fixtures_dir):
    records = json.loads((fixtures_dir / "dnc.ncr.json").read_text())
    events = json.loads((fixtures_dir / "dnc.events.json").read_text())
    model_id = client.post("/model", json=records).json()["model_id"]
    before_total = client.get(f"/model/{model_id}/metrics").json()["total_risk"]
    response = client.post(f"/model/{model_id}/events", json=events)
    assert response.status_code == 200
    body = response.json()
    assert body["model_id"] != model_id
    assert len(body["risk_factors_created"]) == 3
    after_total = client.get(f"/model/{body['model_id']}/metrics").json()["total_risk"]
    assert after_total > before_total
    # source model untouched
    assert client.get(f"/model/{model_id}/metrics").json()["total_risk"] == before_total


def test_plan_rejects_bad_algorithm(client, fig3_id):
    response = client.post(f"/model/{fig3_id}/plan", json={
        "budget": 1.0, "candidates": [], "algorithm": "magic",
    })
    assert response.status_code == 400


def test_store_persistence_round_trip(tmp_path, fig3_records):
    store = ModelStore(tmp_path)
    model = build_model(parse_ncr(json.dumps(fig3_records)))
    model_id = store.add_model(model)
    from riskgraph.planner import plan_greedy

    plan = plan_greedy(model, [], 0.0)
    plan_id = store.add_plan(model_id, plan, "report text")
    store.record_feedback(plan_id, 0.5)

    revived = ModelStore(tmp_path)
    assert revived.get_model(model_id) == model
    assert revived.get_plan(plan_id)["plan"]["verdict"] == 0.5
    assert revived.feedback.verdicts[plan_id] == 0.5
