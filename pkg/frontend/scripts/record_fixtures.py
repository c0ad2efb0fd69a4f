#!/usr/bin/env python3
"""Record real API payloads into frontend/tests/fixtures/.

The UI snapshot tests compare rendered values against these files, so
they must be actual wire bytes from the service, never hand-written.
Re-run after any engine change that moves numbers:

    python3 frontend/scripts/record_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from riskgraph.service import create_app
from riskgraph.store import ModelStore

REPO = Path(__file__).resolve().parent.parent.parent
FIXTURES_IN = REPO / "fixtures"
FIXTURES_OUT = REPO / "frontend" / "tests" / "fixtures"


def main() -> None:
    FIXTURES_OUT.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app(ModelStore()))

    def record(name: str, response) -> dict:
        assert response.status_code == 200, f"{name}: {response.status_code} {response.text}"
        (FIXTURES_OUT / name).write_bytes(response.content)
        print(f"recorded {name} ({len(response.content)} bytes)")
        return response.json()

    # Empty model: the dashboard's "no vulnerabilities" state.
    empty_id = client.post("/model", json=[]).json()["model_id"]
    record("metrics-empty.json", client.get(f"/model/{empty_id}/metrics"))

    # Two-system fixture with factors injected (events call with an empty
    # stream re-runs injection over the factors already in the model).
    records = json.loads((FIXTURES_IN / "fig3.ncr.json").read_text())
    raw_id = client.post("/model", json=records).json()["model_id"]
    model_id = client.post(f"/model/{raw_id}/events", json=[]).json()["model_id"]

    record("metrics-fig3.json", client.get(f"/model/{model_id}/metrics"))
    record("top-risks-fig3.json",
           client.get(f"/model/{model_id}/risks/top", params={"n": 10}))
    record("whatif-empty.json",
           client.post(f"/model/{model_id}/whatif", json={"actions": []}))
    record("whatif-patch-v1.json",
           client.post(f"/model/{model_id}/whatif", json={
               "actions": [{"id": "stage-patch-v1", "kind": "patch",
                            "vulnerability": "v1"}],
           }))

    plan_body = record("plan-fig3.json",
                       client.post(f"/model/{model_id}/plan", json={
                           "budget": 2.0,
                           "candidates": [
                               {"id": "cand-ids-v1", "kind": "deploy_ids_rule",
                                "vulnerability": "v1", "cost": 1.0},
                               {"id": "cand-ids-v3", "kind": "deploy_ids_rule",
                                "vulnerability": "v3", "cost": 1.0},
                           ],
                       }))
    record("feedback-plus-one.json",
           client.post(f"/plans/{plan_body['plan_id']}/feedback",
                       json={"verdict": 1.0}))
    record("reputation.json", client.get("/reputation"))


if __name__ == "__main__":
    main()
