"""HTTP API over the model store.

All bodies are JSON; errors come back as {code, message, field?} with
a 4xx status.  What-if evaluation never mutates stored state: models
are content-addressed and immutable, and event injection stores the
derived model under a new id.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import metrics
from .context import apply_events, event_from_dict, inject_bindings
from .errors import (
    ClassMismatch,
    DanglingReference,
    DuplicateId,
    ForestViolation,
    GraphCycle,
    InvalidBinding,
    LabelTooLow,
    MalformedInput,
    MissingVariables,
    RangeViolation,
    RiskGraphError,
    SchemaViolation,
    TooManyCandidates,
    UnknownPlan,
)
from .graph import MultiGraph, RiskLabel
from .ingest import build_model, record_from_dict
from .planner import (
    MitigationAction,
    _apply_all,
    action_from_dict,
    plan_exhaustive,
    plan_greedy,
    plan_to_dict,
    render_report,
    validate_action,
)
from .store import ModelStore

_STATUS: tuple[tuple[type, int], ...] = (
    (MissingVariables, 422),
    (UnknownPlan, 404),
    (DanglingReference, 404),
    (DuplicateId, 409),
    (GraphCycle, 409),
    (ForestViolation, 409),
    (ClassMismatch, 409),
    (SchemaViolation, 400),
    (MalformedInput, 400),
    (RangeViolation, 400),
    (InvalidBinding, 400),
    (LabelTooLow, 400),
    (TooManyCandidates, 400),
)


def _status_for(exc: RiskGraphError) -> int:
    for cls, status in _STATUS:
        if isinstance(exc, cls):
            return status
    return 400


def _error_body(exc: RiskGraphError) -> dict:
    body = {"code": exc.code, "message": str(exc)}
    field = getattr(exc, "field", None)
    if field is not None:
        body["field"] = field
    return body


def _metrics_payload(model_id: str, model: MultiGraph) -> dict:
    rows = metrics.evaluate(model)
    rf_prefix = "rf:"
    return {
        "model_id": model_id,
        "total_risk": sum(m.risk_contribution for m in rows.values()),
        "vulnerabilities": [
            {
                "id": vid,
                "rho": m.rho,
                "ef": m.ef,
                "reach": m.reach,
                "risk_contribution": m.risk_contribution,
                "active": m.active,
                "risk_factors": sorted(
                    b.name[len(rf_prefix):]
                    for b in model.vulnerabilities[vid].bindings
                    if b.name.startswith(rf_prefix)
                ),
            }
            for vid, m in sorted(rows.items())
        ],
        "risk_factors": [
            {
                "id": rf.id,
                "kind": rf.kind.value,
                "label": rf.label.value,
                "targets": rf.targets,
            }
            for rf in sorted(model.risk_factors.values(), key=lambda r: r.id)
        ],
        "config_params": [
            {"id": p.id, "name": p.name, "value": p.value, "governs": p.governs}
            for p in sorted(model.config_params.values(), key=lambda p: p.id)
        ],
    }


def _whatif_model(model: MultiGraph, body: dict) -> MultiGraph:
    """Hypothetical model: label overrides re-injected, then staged actions."""
    overrides = body.get("label_overrides", [])
    actions_raw = body.get("actions", [])
    if not isinstance(overrides, list):
        raise SchemaViolation("label_overrides", "expected a list")
    if not isinstance(actions_raw, list):
        raise SchemaViolation("actions", "expected a list")
    working = model.copy()
    if overrides:
        for i, item in enumerate(overrides):
            if not isinstance(item, dict):
                raise SchemaViolation(f"label_overrides[{i}]", "expected an object")
            rf_id = item.get("risk_factor")
            if rf_id not in working.risk_factors:
                raise DanglingReference("label_overrides", str(rf_id))
            try:
                label = RiskLabel(item.get("label"))
            except ValueError:
                raise SchemaViolation(
                    f"label_overrides[{i}].label", f"unknown label {item.get('label')!r}"
                ) from None
            working.risk_factors[rf_id].label = label
        working = inject_bindings(working)
    actions = [
        action_from_dict(obj, f"actions[{i}]") for i, obj in enumerate(actions_raw)
    ]
    for action in actions:
        validate_action(action, working)
    return _apply_all(actions, working)


def create_app(store: Optional[ModelStore] = None) -> FastAPI:
    app = FastAPI(title="riskgraph", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store if store is not None else ModelStore()

    @app.exception_handler(RiskGraphError)
    async def _handle_engine_error(request: Request, exc: RiskGraphError):
        return JSONResponse(status_code=_status_for(exc), content=_error_body(exc))

    def _get_model(model_id: str) -> MultiGraph:
        if not app.state.store.has_model(model_id):
            raise DanglingReference("model", model_id)
        return app.state.store.get_model(model_id)

    @app.post("/model")
    async def upload_model(request: Request):
        body = await request.json()
        if not isinstance(body, list):
            raise SchemaViolation("body", "expected a JSON array of records")
        parsed = [record_from_dict(obj, f"records[{i}]") for i, obj in enumerate(body)]
        model = build_model(parsed)
        model_id = app.state.store.add_model(model)
        return {"model_id": model_id, "records": len(parsed)}

    @app.get("/model/{model_id}/metrics")
    async def model_metrics(model_id: str):
        return _metrics_payload(model_id, _get_model(model_id))

    @app.get("/model/{model_id}/risks/top")
    async def top_risks(model_id: str, n: int = 10):
        if n < 0:
            raise RangeViolation("n", n, "[0,inf)")
        payload = _metrics_payload(model_id, _get_model(model_id))
        rows = sorted(
            payload["vulnerabilities"],
            key=lambda row: (-row["risk_contribution"], row["id"]),
        )
        return {
            "model_id": model_id,
            "total_risk": payload["total_risk"],
            "top": rows[:n],
        }

    @app.post("/model/{model_id}/whatif")
    async def whatif(model_id: str, request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise SchemaViolation("body", "expected an object")
        model = _get_model(model_id)
        hypothetical = _whatif_model(model, body)
        before = _metrics_payload(model_id, model)
        after = _metrics_payload(model_id, hypothetical)
        return {
            "before": before,
            "after": after,
            "deltas": _delta_rows(before, after),
            "total_delta": after["total_risk"] - before["total_risk"],
        }

    @app.post("/model/{model_id}/plan")
    async def make_plan(model_id: str, request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise SchemaViolation("body", "expected an object")
        budget = body.get("budget")
        if isinstance(budget, bool) or not isinstance(budget, (int, float)):
            raise SchemaViolation("budget", "expected a number")
        raw_candidates = body.get("candidates", [])
        if not isinstance(raw_candidates, list):
            raise SchemaViolation("candidates", "expected a list")
        candidates = [
            action_from_dict(obj, f"candidates[{i}]")
            for i, obj in enumerate(raw_candidates)
        ]
        algorithm = body.get("algorithm", "greedy")
        model = _get_model(model_id)
        if algorithm == "greedy":
            plan = plan_greedy(model, candidates, float(budget))
        elif algorithm == "exhaustive":
            plan = plan_exhaustive(model, candidates, float(budget))
        else:
            raise SchemaViolation("algorithm", f"unknown algorithm {algorithm!r}")
        report = render_report(plan, model, app.state.store.reputation())
        plan_id = app.state.store.add_plan(model_id, plan, report)
        stored = app.state.store.get_plan(plan_id)
        return {"plan_id": plan_id, "plan": stored["plan"], "report": report}

    @app.get("/plans/{plan_id}")
    async def get_plan(plan_id: str):
        if not app.state.store.has_plan(plan_id):
            raise UnknownPlan(plan_id)
        return app.state.store.get_plan(plan_id)

    @app.post("/plans/{plan_id}/feedback")
    async def plan_feedback(plan_id: str, request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise SchemaViolation("body", "expected an object")
        verdict = body.get("verdict")
        if isinstance(verdict, bool) or not isinstance(verdict, (int, float)):
            raise SchemaViolation("verdict", "expected a number in [-1,1]")
        store_obj = app.state.store
        if not store_obj.has_plan(plan_id):
            raise UnknownPlan(plan_id)
        store_obj.record_feedback(plan_id, float(verdict))
        return {
            "plan_id": plan_id,
            "verdict": float(verdict),
            "reputation": _reputation_payload(store_obj),
        }

    @app.get("/reputation")
    async def reputation():
        return _reputation_payload(app.state.store)

    @app.post("/model/{model_id}/events")
    async def inject_events(model_id: str, request: Request):
        body = await request.json()
        if not isinstance(body, list):
            raise SchemaViolation("body", "expected a JSON array of events")
        events = [event_from_dict(obj, f"events[{i}]") for i, obj in enumerate(body)]
        model = _get_model(model_id)
        updated, created = apply_events(model, events)
        new_id = app.state.store.add_model(updated)
        return {
            "model_id": new_id,
            "source_model_id": model_id,
            "risk_factors_created": [rf.id for rf in created],
            "events_processed": len(events),
        }

    return app


def _delta_rows(before: dict, after: dict) -> list[dict]:
    """Per-vulnerability contribution deltas; removed rows show 0 after."""
    before_map = {row["id"]: row for row in before["vulnerabilities"]}
    after_map = {row["id"]: row for row in after["vulnerabilities"]}
    rows = []
    for vid in sorted(set(before_map) | set(after_map)):
        b = before_map.get(vid)
        a = after_map.get(vid)
        b_contrib = b["risk_contribution"] if b else 0.0
        a_contrib = a["risk_contribution"] if a else 0.0
        rows.append(
            {
                "id": vid,
                "risk_contribution_before": b_contrib,
                "risk_contribution_after": a_contrib,
                "delta": a_contrib - b_contrib,
                "removed": a is None,
            }
        )
    return rows


def _reputation_payload(store: ModelStore) -> dict:
    result = store.reputation()
    return {
        "scores": {k: result.scores[k] for k in sorted(result.scores)},
        "iterations": result.iterations,
        "converged": result.converged,
    }
