"""In-memory model/plan store with snapshot persistence.

Models are content-addressed by the hash of their canonical
serialization, so re-uploading identical data returns the same id and
every stored model stays immutable; derived models (event injection)
are stored under their own hash.  The feedback graph is shared service
state, persisted as its own canonical file.  Mutations are serialized
behind one lock; reads hand out deep copies.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from pathlib import Path
from typing import Optional

from .graph import MultiGraph
from .ingest import load_model, save_model
from .planner import MitigationPlan, plan_to_dict
from .reputation import (
    FeedbackGraph,
    ReputationScores,
    record_feedback,
    score,
)

DATA_DIR_ENV = "RISKCTL_DATA_DIR"


def model_id_for(model: MultiGraph) -> str:
    """Content address: first 16 hex chars of the snapshot's SHA-256."""
    return hashlib.sha256(save_model(model)).hexdigest()[:16]


def plan_id_for(model_id: str, plan: MitigationPlan) -> str:
    payload = json.dumps(
        {"model": model_id, "plan": plan_to_dict(plan)}, sort_keys=True
    ).encode("utf-8")
    return "plan-" + hashlib.sha256(payload).hexdigest()[:16]


class ModelStore:
    """Single-process store; persistence only when a data dir is configured."""

    def __init__(self, data_dir: Optional[Path] = None):
        env_dir = os.environ.get(DATA_DIR_ENV)
        if data_dir is None and env_dir:
            data_dir = Path(env_dir)
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self._lock = threading.Lock()
        self._models: dict[str, MultiGraph] = {}
        self._plans: dict[str, dict] = {}  # plan id -> {model_id, plan, report}
        self.feedback = FeedbackGraph()
        if self.data_dir is not None:
            self._load_snapshots()

    # -- persistence -------------------------------------------------------

    def _load_snapshots(self) -> None:
        models_dir = self.data_dir / "models"
        if models_dir.is_dir():
            for path in sorted(models_dir.glob("*.model.json")):
                model = load_model(path.read_bytes())
                self._models[path.name.split(".")[0]] = model
        plans_dir = self.data_dir / "plans"
        if plans_dir.is_dir():
            for path in sorted(plans_dir.glob("*.plan.json")):
                self._plans[path.name.split(".")[0]] = json.loads(path.read_text())
        feedback_path = self.data_dir / "feedback.json"
        if feedback_path.is_file():
            doc = json.loads(feedback_path.read_text())
            self.feedback = FeedbackGraph(
                sources=set(doc.get("sources", [])),
                plans=set(doc.get("plans", [])),
                contributes={tuple(e) for e in doc.get("contributes", [])},
                verdicts={k: float(v) for k, v in doc.get("verdicts", {}).items()},
            )

    def _persist_model(self, model_id: str, model: MultiGraph) -> None:
        if self.data_dir is None:
            return
        models_dir = self.data_dir / "models"
        models_dir.mkdir(parents=True, exist_ok=True)
        (models_dir / f"{model_id}.model.json").write_bytes(save_model(model))

    def _persist_plan(self, plan_id: str) -> None:
        if self.data_dir is None:
            return
        plans_dir = self.data_dir / "plans"
        plans_dir.mkdir(parents=True, exist_ok=True)
        (plans_dir / f"{plan_id}.plan.json").write_text(
            json.dumps(self._plans[plan_id], sort_keys=True, indent=2) + "\n"
        )

    def _persist_feedback(self) -> None:
        if self.data_dir is None:
            return
        self.data_dir.mkdir(parents=True, exist_ok=True)
        doc = {
            "sources": sorted(self.feedback.sources),
            "plans": sorted(self.feedback.plans),
            "contributes": [list(e) for e in sorted(self.feedback.contributes)],
            "verdicts": {
                k: self.feedback.verdicts[k] for k in sorted(self.feedback.verdicts)
            },
        }
        (self.data_dir / "feedback.json").write_text(
            json.dumps(doc, sort_keys=True, indent=2) + "\n"
        )

    # -- models --------------------------------------------------------------

    def add_model(self, model: MultiGraph) -> str:
        with self._lock:
            model_id = model_id_for(model)
            if model_id not in self._models:
                self._models[model_id] = model.copy()
                self._persist_model(model_id, model)
                # Sources declared in the model join the shared feedback graph.
                for source_id in model.sources:
                    self.feedback.sources.add(source_id)
                for plan_id in model.feedback.plans:
                    self.feedback.plans.add(plan_id)
                self.feedback.contributes |= model.feedback.contributes
                self.feedback.verdicts.update(model.feedback.verdicts)
                self.feedback.sources |= model.feedback.sources
                self._persist_feedback()
            return model_id

    def get_model(self, model_id: str) -> MultiGraph:
        """Deep copy: callers may mutate freely without touching the store."""
        with self._lock:
            return self._models[model_id].copy()

    def has_model(self, model_id: str) -> bool:
        with self._lock:
            return model_id in self._models

    def model_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._models)

    # -- plans and feedback ----------------------------------------------------

    def add_plan(self, model_id: str, plan: MitigationPlan, report: str) -> str:
        with self._lock:
            plan_id = plan_id_for(model_id, plan)
            self._plans[plan_id] = {
                "plan_id": plan_id,
                "model_id": model_id,
                "plan": plan_to_dict(plan),
                "report": report,
            }
            for source_id in plan.contributing_sources:
                self.feedback.sources.add(source_id)
            self.feedback.add_plan(plan_id, set(plan.contributing_sources))
            self._persist_plan(plan_id)
            self._persist_feedback()
            return plan_id

    def get_plan(self, plan_id: str) -> dict:
        with self._lock:
            return dict(self._plans[plan_id])

    def has_plan(self, plan_id: str) -> bool:
        with self._lock:
            return plan_id in self._plans

    def record_feedback(self, plan_id: str, verdict: float) -> None:
        with self._lock:
            self.feedback = record_feedback(self.feedback, plan_id, verdict)
            if plan_id in self._plans:
                self._plans[plan_id]["plan"]["verdict"] = float(verdict)
                self._persist_plan(plan_id)
            self._persist_feedback()

    def reputation(self) -> ReputationScores:
        with self._lock:
            return score(self.feedback)
