"""Metrics-driven mitigation planning and report rendering.

Candidate actions (patch a vulnerability, deploy an IDS rule, change a
configuration parameter) are searched for the largest total-risk
reduction under a cost budget.  plan_greedy picks by reduction/cost
ratio; plan_exhaustive enumerates all affordable subsets and serves as
its oracle.  Actions whose target has disappeared from the working
model (e.g. already patched) are skipped, which makes subset outcomes
order-insensitive as long as candidates contain at most one set_config
per parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .bindings import VariableBinding, default_binding
from .errors import (
    DanglingReference,
    DuplicateId,
    RangeViolation,
    SchemaViolation,
    TooManyCandidates,
)
from .graph import MultiGraph, Scalar, Vulnerability
from .metrics import evaluate, total_risk
from .reputation import NEUTRAL_PRIOR, ReputationScores

EXHAUSTIVE_LIMIT = 15


class ActionKind(str, Enum):
    PATCH = "patch"
    DEPLOY_IDS_RULE = "deploy_ids_rule"
    SET_CONFIG = "set_config"


@dataclass(frozen=True)
class MitigationAction:
    """One candidate step: what to do, to which node, at what cost."""

    id: str
    kind: ActionKind
    target: str  # vulnerability id, or parameter id for set_config
    cost: float
    value: Optional[Scalar] = None  # set_config only


@dataclass
class MitigationPlan:
    actions: list[MitigationAction]
    total_cost: float
    risk_before: float
    risk_after: float
    delta: float
    contributing_sources: set[str] = field(default_factory=set)
    verdict: Optional[float] = None


def action_from_dict(obj: dict, where: str = "action") -> MitigationAction:
    if not isinstance(obj, dict):
        raise SchemaViolation(where, "expected an action object")
    action_id = obj.get("id")
    if not isinstance(action_id, str) or not action_id:
        raise SchemaViolation(f"{where}.id", "expected non-empty text")
    try:
        kind = ActionKind(obj.get("kind"))
    except ValueError:
        raise SchemaViolation(f"{where}.kind", f"unknown kind {obj.get('kind')!r}") from None
    cost = obj.get("cost", 1.0)
    if isinstance(cost, bool) or not isinstance(cost, (int, float)):
        raise SchemaViolation(f"{where}.cost", "expected a number")
    if cost <= 0:
        raise RangeViolation(f"{where}.cost", cost, "(0,inf)")
    if kind is ActionKind.SET_CONFIG:
        target = obj.get("parameter")
        if not isinstance(target, str):
            raise SchemaViolation(f"{where}.parameter", "expected text")
        if "value" not in obj:
            raise SchemaViolation(f"{where}.value", "required for set_config")
        value = obj["value"]
        if not isinstance(value, (str, int, float, bool)):
            raise SchemaViolation(f"{where}.value", "expected a scalar")
    else:
        target = obj.get("vulnerability")
        if not isinstance(target, str):
            raise SchemaViolation(f"{where}.vulnerability", "expected text")
        value = None
    return MitigationAction(id=action_id, kind=kind, target=target, cost=float(cost), value=value)


def action_to_dict(action: MitigationAction) -> dict:
    out: dict = {"id": action.id, "kind": action.kind.value, "cost": action.cost}
    if action.kind is ActionKind.SET_CONFIG:
        out["parameter"] = action.target
        out["value"] = action.value
    else:
        out["vulnerability"] = action.target
    return out


def validate_action(action: MitigationAction, model: MultiGraph) -> None:
    if action.cost <= 0:
        raise RangeViolation(f"{action.id}.cost", action.cost, "(0,inf)")
    if action.kind is ActionKind.SET_CONFIG:
        if action.target not in model.config_params:
            raise DanglingReference(action.id, action.target)
    elif action.target not in model.vulnerabilities:
        raise DanglingReference(action.id, action.target)


def _applies(action: MitigationAction, model: MultiGraph) -> bool:
    if action.kind is ActionKind.SET_CONFIG:
        return action.target in model.config_params
    return action.target in model.vulnerabilities


def _bump_binding(vuln: Vulnerability, name: str) -> None:
    for b in vuln.bindings:
        if b.name == name:
            count = len(b.raw) if isinstance(b.raw, list) else float(b.raw)
            b.raw = count + 1
            return
    fresh = default_binding(name)
    fresh.raw = 1
    vuln.bindings.append(fresh)


def _apply_in_place(action: MitigationAction, model: MultiGraph) -> None:
    if action.kind is ActionKind.PATCH:
        model.remove_vulnerability(action.target)
    elif action.kind is ActionKind.DEPLOY_IDS_RULE:
        vuln = model.vulnerabilities.get(action.target)
        if vuln is None:
            raise DanglingReference(action.id, action.target)
        _bump_binding(vuln, "ids_rules_known")
        _bump_binding(vuln, "deployed_ids")
    else:
        param = model.config_params.get(action.target)
        if param is None:
            raise DanglingReference(action.id, action.target)
        param.value = action.value


def apply(action: MitigationAction, model: MultiGraph) -> MultiGraph:
    """New model with the action applied; the input is never mutated."""
    updated = model.copy()
    _apply_in_place(action, updated)
    return updated


def _apply_all(
    actions: list[MitigationAction], model: MultiGraph
) -> MultiGraph:
    """Apply in list order, skipping actions whose target is already gone."""
    working = model.copy()
    for action in actions:
        if _applies(action, working):
            _apply_in_place(action, working)
    return working


def _touched_sources(actions: list[MitigationAction], model: MultiGraph) -> set[str]:
    """QualityTag source ids of every node an action touches."""
    out: set[str] = set()
    for action in actions:
        if action.kind is ActionKind.SET_CONFIG:
            param = model.config_params.get(action.target)
            component = model.components.get(param.governs) if param else None
            if component is not None and component.quality is not None:
                out.add(component.quality.source_id)
        else:
            vuln = model.vulnerabilities.get(action.target)
            if vuln is not None and vuln.quality is not None:
                out.add(vuln.quality.source_id)
    return out


def _check_candidates(candidates: list[MitigationAction], model: MultiGraph) -> None:
    seen = set()
    for action in candidates:
        if action.id in seen:
            raise DuplicateId(action.id)
        seen.add(action.id)
        validate_action(action, model)


def plan_greedy(
    model: MultiGraph, candidates: list[MitigationAction], budget: float
) -> MitigationPlan:
    """Repeatedly take the affordable action with the best reduction/cost.

    Ties break toward the lexicographically smaller action id; the loop
    stops once no affordable action strictly reduces risk.
    """
    if budget < 0:
        raise RangeViolation("budget", budget, "[0,inf)")
    _check_candidates(candidates, model)
    risk_before = total_risk(model)
    working = model.copy()
    working_risk = risk_before
    remaining = float(budget)
    available = sorted(candidates, key=lambda a: a.id)
    chosen: list[MitigationAction] = []

    while True:
        best: Optional[tuple[float, str]] = None
        best_action = None
        best_outcome = None
        for action in available:
            if action.cost > remaining or not _applies(action, working):
                continue
            candidate_model = apply(action, working)
            reduction = working_risk - total_risk(candidate_model)
            if reduction <= 0.0:
                continue
            key = (reduction / action.cost, action.id)
            if best is None or key[0] > best[0] or (key[0] == best[0] and key[1] < best[1]):
                best = key
                best_action = action
                best_outcome = candidate_model
        if best_action is None:
            break
        chosen.append(best_action)
        available.remove(best_action)
        remaining -= best_action.cost
        working = best_outcome
        working_risk = total_risk(working)

    risk_after = working_risk
    return MitigationPlan(
        actions=chosen,
        total_cost=sum(a.cost for a in chosen),
        risk_before=risk_before,
        risk_after=risk_after,
        delta=risk_before - risk_after,
        contributing_sources=_touched_sources(chosen, model),
    )


def plan_exhaustive(
    model: MultiGraph, candidates: list[MitigationAction], budget: float
) -> MitigationPlan:
    """True optimum over all affordable candidate subsets.

    Subsets apply in sorted-id order; equal deltas break toward the
    lexicographically smaller id tuple (so the empty plan wins when
    nothing helps).
    """
    if budget < 0:
        raise RangeViolation("budget", budget, "[0,inf)")
    if len(candidates) > EXHAUSTIVE_LIMIT:
        raise TooManyCandidates(len(candidates), EXHAUSTIVE_LIMIT)
    _check_candidates(candidates, model)
    risk_before = total_risk(model)
    ordered = sorted(candidates, key=lambda a: a.id)

    best_delta = 0.0
    best_subset: tuple[str, ...] = ()
    best_actions: list[MitigationAction] = []
    best_after = risk_before
    for mask in range(1 << len(ordered)):
        subset = [a for i, a in enumerate(ordered) if mask & (1 << i)]
        cost = sum(a.cost for a in subset)
        if cost > budget:
            continue
        after = total_risk(_apply_all(subset, model))
        delta = risk_before - after
        key = tuple(a.id for a in subset)
        if delta > best_delta or (delta == best_delta and key < best_subset):
            best_delta = delta
            best_subset = key
            best_actions = subset
            best_after = after

    return MitigationPlan(
        actions=best_actions,
        total_cost=sum(a.cost for a in best_actions),
        risk_before=risk_before,
        risk_after=best_after,
        delta=best_delta,
        contributing_sources=_touched_sources(best_actions, model),
    )


# -- reporting ------------------------------------------------------------


def plan_to_dict(plan: MitigationPlan) -> dict:
    return {
        "actions": [action_to_dict(a) for a in plan.actions],
        "total_cost": plan.total_cost,
        "risk_before": plan.risk_before,
        "risk_after": plan.risk_after,
        "delta": plan.delta,
        "contributing_sources": sorted(plan.contributing_sources),
        "verdict": plan.verdict,
    }


def _fmt(x: float) -> str:
    return format(x, ".9f")


def render_report(
    plan: MitigationPlan,
    model: MultiGraph,
    scores: Optional[ReputationScores] = None,
) -> str:
    """Deterministic plain-text narrative of the plan.

    Every figure is recomputed from the model by replaying the plan's
    actions step by step, so the report always matches an independent
    metrics run.
    """
    lines = ["MITIGATION PLAN REPORT", "======================", ""]
    lines.append(f"risk before : {_fmt(plan.risk_before)}")
    lines.append(f"risk after  : {_fmt(plan.risk_after)}")
    lines.append(f"reduction   : {_fmt(plan.delta)}")
    lines.append(f"total cost  : {_fmt(plan.total_cost)}")
    lines.append("")
    lines.append("actions")
    lines.append("-------")
    if not plan.actions:
        lines.append("no action recommended: no affordable candidate reduces risk.")
    else:
        working = model.copy()
        before_metrics = evaluate(working)
        step_risk = sum(m.risk_contribution for m in before_metrics.values())
        for i, action in enumerate(plan.actions, start=1):
            if _applies(action, working):
                _apply_in_place(action, working)
            after_metrics = evaluate(working)
            after_risk = sum(m.risk_contribution for m in after_metrics.values())
            label = f"{action.kind.value}({action.target})"
            if action.kind is ActionKind.SET_CONFIG:
                label = f"{action.kind.value}({action.target}={action.value!r})"
            lines.append(f"{i}. [{action.id}] {label}  cost {_fmt(action.cost)}")
            lines.append(
                f"   total risk {_fmt(step_risk)} -> {_fmt(after_risk)}"
                f" (reduction {_fmt(step_risk - after_risk)})"
            )
            for vuln_id in sorted(set(before_metrics) | set(after_metrics)):
                old = before_metrics.get(vuln_id)
                new = after_metrics.get(vuln_id)
                if new is None:
                    lines.append(
                        f"   - {vuln_id}: contribution {_fmt(old.risk_contribution)} -> removed"
                    )
                elif old is None:
                    lines.append(
                        f"   - {vuln_id}: contribution added {_fmt(new.risk_contribution)}"
                    )
                elif abs(old.risk_contribution - new.risk_contribution) > 1e-15:
                    lines.append(
                        f"   - {vuln_id}: contribution {_fmt(old.risk_contribution)}"
                        f" -> {_fmt(new.risk_contribution)}"
                        f" (rho {_fmt(old.rho)} -> {_fmt(new.rho)},"
                        f" ef {_fmt(old.ef)} -> {_fmt(new.ef)})"
                    )
            before_metrics = after_metrics
            step_risk = after_risk
    lines.append("")
    lines.append("assumptions")
    lines.append("-----------")
    lines.append("- per-variable factors: up 1-exp(-alpha*f(x)), down exp(-alpha*f(x))")
    lines.append("- multi-step reach: likelihood of the attacker's best enables chain")
    lines.append("- total risk: sum of reach * exposure * criticality over active vulnerabilities")
    lines.append("")
    lines.append("data sources")
    lines.append("------------")
    if not plan.contributing_sources:
        lines.append("none recorded on touched nodes.")
    else:
        score_map = scores.scores if scores is not None else {}
        for source_id in sorted(plan.contributing_sources):
            value = score_map.get(source_id, NEUTRAL_PRIOR)
            lines.append(f"- {source_id}: reputation {_fmt(value)}")
    lines.append("")
    return "\n".join(lines)
