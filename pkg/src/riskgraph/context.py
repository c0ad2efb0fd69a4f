"""Event records, risk classification, and risk-factor binding injection.

External events (news, threat intel) arrive as structured records with
ontology attributes.  A pluggable classifier turns each event into a
categorical risk label; labeled events become RiskFactor nodes; and
inject_bindings maps every labeled factor onto the vulnerabilities of
its target component subtree as an extra likelihood-raising variable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from .bindings import (
    IDENTITY,
    RISK_FACTOR_ALPHA,
    RISK_FACTOR_PREFIX,
    VariableBinding,
    VariableClass,
)
from .errors import LabelTooLow, MalformedInput, SchemaViolation
from .graph import MultiGraph, RiskFactor, RiskFactorKind, RiskLabel


class Sentiment(str, Enum):
    NEUTRAL = "neutral"
    NEGATIVE = "negative"
    HOSTILE = "hostile"


@dataclass
class EventRecord:
    id: str
    trigger: str
    sentiment: Sentiment
    summary: str
    timestamp: str
    actor: str = ""
    location: str = ""
    target: str = ""


Classifier = Callable[[EventRecord, list[str]], RiskLabel]

# Label -> injected raw value; the step to 1.0 at "high" makes a high
# factor saturate its up-variable contribution at alpha=0.7.
LABEL_VALUES = {RiskLabel.LOW: 0.25, RiskLabel.MEDIUM: 0.5, RiskLabel.HIGH: 1.0}

_CLASSIFIERS: dict[str, Classifier] = {}


def register_classifier(name: str, fn: Classifier) -> None:
    _CLASSIFIERS[name] = fn


def get_classifier(name: str) -> Classifier:
    if name not in _CLASSIFIERS:
        raise KeyError(f"no classifier registered under {name!r}")
    return _CLASSIFIERS[name]


def baseline_classifier(event: EventRecord, monitored: list[str]) -> RiskLabel:
    """Rule-table classifier over sentiment and target match.

    hostile + monitored target -> high; negative + match -> medium;
    match without negative/hostile sentiment -> low; no match -> none.
    Matching is exact on the component name, case-insensitive.
    """
    target = event.target.strip().casefold()
    matched = bool(target) and any(target == name.strip().casefold() for name in monitored)
    if not matched:
        return RiskLabel.NONE
    if event.sentiment is Sentiment.HOSTILE:
        return RiskLabel.HIGH
    if event.sentiment is Sentiment.NEGATIVE:
        return RiskLabel.MEDIUM
    return RiskLabel.LOW


register_classifier("baseline", baseline_classifier)


def classify(
    event: EventRecord,
    monitored: list[str],
    classifier: Optional[Classifier] = None,
) -> RiskLabel:
    """Deterministic risk label for the event against the monitored names."""
    fn = classifier if classifier is not None else baseline_classifier
    return fn(event, monitored)


_KIND_KEYWORDS = (
    (RiskFactorKind.ECONOMIC, ("sanction", "economic", "tariff", "inflation", "market")),
    (RiskFactorKind.REGULATORY, ("regulat", "compliance", "gdpr", "hipaa", "mandate")),
    (
        RiskFactorKind.THREAT_INTEL,
        ("apt", "malware", "phishing", "exploit", "ransomware", "intrusion", "breach"),
    ),
)


def infer_kind(event: EventRecord) -> RiskFactorKind:
    """Keyword heuristic over trigger + summary; geopolitical by default."""
    text = f"{event.trigger} {event.summary}".casefold()
    for kind, keywords in _KIND_KEYWORDS:
        if any(kw in text for kw in keywords):
            return kind
    return RiskFactorKind.GEOPOLITICAL


def to_risk_factor(
    event: EventRecord, label: RiskLabel, target_component: str
) -> RiskFactor:
    """RiskFactor node for a labeled event, targeting the given component."""
    if label <= RiskLabel.NONE:
        raise LabelTooLow(event.id)
    return RiskFactor(
        id=f"rf-{event.id}",
        kind=infer_kind(event),
        label=label,
        targets=target_component,
        description=event.summary,
    )


def inject_bindings(model: MultiGraph) -> MultiGraph:
    """New model where labeled risk factors appear as likelihood-up bindings.

    Every vulnerability on a factor's target component (or a part_of
    descendant) gains an L_UP binding named "rf:<factor id>" with the
    label's value.  All "rf:" bindings are rebuilt from the current
    factors, so re-running replaces rather than duplicates.
    """
    updated = model.copy()
    for vuln in updated.vulnerabilities.values():
        vuln.bindings = [
            b for b in vuln.bindings if not b.name.startswith(RISK_FACTOR_PREFIX)
        ]
    for rf_id in sorted(updated.risk_factors):
        rf = updated.risk_factors[rf_id]
        if rf.label <= RiskLabel.NONE:
            continue
        for vuln in updated.vulnerabilities_on(rf.targets):
            vuln.bindings.append(
                VariableBinding(
                    name=f"{RISK_FACTOR_PREFIX}{rf.id}",
                    klass=VariableClass.L_UP,
                    raw=LABEL_VALUES[rf.label],
                    alpha=RISK_FACTOR_ALPHA,
                    transform=IDENTITY,
                )
            )
    return updated


def apply_events(
    model: MultiGraph,
    events: list[EventRecord],
    classifier: Optional[Classifier] = None,
) -> tuple[MultiGraph, list[RiskFactor]]:
    """Classify events against the model, add risk factors, inject bindings.

    Events that classify above none and whose target resolves to a
    component become RiskFactor nodes (skipping ids already present, so
    replaying an event stream is idempotent).  Returns the new model and
    the factors created in this pass.
    """
    updated = model.copy()
    monitored = [c.name for c in updated.components.values()]
    created: list[RiskFactor] = []
    for event in sorted(events, key=lambda e: e.id):
        label = classify(event, monitored, classifier)
        if label <= RiskLabel.NONE:
            continue
        target_id = _match_component(updated, event.target)
        if target_id is None:
            continue
        rf = to_risk_factor(event, label, target_id)
        if updated.has_id(rf.id):
            updated.risk_factors[rf.id] = rf
        else:
            updated.add_node(rf)
        created.append(rf)
    return inject_bindings(updated), created


def _match_component(model: MultiGraph, target: str) -> Optional[str]:
    wanted = target.strip().casefold()
    hits = sorted(
        c.id for c in model.components.values() if c.name.strip().casefold() == wanted
    )
    return hits[0] if hits else None


# -- .events.json file format -------------------------------------------


def event_to_dict(event: EventRecord) -> dict:
    return {
        "id": event.id,
        "trigger": event.trigger,
        "actor": event.actor,
        "location": event.location,
        "target": event.target,
        "sentiment": event.sentiment.value,
        "summary": event.summary,
        "timestamp": event.timestamp,
    }


def event_from_dict(obj: dict, where: str = "event") -> EventRecord:
    if not isinstance(obj, dict):
        raise SchemaViolation(where, "expected an object")
    for key in ("id", "trigger", "sentiment", "summary", "timestamp"):
        if key not in obj:
            raise SchemaViolation(f"{where}.{key}", "required field missing")
        if not isinstance(obj[key], str):
            raise SchemaViolation(f"{where}.{key}", "expected text")
    try:
        sentiment = Sentiment(obj["sentiment"])
    except ValueError:
        raise SchemaViolation(
            f"{where}.sentiment", f"unknown sentiment {obj['sentiment']!r}"
        ) from None
    return EventRecord(
        id=obj["id"],
        trigger=obj["trigger"],
        sentiment=sentiment,
        summary=obj["summary"],
        timestamp=obj["timestamp"],
        actor=str(obj.get("actor", "")),
        location=str(obj.get("location", "")),
        target=str(obj.get("target", "")),
    )


def parse_events(text: str) -> list[EventRecord]:
    """Parse a .events.json document (JSON array of event objects)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, list):
        raise MalformedInput("expected a JSON array of event objects")
    return [event_from_dict(obj, f"events[{i}]") for i, obj in enumerate(data)]
