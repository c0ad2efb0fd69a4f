import json

import pytest

from riskgraph import metrics
from riskgraph.bindings import RISK_FACTOR_PREFIX, VariableBinding, VariableClass
from riskgraph.context import (
    EventRecord,
    Sentiment,
    apply_events,
    baseline_classifier,
    classify,
    event_from_dict,
    get_classifier,
    infer_kind,
    inject_bindings,
    parse_events,
    register_classifier,
    to_risk_factor,
)
from riskgraph.errors import LabelTooLow, MalformedInput, SchemaViolation
from riskgraph.graph import (
    Component,
    Level,
    MultiGraph,
    RiskFactor,
    RiskFactorKind,
    RiskLabel,
    Vulnerability,
)


def _event(eid="e1", sentiment=Sentiment.HOSTILE, target="Sony Pictures",
           trigger="condemnation", summary="state media condemnation of the studio"):
    return EventRecord(id=eid, trigger=trigger, sentiment=sentiment,
                       summary=summary, timestamp="2014-11-24T00:00:00Z",
                       actor="hostile state", location="abroad", target=target)


MONITORED = ["Sony Pictures", "Mail Cluster"]


def test_hostile_event_on_monitored_target_is_high():
    assert classify(_event(), MONITORED) is RiskLabel.HIGH


def test_negative_event_without_match_is_none():
    event = _event(sentiment=Sentiment.NEGATIVE, target="Some Other Studio",
                   trigger="movie review", summary="the film is bad")
    assert classify(event, MONITORED) is RiskLabel.NONE


def test_negative_event_with_match_is_medium():
    assert classify(_event(sentiment=Sentiment.NEGATIVE), MONITORED) is RiskLabel.MEDIUM


def test_neutral_event_with_match_is_low():
    assert classify(_event(sentiment=Sentiment.NEUTRAL), MONITORED) is RiskLabel.LOW


def test_match_is_case_insensitive():
    assert classify(_event(target="sony pictures"), MONITORED) is RiskLabel.HIGH


def test_empty_target_never_matches():
    assert classify(_event(target=""), MONITORED) is RiskLabel.NONE


def test_classify_is_pure():
    event = _event()
    labels = {classify(event, MONITORED) for _ in range(10)}
    assert labels == {RiskLabel.HIGH}


def test_classifier_registry():
    register_classifier("always-low", lambda e, m: RiskLabel.LOW)
    assert get_classifier("always-low")(_event(), []) is RiskLabel.LOW
    assert get_classifier("baseline") is baseline_classifier
    with pytest.raises(KeyError):
        get_classifier("missing")


def test_to_risk_factor_preserves_label():
    rf = to_risk_factor(_event(), RiskLabel.HIGH, "sysA")
    assert rf.label is RiskLabel.HIGH
    assert rf.targets == "sysA"
    assert rf.id == "rf-e1"


def test_to_risk_factor_rejects_none():
    with pytest.raises(LabelTooLow):
        to_risk_factor(_event(), RiskLabel.NONE, "sysA")


def test_kind_inference():
    assert infer_kind(_event()) is RiskFactorKind.GEOPOLITICAL
    assert infer_kind(_event(summary="new sanctions on chip exports")) is RiskFactorKind.ECONOMIC
    assert infer_kind(_event(summary="GDPR compliance deadline passes")) is RiskFactorKind.REGULATORY
    assert infer_kind(_event(summary="new ransomware strain spreading")) is RiskFactorKind.THREAT_INTEL


def _fig3_like_model():
    m = MultiGraph()
    m.add_node(Component("sysA", "Alpha", Level.SYSTEM, 1.0))
    m.add_node(Component("subA", "Alpha Sub", Level.SUBSYSTEM, 0.5))
    m.add_edge("part_of", "subA", "sysA")
    m.add_node(Component("sysB", "Beta", Level.SYSTEM, 0.9))
    m.add_node(Vulnerability("v1", "subA", bindings=[
        VariableBinding("exploitability", VariableClass.L_UP, raw=1.0),
        VariableBinding("impact", VariableClass.E_UP, raw=1.0),
    ]))
    m.add_node(Vulnerability("v3", "sysB", bindings=[
        VariableBinding("exploitability", VariableClass.L_UP, raw=1.0),
        VariableBinding("impact", VariableClass.E_UP, raw=1.0),
    ]))
    return m


def test_inject_reaches_descendants_and_raises_rho():
    m = _fig3_like_model()
    m.add_node(RiskFactor("rfA", RiskFactorKind.GEOPOLITICAL, RiskLabel.HIGH, "sysA"))
    before = metrics.rho("v1", m)
    injected = inject_bindings(m)
    names = [b.name for b in injected.vulnerabilities["v1"].bindings]
    assert f"{RISK_FACTOR_PREFIX}rfA" in names
    assert metrics.rho("v1", injected) > before
    assert metrics.rho("v3", injected) == metrics.rho("v3", m)


def test_inject_ignores_none_labels():
    m = _fig3_like_model()
    m.add_node(RiskFactor("rf0", RiskFactorKind.ECONOMIC, RiskLabel.NONE, "sysA"))
    injected = inject_bindings(m)
    assert injected.vulnerabilities["v1"].bindings == m.vulnerabilities["v1"].bindings


def test_inject_on_empty_target_changes_nothing_else():
    m = _fig3_like_model()
    m.add_node(Component("lonely", "Lonely", Level.SYSTEM, 0.1))
    m.add_node(RiskFactor("rfL", RiskFactorKind.ECONOMIC, RiskLabel.HIGH, "lonely"))
    injected = inject_bindings(m)
    assert injected.vulnerabilities == m.vulnerabilities
    assert "rfL" in injected.risk_factors


def test_inject_is_idempotent():
    m = _fig3_like_model()
    m.add_node(RiskFactor("rfA", RiskFactorKind.GEOPOLITICAL, RiskLabel.MEDIUM, "sysA"))
    once = inject_bindings(m)
    twice = inject_bindings(once)
    assert once == twice


def test_inject_replaces_after_label_change():
    m = _fig3_like_model()
    m.add_node(RiskFactor("rfA", RiskFactorKind.GEOPOLITICAL, RiskLabel.LOW, "sysA"))
    low = inject_bindings(m)
    m.risk_factors["rfA"].label = RiskLabel.HIGH
    high = inject_bindings(m)
    rf_bindings_low = [b for b in low.vulnerabilities["v1"].bindings
                       if b.name.startswith(RISK_FACTOR_PREFIX)]
    rf_bindings_high = [b for b in high.vulnerabilities["v1"].bindings
                        if b.name.startswith(RISK_FACTOR_PREFIX)]
    assert len(rf_bindings_low) == len(rf_bindings_high) == 1
    assert rf_bindings_low[0].raw == 0.25
    assert rf_bindings_high[0].raw == 1.0


def test_monotone_severity():
    m = _fig3_like_model()
    rhos = []
    for label in (RiskLabel.LOW, RiskLabel.MEDIUM, RiskLabel.HIGH):
        variant = m.copy()
        variant.add_node(RiskFactor("rfA", RiskFactorKind.GEOPOLITICAL, label, "sysA"))
        injected = inject_bindings(variant)
        rhos.append(metrics.rho("v1", injected))
        assert metrics.rho("v3", injected) == metrics.rho("v3", m)
    assert rhos[0] < rhos[1] < rhos[2]


def test_apply_events_dnc_stream(fixtures_dir):
    from riskgraph.ingest import build_model, parse_ncr

    model = build_model(parse_ncr((fixtures_dir / "dnc.ncr.json").read_text()))
    events = parse_events((fixtures_dir / "dnc.events.json").read_text())
    updated, created = apply_events(model, events)
    assert len(created) == 3  # noise event filtered out
    assert {rf.label for rf in created} == {RiskLabel.MEDIUM, RiskLabel.HIGH}
    assert metrics.total_risk(updated) > metrics.total_risk(model)
    # replay is idempotent
    again, created_again = apply_events(updated, events)
    assert again == updated
    assert len(created_again) == 3


def test_apply_events_two_factors_two_systems():
    m = _fig3_like_model()
    events = [
        _event("ea", target="Alpha"),
        _event("eb", target="Beta"),
        _event("noise", target="Nowhere"),
    ]
    updated, created = apply_events(m, events)
    assert len(created) == 2
    assert {rf.targets for rf in created} == {"sysA", "sysB"}


def test_parse_events_file_format():
    doc = [{
        "id": "e1", "trigger": "t", "sentiment": "hostile", "summary": "s",
        "timestamp": "2026-01-01T00:00:00Z", "target": "X",
    }]
    events = parse_events(json.dumps(doc))
    assert events[0].sentiment is Sentiment.HOSTILE
    with pytest.raises(MalformedInput):
        parse_events("{}")
    with pytest.raises(SchemaViolation):
        parse_events(json.dumps([{"id": "e1"}]))
    with pytest.raises(SchemaViolation):
        event_from_dict({"id": "e", "trigger": "t", "sentiment": "angry",
                         "summary": "s", "timestamp": "x"})
