"""Context-aware cyber-risk graph engine."""

from .bindings import (
    TransformKind,
    TransformSpec,
    VariableBinding,
    VariableClass,
    factor,
)
from .context import (
    EventRecord,
    Sentiment,
    apply_events,
    baseline_classifier,
    classify,
    inject_bindings,
    register_classifier,
    to_risk_factor,
)
from .graph import (
    Component,
    ConfigurationParameter,
    ConstraintRule,
    Level,
    MultiGraph,
    QualityTag,
    RiskFactor,
    RiskFactorKind,
    RiskLabel,
    SourceDescriptor,
    Violation,
    Vulnerability,
)
from .ingest import (
    NormalizedRecord,
    adapt_csv_inventory,
    build_model,
    load_model,
    parse_ncr,
    save_model,
    serialize_ncr,
)
from .metrics import (
    VulnerabilityMetrics,
    ef,
    evaluate,
    reach,
    rho,
    total_risk,
)
from .planner import (
    ActionKind,
    MitigationAction,
    MitigationPlan,
    apply,
    plan_exhaustive,
    plan_greedy,
    render_report,
)
from .reputation import FeedbackGraph, ReputationScores, record_feedback, score

__version__ = "0.1.0"

__all__ = [
    "ActionKind",
    "Component",
    "ConfigurationParameter",
    "ConstraintRule",
    "EventRecord",
    "FeedbackGraph",
    "Level",
    "MitigationAction",
    "MitigationPlan",
    "MultiGraph",
    "NormalizedRecord",
    "QualityTag",
    "ReputationScores",
    "RiskFactor",
    "RiskFactorKind",
    "RiskLabel",
    "Sentiment",
    "SourceDescriptor",
    "TransformKind",
    "TransformSpec",
    "VariableBinding",
    "VariableClass",
    "Violation",
    "Vulnerability",
    "VulnerabilityMetrics",
    "adapt_csv_inventory",
    "apply",
    "apply_events",
    "baseline_classifier",
    "build_model",
    "classify",
    "ef",
    "evaluate",
    "factor",
    "inject_bindings",
    "load_model",
    "parse_ncr",
    "plan_exhaustive",
    "plan_greedy",
    "reach",
    "record_feedback",
    "register_classifier",
    "render_report",
    "rho",
    "save_model",
    "score",
    "serialize_ncr",
    "to_risk_factor",
    "total_risk",
]
