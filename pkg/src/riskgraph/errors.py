"""Exception taxonomy shared across the engine.

Every error carries enough context (ids, field paths) to produce the
structured diagnostics the CLI and HTTP layers emit.
"""

from __future__ import annotations


class RiskGraphError(Exception):
    """Base class for all engine errors."""

    code = "error"


class DuplicateId(RiskGraphError):
    code = "duplicate-id"

    def __init__(self, node_id: str):
        super().__init__(f"id already present: {node_id!r}")
        self.node_id = node_id


class DanglingReference(RiskGraphError):
    code = "dangling-reference"

    def __init__(self, referrer: str, missing: str):
        super().__init__(f"{referrer!r} references missing id {missing!r}")
        self.referrer = referrer
        self.missing = missing


class GraphCycle(RiskGraphError):
    code = "graph-cycle"

    def __init__(self, relation: str, edge: tuple[str, str]):
        super().__init__(f"{relation} edge {edge[0]!r}->{edge[1]!r} closes a cycle")
        self.relation = relation
        self.edge = edge


class ForestViolation(RiskGraphError):
    code = "forest-violation"

    def __init__(self, child: str, parents: tuple[str, str]):
        super().__init__(
            f"component {child!r} cannot be part_of both {parents[0]!r} and {parents[1]!r}"
        )
        self.child = child
        self.parents = parents


class ClassMismatch(RiskGraphError):
    code = "class-mismatch"

    def __init__(self, relation: str, node_id: str, expected: str):
        super().__init__(f"{relation} endpoint {node_id!r} is not a {expected}")
        self.relation = relation
        self.node_id = node_id
        self.expected = expected


class RangeViolation(RiskGraphError):
    code = "range-violation"

    def __init__(self, field: str, value: object, bounds: str):
        super().__init__(f"{field} = {value!r} outside {bounds}")
        self.field = field
        self.value = value
        self.bounds = bounds


class SchemaViolation(RiskGraphError):
    code = "schema-violation"

    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


class MalformedInput(RiskGraphError):
    code = "malformed-input"


class InvalidBinding(RiskGraphError):
    code = "invalid-binding"

    def __init__(self, name: str, reason: str):
        super().__init__(f"binding {name!r}: {reason}")
        self.name = name
        self.reason = reason


class MissingVariables(RiskGraphError):
    code = "missing-variables"

    def __init__(self, vulnerability_id: str, klass: str):
        super().__init__(
            f"vulnerability {vulnerability_id!r} has no {klass} binding"
        )
        self.vulnerability_id = vulnerability_id
        self.klass = klass


class LabelTooLow(RiskGraphError):
    code = "label-too-low"

    def __init__(self, event_id: str):
        super().__init__(f"event {event_id!r} labeled 'none'; no risk factor to emit")
        self.event_id = event_id


class UnknownPlan(RiskGraphError):
    code = "unknown-plan"

    def __init__(self, plan_id: str):
        super().__init__(f"unknown plan: {plan_id!r}")
        self.plan_id = plan_id


class TooManyCandidates(RiskGraphError):
    code = "too-many-candidates"

    def __init__(self, count: int, limit: int):
        super().__init__(f"{count} candidates exceed exhaustive-search limit {limit}")
        self.count = count
        self.limit = limit
