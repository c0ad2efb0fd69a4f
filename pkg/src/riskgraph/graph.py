"""Typed multi-graph store for security artifacts.

One store holds class-tagged nodes (components, vulnerabilities, risk
factors, configuration parameters, constraint rules, data sources) and
five relations.  exists_on / targets / governs live on the nodes;
enables / depends_on / part_of are explicit edge sets.  The enables
subgraph is kept acyclic and part_of is kept a forest at all times so
downstream reach computation can rely on a topological order.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Optional, Union

from .bindings import VariableBinding
from .errors import (
    ClassMismatch,
    DanglingReference,
    DuplicateId,
    ForestViolation,
    GraphCycle,
    RangeViolation,
)
from .reputation import FeedbackGraph

if TYPE_CHECKING:
    from .context import EventRecord


class Level(str, Enum):
    COMPONENT = "component"
    SUBSYSTEM = "subsystem"
    SYSTEM = "system"


class RiskFactorKind(str, Enum):
    GEOPOLITICAL = "geopolitical"
    ECONOMIC = "economic"
    REGULATORY = "regulatory"
    THREAT_INTEL = "threat-intel"


_LABEL_RANKS = {"none": 0, "low": 1, "medium": 2, "high": 3}


class RiskLabel(str, Enum):
    """Categorical risk label with total order none < low < medium < high."""

    NONE = "none"
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def rank(self) -> int:
        return _LABEL_RANKS[self.value]

    def __lt__(self, other):  # type: ignore[override]
        if isinstance(other, RiskLabel):
            return self.rank < other.rank
        return NotImplemented

    def __le__(self, other):  # type: ignore[override]
        if isinstance(other, RiskLabel):
            return self.rank <= other.rank
        return NotImplemented

    def __gt__(self, other):  # type: ignore[override]
        if isinstance(other, RiskLabel):
            return self.rank > other.rank
        return NotImplemented

    def __ge__(self, other):  # type: ignore[override]
        if isinstance(other, RiskLabel):
            return self.rank >= other.rank
        return NotImplemented


@dataclass
class QualityTag:
    """Data-quality annotation carried from ingestion onto graph nodes."""

    completeness: float
    source_id: str


@dataclass
class Component:
    id: str
    name: str
    level: Level
    criticality: float
    quality: Optional[QualityTag] = None


@dataclass
class Vulnerability:
    id: str
    exists_on: str
    bindings: list[VariableBinding] = field(default_factory=list)
    quality: Optional[QualityTag] = None


@dataclass
class RiskFactor:
    id: str
    kind: RiskFactorKind
    label: RiskLabel
    targets: str
    description: str = ""


Scalar = Union[str, int, float, bool]


@dataclass
class ConfigurationParameter:
    id: str
    governs: str
    name: str
    value: Scalar


COMPARATORS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass
class Condition:
    """(parameter, comparator, literal) term of a constraint predicate."""

    parameter: str
    comparator: str
    value: Scalar

    def holds(self, actual: Scalar) -> bool:
        expected = self.value
        both_numeric = isinstance(actual, (int, float)) and isinstance(
            expected, (int, float)
        )
        if self.comparator == "=":
            return actual == expected
        if self.comparator == "!=":
            return actual != expected
        # Ordered comparators need comparable operands.
        if not both_numeric and not (
            isinstance(actual, str) and isinstance(expected, str)
        ):
            return False
        ops = {
            "<": actual < expected,
            "<=": actual <= expected,
            ">": actual > expected,
            ">=": actual >= expected,
        }
        return ops[self.comparator]


@dataclass
class Deactivate:
    vulnerability: str


@dataclass
class AdjustBinding:
    vulnerability: str
    variable: str
    raw: float


Effect = Union[Deactivate, AdjustBinding]


@dataclass
class ConstraintRule:
    id: str
    predicate: list[Condition]
    effect: Effect


@dataclass
class SourceDescriptor:
    id: str
    name: str
    attributes: dict = field(default_factory=dict)


@dataclass
class Violation:
    """One broken invariant: which rule, on which node/edge."""

    rule: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule}({self.subject}): {self.message}"


Node = Union[
    Component,
    Vulnerability,
    RiskFactor,
    ConfigurationParameter,
    ConstraintRule,
    SourceDescriptor,
]

_NODE_STORES = {
    Component: "components",
    Vulnerability: "vulnerabilities",
    RiskFactor: "risk_factors",
    ConfigurationParameter: "config_params",
    ConstraintRule: "constraint_rules",
    SourceDescriptor: "sources",
}

RELATIONS = ("enables", "depends_on", "part_of")


class MultiGraph:
    """Mutable model store; hand out copy() snapshots for concurrent reads."""

    def __init__(self):
        self.components: dict[str, Component] = {}
        self.vulnerabilities: dict[str, Vulnerability] = {}
        self.risk_factors: dict[str, RiskFactor] = {}
        self.config_params: dict[str, ConfigurationParameter] = {}
        self.constraint_rules: dict[str, ConstraintRule] = {}
        self.sources: dict[str, SourceDescriptor] = {}
        self.enables: set[tuple[str, str]] = set()
        self.depends_on: set[tuple[str, str]] = set()
        self.part_of: set[tuple[str, str]] = set()  # (child, parent)
        self.events: list["EventRecord"] = []
        self.feedback: FeedbackGraph = FeedbackGraph()

    # -- lookups ---------------------------------------------------------

    def _stores(self) -> Iterable[dict]:
        return (
            self.components,
            self.vulnerabilities,
            self.risk_factors,
            self.config_params,
            self.constraint_rules,
            self.sources,
        )

    def has_id(self, node_id: str) -> bool:
        return any(node_id in store for store in self._stores())

    def node(self, node_id: str) -> Node:
        for store in self._stores():
            if node_id in store:
                return store[node_id]
        raise KeyError(node_id)

    def parent_of(self, component_id: str) -> Optional[str]:
        for child, parent in self.part_of:
            if child == component_id:
                return parent
        return None

    def descendants(self, component_id: str) -> set[str]:
        """All components below component_id in the part_of forest."""
        children: dict[str, list[str]] = {}
        for child, parent in self.part_of:
            children.setdefault(parent, []).append(child)
        out: set[str] = set()
        frontier = [component_id]
        while frontier:
            current = frontier.pop()
            for child in children.get(current, ()):
                if child not in out:
                    out.add(child)
                    frontier.append(child)
        return out

    def vulnerabilities_on(self, component_id: str) -> list[Vulnerability]:
        """Vulnerabilities on the component or any part_of descendant, by id."""
        covered = {component_id} | self.descendants(component_id)
        found = [v for v in self.vulnerabilities.values() if v.exists_on in covered]
        return sorted(found, key=lambda v: v.id)

    def enables_predecessors(self, vuln_id: str) -> list[str]:
        return sorted(u for u, w in self.enables if w == vuln_id)

    def topological_vulnerabilities(self) -> list[str]:
        """Vulnerability ids in a topological order of the enables DAG.

        Deterministic: ready nodes are consumed in sorted id order.
        Raises GraphCycle if no such order exists.
        """
        order = _topological_order(set(self.vulnerabilities), self.enables)
        if order is None:
            raise GraphCycle("enables", _find_cycle_edge(self.enables))
        return order

    # -- mutations -------------------------------------------------------

    def add_node(self, node: Node) -> str:
        if type(node) not in _NODE_STORES:
            raise ClassMismatch("add_node", getattr(node, "id", "?"), "known node type")
        if self.has_id(node.id):
            raise DuplicateId(node.id)
        _check_node(node, self)
        getattr(self, _NODE_STORES[type(node)])[node.id] = node
        if isinstance(node, SourceDescriptor):
            self.feedback.sources.add(node.id)
        return node.id

    def add_edge(self, relation: str, from_id: str, to_id: str) -> None:
        if relation not in RELATIONS:
            raise ClassMismatch(relation, from_id, "known relation")
        if from_id == to_id:
            raise GraphCycle(relation, (from_id, to_id))
        if relation == "enables":
            self._require(self.vulnerabilities, from_id, relation, "Vulnerability")
            self._require(self.vulnerabilities, to_id, relation, "Vulnerability")
            candidate = self.enables | {(from_id, to_id)}
            if _topological_order(set(self.vulnerabilities), candidate) is None:
                raise GraphCycle(relation, (from_id, to_id))
            self.enables.add((from_id, to_id))
            return
        self._require(self.components, from_id, relation, "Component")
        self._require(self.components, to_id, relation, "Component")
        if relation == "depends_on":
            self.depends_on.add((from_id, to_id))
            return
        existing = self.parent_of(from_id)
        if existing is not None and existing != to_id:
            raise ForestViolation(from_id, (existing, to_id))
        candidate = self.part_of | {(from_id, to_id)}
        if _topological_order(set(self.components), candidate) is None:
            raise GraphCycle("part_of", (from_id, to_id))
        self.part_of.add((from_id, to_id))

    def remove_vulnerability(self, vuln_id: str) -> None:
        """Drop a vulnerability node and its incident enables edges."""
        if vuln_id not in self.vulnerabilities:
            raise DanglingReference("remove_vulnerability", vuln_id)
        del self.vulnerabilities[vuln_id]
        self.enables = {(u, w) for u, w in self.enables if vuln_id not in (u, w)}

    def _require(self, store: dict, node_id: str, relation: str, cls: str) -> None:
        if node_id not in store:
            if self.has_id(node_id):
                raise ClassMismatch(relation, node_id, cls)
            raise DanglingReference(relation, node_id)

    def copy(self) -> "MultiGraph":
        return copy.deepcopy(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return (
            self.components == other.components
            and self.vulnerabilities == other.vulnerabilities
            and self.risk_factors == other.risk_factors
            and self.config_params == other.config_params
            and self.constraint_rules == other.constraint_rules
            and self.sources == other.sources
            and self.enables == other.enables
            and self.depends_on == other.depends_on
            and self.part_of == other.part_of
            and self.events == other.events
            and self.feedback == other.feedback
        )

    # -- validation ------------------------------------------------------

    def validate(self) -> list[Violation]:
        """Every broken invariant, one Violation per rule per subject."""
        out: list[Violation] = []
        seen: dict[str, str] = {}
        for store_name in _NODE_STORES.values():
            for node_id in getattr(self, store_name):
                if node_id in seen:
                    out.append(
                        Violation(
                            "DuplicateId",
                            node_id,
                            f"id appears in {seen[node_id]} and {store_name}",
                        )
                    )
                else:
                    seen[node_id] = store_name

        for c in self.components.values():
            if not 0.0 <= c.criticality <= 1.0:
                out.append(
                    Violation("RangeViolation", c.id, f"criticality {c.criticality} outside [0,1]")
                )
            out.extend(_check_quality(c.id, c.quality))

        for v in self.vulnerabilities.values():
            if v.exists_on not in self.components:
                out.append(
                    Violation("DanglingReference", v.id, f"exists_on {v.exists_on!r} missing")
                )
            out.extend(_check_quality(v.id, v.quality))
            for b in v.bindings:
                if b.alpha <= 0:
                    out.append(
                        Violation("RangeViolation", v.id, f"binding {b.name!r} alpha {b.alpha} <= 0")
                    )
                if isinstance(b.raw, (int, float)) and b.raw < 0:
                    out.append(
                        Violation("RangeViolation", v.id, f"binding {b.name!r} raw {b.raw} < 0")
                    )

        for r in self.risk_factors.values():
            if r.targets not in self.components:
                out.append(
                    Violation("DanglingReference", r.id, f"targets {r.targets!r} missing")
                )

        for p in self.config_params.values():
            if p.governs not in self.components:
                out.append(
                    Violation("DanglingReference", p.id, f"governs {p.governs!r} missing")
                )

        for rule in self.constraint_rules.values():
            for cond in rule.predicate:
                if cond.parameter not in self.config_params:
                    out.append(
                        Violation("DanglingReference", rule.id, f"parameter {cond.parameter!r} missing")
                    )
                if cond.comparator not in COMPARATORS:
                    out.append(
                        Violation("ClassMismatch", rule.id, f"comparator {cond.comparator!r} unknown")
                    )
            target = rule.effect.vulnerability
            if target not in self.vulnerabilities:
                out.append(
                    Violation("DanglingReference", rule.id, f"effect vulnerability {target!r} missing")
                )

        out.extend(self._validate_edges())
        out.extend(self._validate_feedback())
        return out

    def _validate_edges(self) -> list[Violation]:
        out: list[Violation] = []
        for relation, store, cls in (
            ("enables", self.vulnerabilities, "Vulnerability"),
            ("depends_on", self.components, "Component"),
            ("part_of", self.components, "Component"),
        ):
            for u, w in sorted(getattr(self, relation)):
                subject = f"{u}->{w}"
                if u == w:
                    out.append(Violation("GraphCycle", subject, f"self-edge in {relation}"))
                for endpoint in (u, w):
                    if endpoint not in store:
                        if self.has_id(endpoint):
                            out.append(
                                Violation("ClassMismatch", subject, f"{relation} endpoint {endpoint!r} is not a {cls}")
                            )
                        else:
                            out.append(
                                Violation("DanglingReference", subject, f"{relation} endpoint {endpoint!r} missing")
                            )
        if _topological_order(set(self.vulnerabilities), self.enables) is None:
            out.append(Violation("GraphCycle", "enables", "enables subgraph has a cycle"))
        if _topological_order(set(self.components), self.part_of) is None:
            out.append(Violation("GraphCycle", "part_of", "part_of subgraph has a cycle"))
        parents: dict[str, set[str]] = {}
        for child, parent in self.part_of:
            parents.setdefault(child, set()).add(parent)
        for child, par in sorted(parents.items()):
            if len(par) > 1:
                out.append(
                    Violation("ForestViolation", child, f"component has {len(par)} part_of parents")
                )
        return out

    def _validate_feedback(self) -> list[Violation]:
        out: list[Violation] = []
        fb = self.feedback
        for source_id, plan_id in sorted(fb.contributes):
            if source_id not in fb.sources:
                out.append(
                    Violation("DanglingReference", f"{source_id}->{plan_id}", f"feedback source {source_id!r} missing")
                )
            if plan_id not in fb.plans:
                out.append(
                    Violation("DanglingReference", f"{source_id}->{plan_id}", f"feedback plan {plan_id!r} missing")
                )
        for plan_id, verdict in sorted(fb.verdicts.items()):
            if plan_id not in fb.plans:
                out.append(
                    Violation("DanglingReference", plan_id, "verdict on unknown plan")
                )
            if not -1.0 <= verdict <= 1.0:
                out.append(
                    Violation("RangeViolation", plan_id, f"verdict {verdict} outside [-1,1]")
                )
        return out


def _check_quality(subject: str, quality: Optional[QualityTag]) -> list[Violation]:
    if quality is None:
        return []
    if not 0.0 <= quality.completeness <= 1.0:
        return [
            Violation("RangeViolation", subject, f"completeness {quality.completeness} outside [0,1]")
        ]
    return []


def _check_node(node: Node, model: MultiGraph) -> None:
    """Raise if adding node would break an invariant."""
    if isinstance(node, Component):
        if not 0.0 <= node.criticality <= 1.0:
            raise RangeViolation(f"{node.id}.criticality", node.criticality, "[0,1]")
        _check_quality_raises(node.id, node.quality)
    elif isinstance(node, Vulnerability):
        if node.exists_on not in model.components:
            raise DanglingReference(node.id, node.exists_on)
        _check_quality_raises(node.id, node.quality)
        for b in node.bindings:
            if b.alpha <= 0:
                raise RangeViolation(f"{node.id}.bindings[{b.name}].alpha", b.alpha, "(0,inf)")
            if isinstance(b.raw, (int, float)) and b.raw < 0:
                raise RangeViolation(f"{node.id}.bindings[{b.name}].raw", b.raw, "[0,inf)")
    elif isinstance(node, RiskFactor):
        if node.targets not in model.components:
            raise DanglingReference(node.id, node.targets)
    elif isinstance(node, ConfigurationParameter):
        if node.governs not in model.components:
            raise DanglingReference(node.id, node.governs)
    elif isinstance(node, ConstraintRule):
        for cond in node.predicate:
            if cond.parameter not in model.config_params:
                raise DanglingReference(node.id, cond.parameter)
            if cond.comparator not in COMPARATORS:
                raise RangeViolation(f"{node.id}.comparator", cond.comparator, str(COMPARATORS))
        if node.effect.vulnerability not in model.vulnerabilities:
            raise DanglingReference(node.id, node.effect.vulnerability)


def _check_quality_raises(subject: str, quality: Optional[QualityTag]) -> None:
    if quality is not None and not 0.0 <= quality.completeness <= 1.0:
        raise RangeViolation(f"{subject}.quality.completeness", quality.completeness, "[0,1]")


def _topological_order(
    nodes: set[str], edges: set[tuple[str, str]]
) -> Optional[list[str]]:
    """Kahn's algorithm; ready set consumed in sorted order. None on cycle.

    Edge endpoints outside `nodes` are ignored so validation can report
    dangling endpoints separately.
    """
    indegree = {n: 0 for n in nodes}
    successors: dict[str, list[str]] = {n: [] for n in nodes}
    for u, w in edges:
        if u in nodes and w in nodes:
            indegree[w] += 1
            successors[u].append(w)
    ready = sorted((n for n, deg in indegree.items() if deg == 0), reverse=True)
    order: list[str] = []
    while ready:
        current = ready.pop()
        order.append(current)
        changed = False
        for succ in successors[current]:
            indegree[succ] -= 1
            if indegree[succ] == 0:
                ready.append(succ)
                changed = True
        if changed:
            ready.sort(reverse=True)
    if len(order) != len(nodes):
        return None
    return order


def _find_cycle_edge(edges: set[tuple[str, str]]) -> tuple[str, str]:
    return min(edges) if edges else ("?", "?")
