"""Normalized record format, input adapters, and model persistence.

The normalized cyber record (NCR) is a flat JSON object with typed
key-value attributes plus quality and provenance blocks; one array of
NCRs describes a whole model.  build_model links records in two passes
so record order never matters, and save_model emits a canonical
snapshot (sorted keys, sorted node lists, shortest round-trip floats)
so identical models always serialize to identical bytes.

File formats:
  *.ncr.json    JSON array of NCR objects (UTF-8)
  *.model.json  canonical model snapshot
  *.csv         component inventory, header: id,name,level,criticality
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Optional, Union

from .bindings import (
    TransformKind,
    TransformSpec,
    VariableBinding,
    VariableClass,
    VARIABLE_DEFAULTS,
)
from .context import EventRecord, event_from_dict, event_to_dict
from .errors import (
    DuplicateId,
    MalformedInput,
    RangeViolation,
    RiskGraphError,
    SchemaViolation,
)
from .graph import (
    AdjustBinding,
    Component,
    Condition,
    ConfigurationParameter,
    ConstraintRule,
    Deactivate,
    Level,
    MultiGraph,
    QualityTag,
    RiskFactor,
    RiskFactorKind,
    RiskLabel,
    SourceDescriptor,
    Vulnerability,
)

MODEL_FORMAT = "riskgraph.model/1"


class RecordType(str, Enum):
    VULNERABILITY = "vulnerability"
    COMPONENT = "component"
    CONFIGURATION = "configuration"
    RISK_FACTOR = "risk_factor"
    EVENT = "event"
    PLAN = "plan"
    SOURCE = "source"


@dataclass
class Provenance:
    adapter: str
    ingested_at: str


@dataclass
class NormalizedRecord:
    """One normalized cyber record (NCR)."""

    id: str
    record_type: RecordType
    attributes: dict
    quality: QualityTag
    provenance: Provenance


# Required attribute keys per record type; values checked as text ("t"),
# number ("n"), scalar ("s") or list ("l").
REQUIRED_ATTRIBUTES: dict[RecordType, dict[str, str]] = {
    RecordType.COMPONENT: {"name": "t", "level": "t", "criticality": "n"},
    RecordType.VULNERABILITY: {"exists_on": "t"},
    RecordType.CONFIGURATION: {"governs": "t", "name": "t", "value": "s"},
    RecordType.RISK_FACTOR: {"kind": "t", "label": "t", "targets": "t"},
    RecordType.EVENT: {"trigger": "t", "sentiment": "t", "summary": "t", "timestamp": "t"},
    RecordType.PLAN: {},
    RecordType.SOURCE: {"name": "t"},
}


def _check_type(where: str, value, spec: str) -> None:
    if spec == "t" and not isinstance(value, str):
        raise SchemaViolation(where, "expected text")
    if spec == "n" and (isinstance(value, bool) or not isinstance(value, (int, float))):
        raise SchemaViolation(where, "expected a number")
    if spec == "s" and not isinstance(value, (str, int, float, bool)):
        raise SchemaViolation(where, "expected a scalar")
    if spec == "l" and not isinstance(value, list):
        raise SchemaViolation(where, "expected a list")


def record_from_dict(obj: dict, where: str = "record") -> NormalizedRecord:
    if not isinstance(obj, dict):
        raise SchemaViolation(where, "expected an object")
    for key in ("id", "record_type", "attributes", "quality", "provenance"):
        if key not in obj:
            raise SchemaViolation(f"{where}.{key}", "required field missing")
    if not isinstance(obj["id"], str) or not obj["id"]:
        raise SchemaViolation(f"{where}.id", "expected non-empty text")
    try:
        rtype = RecordType(obj["record_type"])
    except ValueError:
        raise SchemaViolation(
            f"{where}.record_type", f"unknown record type {obj['record_type']!r}"
        ) from None

    attrs = obj["attributes"]
    if not isinstance(attrs, dict):
        raise SchemaViolation(f"{where}.attributes", "expected an object")
    for key, value in attrs.items():
        if not isinstance(value, (str, int, float, bool, list)):
            raise SchemaViolation(
                f"{where}.attributes.{key}", "expected text, number, or list"
            )
    for key, spec in REQUIRED_ATTRIBUTES[rtype].items():
        if key not in attrs:
            raise SchemaViolation(f"{where}.attributes.{key}", "required field missing")
        _check_type(f"{where}.attributes.{key}", attrs[key], spec)

    quality = obj["quality"]
    if not isinstance(quality, dict):
        raise SchemaViolation(f"{where}.quality", "expected an object")
    completeness = quality.get("completeness")
    if isinstance(completeness, bool) or not isinstance(completeness, (int, float)):
        raise SchemaViolation(f"{where}.quality.completeness", "expected a number")
    if not 0.0 <= completeness <= 1.0:
        raise SchemaViolation(
            f"{where}.quality.completeness", f"{completeness} outside [0,1]"
        )
    source_id = quality.get("source_id")
    if not isinstance(source_id, str):
        raise SchemaViolation(f"{where}.quality.source_id", "expected text")

    prov = obj["provenance"]
    if not isinstance(prov, dict):
        raise SchemaViolation(f"{where}.provenance", "expected an object")
    for key in ("adapter", "ingested_at"):
        if not isinstance(prov.get(key), str):
            raise SchemaViolation(f"{where}.provenance.{key}", "expected text")

    return NormalizedRecord(
        id=obj["id"],
        record_type=rtype,
        attributes=dict(attrs),
        quality=QualityTag(completeness=float(completeness), source_id=source_id),
        provenance=Provenance(adapter=prov["adapter"], ingested_at=prov["ingested_at"]),
    )


def record_to_dict(record: NormalizedRecord) -> dict:
    return {
        "id": record.id,
        "record_type": record.record_type.value,
        "attributes": record.attributes,
        "quality": {
            "completeness": record.quality.completeness,
            "source_id": record.quality.source_id,
        },
        "provenance": {
            "adapter": record.provenance.adapter,
            "ingested_at": record.provenance.ingested_at,
        },
    }


def parse_ncr(text: Union[str, bytes]) -> list[NormalizedRecord]:
    """Parse an NCR array, rejecting on the first schema violation."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, list):
        raise MalformedInput("expected a JSON array of record objects")
    return [record_from_dict(obj, f"records[{i}]") for i, obj in enumerate(data)]


def serialize_ncr(records: list[NormalizedRecord]) -> str:
    """Canonical NCR text: record order preserved, keys sorted."""
    doc = [record_to_dict(r) for r in records]
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def _utcnow() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def adapt_csv_inventory(
    text: Union[str, bytes], ingested_at: Optional[str] = None
) -> list[NormalizedRecord]:
    """Component NCRs from a CSV inventory (header id,name,level,criticality)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    stamp = ingested_at or _utcnow()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedInput("empty CSV inventory") from None
    if [h.strip() for h in header] != ["id", "name", "level", "criticality"]:
        raise MalformedInput(
            f"expected header 'id,name,level,criticality', got {','.join(header)!r}"
        )
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise MalformedInput(f"line {lineno}: expected 4 fields, got {len(row)}")
        raw_id, name, level, criticality_text = (cell.strip() for cell in row)
        try:
            Level(level)
        except ValueError:
            raise MalformedInput(f"line {lineno}: unknown level {level!r}") from None
        try:
            criticality = float(criticality_text)
        except ValueError:
            raise MalformedInput(
                f"line {lineno}: criticality {criticality_text!r} is not a number"
            ) from None
        if not 0.0 <= criticality <= 1.0:
            raise RangeViolation(f"line {lineno}: criticality", criticality, "[0,1]")
        records.append(
            NormalizedRecord(
                id=raw_id,
                record_type=RecordType.COMPONENT,
                attributes={"name": name, "level": level, "criticality": criticality},
                quality=QualityTag(completeness=1.0, source_id="csv-inventory"),
                provenance=Provenance(adapter="csv-inventory", ingested_at=stamp),
            )
        )
    return records


# -- record -> graph ------------------------------------------------------


def _binding_from_dict(obj: dict, where: str) -> VariableBinding:
    if not isinstance(obj, dict):
        raise SchemaViolation(where, "expected a binding object")
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise SchemaViolation(f"{where}.name", "expected non-empty text")
    defaults = VARIABLE_DEFAULTS.get(name)
    klass_text = obj.get("klass", defaults.klass.value if defaults else None)
    if klass_text is None:
        raise SchemaViolation(f"{where}.klass", "required for unknown variable names")
    try:
        klass = VariableClass(klass_text)
    except ValueError:
        raise SchemaViolation(f"{where}.klass", f"unknown class {klass_text!r}") from None
    alpha = obj.get("alpha", defaults.alpha if defaults else 1.0)
    if isinstance(alpha, bool) or not isinstance(alpha, (int, float)):
        raise SchemaViolation(f"{where}.alpha", "expected a number")
    raw = obj.get("raw", 0.0)
    if isinstance(raw, bool) or not isinstance(raw, (int, float, list)):
        raise SchemaViolation(f"{where}.raw", "expected a number or list")
    transform = obj.get("transform")
    if transform is None:
        spec = defaults.transform if defaults else TransformSpec()
    else:
        spec = _transform_from_value(transform, f"{where}.transform")
    return VariableBinding(name=name, klass=klass, raw=raw, alpha=float(alpha), transform=spec)


def _transform_from_value(value, where: str) -> TransformSpec:
    if isinstance(value, str):
        kind_text, k = value, 1.0
    elif isinstance(value, dict):
        kind_text = value.get("kind", "identity")
        k = value.get("k", 1.0)
    else:
        raise SchemaViolation(where, "expected a transform name or object")
    try:
        kind = TransformKind(kind_text)
    except ValueError:
        raise SchemaViolation(where, f"unknown transform {kind_text!r}") from None
    if isinstance(k, bool) or not isinstance(k, (int, float)):
        raise SchemaViolation(f"{where}.k", "expected a number")
    return TransformSpec(kind, float(k))


def _binding_to_dict(b: VariableBinding) -> dict:
    return {
        "name": b.name,
        "klass": b.klass.value,
        "raw": b.raw,
        "alpha": b.alpha,
        "transform": {"kind": b.transform.kind.value, "k": b.transform.k},
    }


def _enum_attr(record: NormalizedRecord, key: str, enum_cls, where: str):
    value = record.attributes[key]
    try:
        return enum_cls(value)
    except ValueError:
        raise SchemaViolation(where, f"unknown {key} {value!r}") from None


def build_model(records: list[NormalizedRecord]) -> MultiGraph:
    """Link validated records into a model; record order never matters."""
    ids_seen: set[str] = set()
    for record in records:
        if record.id in ids_seen:
            raise DuplicateId(record.id)
        ids_seen.add(record.id)

    by_type: dict[RecordType, list[NormalizedRecord]] = {t: [] for t in RecordType}
    for record in records:
        by_type[record.record_type].append(record)
    for bucket in by_type.values():
        bucket.sort(key=lambda r: r.id)

    model = MultiGraph()

    for record in by_type[RecordType.COMPONENT]:
        attrs = record.attributes
        model.add_node(
            Component(
                id=record.id,
                name=attrs["name"],
                level=_enum_attr(record, "level", Level, f"{record.id}.level"),
                criticality=float(attrs["criticality"]),
                quality=record.quality,
            )
        )
    for record in by_type[RecordType.SOURCE]:
        model.add_node(
            SourceDescriptor(
                id=record.id,
                name=record.attributes["name"],
                attributes={
                    k: v for k, v in record.attributes.items() if k != "name"
                },
            )
        )
    for record in by_type[RecordType.VULNERABILITY]:
        bindings = [
            _binding_from_dict(obj, f"{record.id}.bindings[{i}]")
            for i, obj in enumerate(record.attributes.get("bindings", []))
        ]
        model.add_node(
            Vulnerability(
                id=record.id,
                exists_on=record.attributes["exists_on"],
                bindings=bindings,
                quality=record.quality,
            )
        )
    for record in by_type[RecordType.RISK_FACTOR]:
        model.add_node(
            RiskFactor(
                id=record.id,
                kind=_enum_attr(record, "kind", RiskFactorKind, f"{record.id}.kind"),
                label=_enum_attr(record, "label", RiskLabel, f"{record.id}.label"),
                targets=record.attributes["targets"],
                description=str(record.attributes.get("description", "")),
            )
        )
    for record in by_type[RecordType.CONFIGURATION]:
        attrs = record.attributes
        model.add_node(
            ConfigurationParameter(
                id=record.id, governs=attrs["governs"], name=attrs["name"], value=attrs["value"]
            )
        )
    # Constraint rules ride on configuration records; they reference both
    # parameters and vulnerabilities, so they link last.
    for record in by_type[RecordType.CONFIGURATION]:
        rules = record.attributes.get("constraints", [])
        for i, obj in enumerate(rules):
            model.add_node(_rule_from_dict(obj, f"{record.id}.constraints[{i}]"))

    # Second pass: relation attributes become edges.
    for record in by_type[RecordType.VULNERABILITY]:
        for target in record.attributes.get("enables", []):
            if not isinstance(target, str):
                raise SchemaViolation(f"{record.id}.enables", "expected a list of ids")
            model.add_edge("enables", record.id, target)
    for record in by_type[RecordType.COMPONENT]:
        parent = record.attributes.get("part_of")
        if parent is not None:
            model.add_edge("part_of", record.id, parent)
        for dep in record.attributes.get("depends_on", []):
            if not isinstance(dep, str):
                raise SchemaViolation(f"{record.id}.depends_on", "expected a list of ids")
            model.add_edge("depends_on", record.id, dep)

    for record in by_type[RecordType.EVENT]:
        payload = dict(record.attributes)
        payload["id"] = record.id
        model.events.append(event_from_dict(payload, record.id))
    model.events.sort(key=lambda e: e.id)

    for record in by_type[RecordType.PLAN]:
        contributors = record.attributes.get("contributors", [])
        if not isinstance(contributors, list) or not all(
            isinstance(c, str) for c in contributors
        ):
            raise SchemaViolation(f"{record.id}.contributors", "expected a list of ids")
        model.feedback.add_plan(record.id, set(contributors))
        verdict = record.attributes.get("verdict")
        if verdict is not None:
            if isinstance(verdict, bool) or not isinstance(verdict, (int, float)):
                raise SchemaViolation(f"{record.id}.verdict", "expected a number")
            if not -1.0 <= verdict <= 1.0:
                raise RangeViolation(f"{record.id}.verdict", verdict, "[-1,1]")
            model.feedback.verdicts[record.id] = float(verdict)

    return model


def _rule_from_dict(obj: dict, where: str) -> ConstraintRule:
    if not isinstance(obj, dict):
        raise SchemaViolation(where, "expected a rule object")
    rule_id = obj.get("id")
    if not isinstance(rule_id, str) or not rule_id:
        raise SchemaViolation(f"{where}.id", "expected non-empty text")
    predicate = []
    conditions = obj.get("predicate", [])
    if not isinstance(conditions, list):
        raise SchemaViolation(f"{where}.predicate", "expected a list of conditions")
    for i, cond in enumerate(conditions):
        if not isinstance(cond, dict):
            raise SchemaViolation(f"{where}.predicate[{i}]", "expected an object")
        predicate.append(
            Condition(
                parameter=cond.get("parameter", ""),
                comparator=cond.get("comparator", "="),
                value=cond.get("value", ""),
            )
        )
    effect = obj.get("effect")
    if not isinstance(effect, dict) or "kind" not in effect:
        raise SchemaViolation(f"{where}.effect", "expected an effect object with a kind")
    if effect["kind"] == "deactivate":
        parsed: Union[Deactivate, AdjustBinding] = Deactivate(
            vulnerability=effect.get("vulnerability", "")
        )
    elif effect["kind"] == "adjust_binding":
        raw = effect.get("raw", 0.0)
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise SchemaViolation(f"{where}.effect.raw", "expected a number")
        parsed = AdjustBinding(
            vulnerability=effect.get("vulnerability", ""),
            variable=effect.get("variable", ""),
            raw=float(raw),
        )
    else:
        raise SchemaViolation(f"{where}.effect.kind", f"unknown effect {effect['kind']!r}")
    return ConstraintRule(id=rule_id, predicate=predicate, effect=parsed)


def _rule_to_dict(rule: ConstraintRule) -> dict:
    if isinstance(rule.effect, Deactivate):
        effect = {"kind": "deactivate", "vulnerability": rule.effect.vulnerability}
    else:
        effect = {
            "kind": "adjust_binding",
            "vulnerability": rule.effect.vulnerability,
            "variable": rule.effect.variable,
            "raw": rule.effect.raw,
        }
    return {
        "id": rule.id,
        "predicate": [
            {"parameter": c.parameter, "comparator": c.comparator, "value": c.value}
            for c in rule.predicate
        ],
        "effect": effect,
    }


# -- model snapshot -------------------------------------------------------


def _quality_to_dict(quality: Optional[QualityTag]) -> Optional[dict]:
    if quality is None:
        return None
    return {"completeness": quality.completeness, "source_id": quality.source_id}


def _quality_from_dict(obj, where: str) -> Optional[QualityTag]:
    if obj is None:
        return None
    if not isinstance(obj, dict):
        raise MalformedInput(f"{where}: expected a quality object")
    return QualityTag(
        completeness=float(obj.get("completeness", 1.0)),
        source_id=str(obj.get("source_id", "")),
    )


def model_to_dict(model: MultiGraph) -> dict:
    """Canonical JSON-ready form: every list sorted by id."""
    return {
        "format": MODEL_FORMAT,
        "components": [
            {
                "id": c.id,
                "name": c.name,
                "level": c.level.value,
                "criticality": c.criticality,
                "quality": _quality_to_dict(c.quality),
            }
            for c in sorted(model.components.values(), key=lambda n: n.id)
        ],
        "vulnerabilities": [
            {
                "id": v.id,
                "exists_on": v.exists_on,
                "bindings": [_binding_to_dict(b) for b in v.bindings],
                "quality": _quality_to_dict(v.quality),
            }
            for v in sorted(model.vulnerabilities.values(), key=lambda n: n.id)
        ],
        "risk_factors": [
            {
                "id": r.id,
                "kind": r.kind.value,
                "label": r.label.value,
                "targets": r.targets,
                "description": r.description,
            }
            for r in sorted(model.risk_factors.values(), key=lambda n: n.id)
        ],
        "config_params": [
            {"id": p.id, "governs": p.governs, "name": p.name, "value": p.value}
            for p in sorted(model.config_params.values(), key=lambda n: n.id)
        ],
        "constraint_rules": [
            _rule_to_dict(model.constraint_rules[rule_id])
            for rule_id in sorted(model.constraint_rules)
        ],
        "sources": [
            {"id": s.id, "name": s.name, "attributes": s.attributes}
            for s in sorted(model.sources.values(), key=lambda n: n.id)
        ],
        "edges": {
            "enables": [list(e) for e in sorted(model.enables)],
            "depends_on": [list(e) for e in sorted(model.depends_on)],
            "part_of": [list(e) for e in sorted(model.part_of)],
        },
        "events": [event_to_dict(e) for e in sorted(model.events, key=lambda e: e.id)],
        "feedback": {
            "sources": sorted(model.feedback.sources),
            "plans": sorted(model.feedback.plans),
            "contributes": [list(e) for e in sorted(model.feedback.contributes)],
            "verdicts": {k: model.feedback.verdicts[k] for k in sorted(model.feedback.verdicts)},
        },
    }


def save_model(model: MultiGraph) -> bytes:
    """Canonical snapshot bytes; refuses models that fail validation."""
    violations = model.validate()
    if violations:
        raise MalformedInput(f"model fails validation: {violations[0]}")
    doc = model_to_dict(model)
    return (json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n").encode(
        "utf-8"
    )


def model_from_dict(doc: dict) -> MultiGraph:
    model = MultiGraph()
    try:
        for obj in doc.get("components", []):
            model.components[obj["id"]] = Component(
                id=obj["id"],
                name=obj["name"],
                level=Level(obj["level"]),
                criticality=float(obj["criticality"]),
                quality=_quality_from_dict(obj.get("quality"), obj["id"]),
            )
        for obj in doc.get("vulnerabilities", []):
            model.vulnerabilities[obj["id"]] = Vulnerability(
                id=obj["id"],
                exists_on=obj["exists_on"],
                bindings=[
                    _binding_from_dict(b, f"{obj['id']}.bindings[{i}]")
                    for i, b in enumerate(obj.get("bindings", []))
                ],
                quality=_quality_from_dict(obj.get("quality"), obj["id"]),
            )
        for obj in doc.get("risk_factors", []):
            model.risk_factors[obj["id"]] = RiskFactor(
                id=obj["id"],
                kind=RiskFactorKind(obj["kind"]),
                label=RiskLabel(obj["label"]),
                targets=obj["targets"],
                description=obj.get("description", ""),
            )
        for obj in doc.get("config_params", []):
            model.config_params[obj["id"]] = ConfigurationParameter(
                id=obj["id"], governs=obj["governs"], name=obj["name"], value=obj["value"]
            )
        for obj in doc.get("constraint_rules", []):
            model.constraint_rules[obj["id"]] = _rule_from_dict(obj, obj.get("id", "rule"))
        for obj in doc.get("sources", []):
            model.sources[obj["id"]] = SourceDescriptor(
                id=obj["id"], name=obj["name"], attributes=obj.get("attributes", {})
            )
        edges = doc.get("edges", {})
        model.enables = {tuple(e) for e in edges.get("enables", [])}
        model.depends_on = {tuple(e) for e in edges.get("depends_on", [])}
        model.part_of = {tuple(e) for e in edges.get("part_of", [])}
        model.events = [event_from_dict(e, e.get("id", "event")) for e in doc.get("events", [])]
        fb = doc.get("feedback", {})
        model.feedback.sources = set(fb.get("sources", []))
        model.feedback.plans = set(fb.get("plans", []))
        model.feedback.contributes = {tuple(e) for e in fb.get("contributes", [])}
        model.feedback.verdicts = {k: float(v) for k, v in fb.get("verdicts", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"malformed model snapshot: {exc}") from exc
    return model


def load_model(data: Union[str, bytes]) -> MultiGraph:
    """Parse a model snapshot; raises MalformedInput on any defect."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput("expected a model snapshot object")
    if doc.get("format") != MODEL_FORMAT:
        raise MalformedInput(f"unsupported snapshot format {doc.get('format')!r}")
    try:
        model = model_from_dict(doc)
    except RiskGraphError:
        raise
    except Exception as exc:  # defensively surface any decode bug as input error
        raise MalformedInput(f"malformed model snapshot: {exc}") from exc
    violations = model.validate()
    if violations:
        raise MalformedInput(f"snapshot fails validation: {violations[0]}")
    return model
