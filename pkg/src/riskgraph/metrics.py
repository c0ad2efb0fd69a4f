"""Exploitation-likelihood and exposure metrics over the model.

Each score combines its up-class factors as a complementary product
(noisy-OR): 1 - exp(-sum of alpha*f(raw)).  For a single up-variable
this is exactly the per-binding factor form, and adding or raising any
up-variable can only raise the score.  Down-class factors multiply in
as exp(-alpha*f(raw)), so raising them can only lower the score.  Both
scores land in [0, 1].

reach(v) composes likelihood along the best enables chain into v, and
total_risk sums reach * exposure * criticality over active
vulnerabilities.  Constraint rules whose predicates hold against the
current configuration are applied first: binding adjustments feed the
scores, deactivations zero out a vulnerability's risk term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .bindings import VariableBinding, VariableClass
from .errors import DanglingReference, InvalidBinding, MissingVariables
from .graph import AdjustBinding, ConstraintRule, Deactivate, MultiGraph, Vulnerability

VulnRef = Union[str, Vulnerability]


@dataclass
class VulnerabilityMetrics:
    """Computed per-vulnerability scores."""

    rho: float
    ef: float
    reach: float
    risk_contribution: float
    active: bool = True


def satisfied_rules(model: MultiGraph) -> list[ConstraintRule]:
    """Constraint rules whose whole predicate holds, in id order.

    A condition on a missing parameter never holds; an empty predicate
    always does.
    """
    hits = []
    for rule_id in sorted(model.constraint_rules):
        rule = model.constraint_rules[rule_id]
        ok = True
        for cond in rule.predicate:
            param = model.config_params.get(cond.parameter)
            if param is None or not cond.holds(param.value):
                ok = False
                break
        if ok:
            hits.append(rule)
    return hits


@dataclass
class _RuleEffects:
    # (vulnerability id, variable name) -> overriding raw value
    adjustments: dict[tuple[str, str], float]
    deactivated: set[str]


def _rule_effects(model: MultiGraph) -> _RuleEffects:
    adjustments: dict[tuple[str, str], float] = {}
    deactivated: set[str] = set()
    for rule in satisfied_rules(model):
        eff = rule.effect
        if isinstance(eff, Deactivate):
            deactivated.add(eff.vulnerability)
        elif isinstance(eff, AdjustBinding):
            adjustments[(eff.vulnerability, eff.variable)] = eff.raw
    return _RuleEffects(adjustments, deactivated)


def effective_bindings(v: Vulnerability, model: MultiGraph) -> list[VariableBinding]:
    """v's bindings with satisfied adjust_binding effects applied (id order)."""
    return _adjusted_bindings(v, _rule_effects(model))


def _adjusted_bindings(v: Vulnerability, effects: _RuleEffects) -> list[VariableBinding]:
    out = []
    for b in v.bindings:
        override = effects.adjustments.get((v.id, b.name))
        if override is None:
            out.append(b)
        else:
            out.append(VariableBinding(b.name, b.klass, override, b.alpha, b.transform))
    return out


def is_active(v: VulnRef, model: MultiGraph) -> bool:
    """False iff a satisfied constraint rule deactivates the vulnerability."""
    return _resolve(v, model).id not in _rule_effects(model).deactivated


def _exponent(b: VariableBinding) -> float:
    """alpha * f(raw) with the same validity checks factor() applies."""
    if b.alpha <= 0:
        raise InvalidBinding(b.name, f"alpha must be > 0, got {b.alpha}")
    value = b.transform(b.raw)
    if value < 0:
        raise InvalidBinding(b.name, f"transformed raw must be >= 0, got {value}")
    return b.alpha * value


def _score_bindings(
    vuln_id: str,
    bindings: list[VariableBinding],
    up: VariableClass,
    down: VariableClass,
) -> float:
    up_exponent = 0.0
    has_up = False
    down_product = 1.0
    for b in bindings:
        if b.klass is up:
            has_up = True
            up_exponent += _exponent(b)
        elif b.klass is down:
            down_product *= math.exp(-_exponent(b))
    if not has_up:
        raise MissingVariables(vuln_id, up.value)
    return (1.0 - math.exp(-up_exponent)) * down_product


def rho(v: VulnRef, model: MultiGraph) -> float:
    """Exploitation likelihood: product of likelihood-class factors."""
    vuln = _resolve(v, model)
    bindings = _adjusted_bindings(vuln, _rule_effects(model))
    return _score_bindings(vuln.id, bindings, VariableClass.L_UP, VariableClass.L_DOWN)


def ef(v: VulnRef, model: MultiGraph) -> float:
    """Exposure factor: product of exposure-class factors."""
    vuln = _resolve(v, model)
    bindings = _adjusted_bindings(vuln, _rule_effects(model))
    return _score_bindings(vuln.id, bindings, VariableClass.E_UP, VariableClass.E_DOWN)


def _rho_all(model: MultiGraph, effects: _RuleEffects) -> dict[str, float]:
    out = {}
    for vuln_id in sorted(model.vulnerabilities):
        vuln = model.vulnerabilities[vuln_id]
        bindings = _adjusted_bindings(vuln, effects)
        out[vuln_id] = _score_bindings(
            vuln_id, bindings, VariableClass.L_UP, VariableClass.L_DOWN
        )
    return out


def reach_all(model: MultiGraph) -> dict[str, float]:
    """Best-chain likelihood for every vulnerability, in topological order.

    reach(v) = rho(v) for roots, else rho(v) * max reach over enabling
    predecessors: the attacker's best multi-step path into v.
    """
    return _reach_from(model, _rho_all(model, _rule_effects(model)))


def _reach_from(model: MultiGraph, rho_map: dict[str, float]) -> dict[str, float]:
    out: dict[str, float] = {}
    for vuln_id in model.topological_vulnerabilities():
        likelihood = rho_map[vuln_id]
        preds = model.enables_predecessors(vuln_id)
        if preds:
            likelihood *= max(out[u] for u in preds)
        out[vuln_id] = likelihood
    return out


def reach(v: VulnRef, model: MultiGraph) -> float:
    return reach_all(model)[_resolve(v, model).id]


def total_risk(model: MultiGraph) -> float:
    """Sum of reach * exposure * criticality over active vulnerabilities."""
    return sum(m.risk_contribution for m in evaluate(model).values())


def evaluate(model: MultiGraph) -> dict[str, VulnerabilityMetrics]:
    """All per-vulnerability metrics, keyed and summed in id order."""
    effects = _rule_effects(model)
    rho_map = _rho_all(model, effects)
    reaches = _reach_from(model, rho_map)
    out: dict[str, VulnerabilityMetrics] = {}
    for vuln_id in sorted(model.vulnerabilities):
        vuln = model.vulnerabilities[vuln_id]
        component = model.components.get(vuln.exists_on)
        if component is None:
            raise DanglingReference(vuln_id, vuln.exists_on)
        bindings = _adjusted_bindings(vuln, effects)
        exposure = _score_bindings(
            vuln_id, bindings, VariableClass.E_UP, VariableClass.E_DOWN
        )
        active = vuln_id not in effects.deactivated
        contribution = (
            reaches[vuln_id] * exposure * component.criticality if active else 0.0
        )
        out[vuln_id] = VulnerabilityMetrics(
            rho=rho_map[vuln_id],
            ef=exposure,
            reach=reaches[vuln_id],
            risk_contribution=contribution,
            active=active,
        )
    return out


def _resolve(v: VulnRef, model: MultiGraph) -> Vulnerability:
    if isinstance(v, Vulnerability):
        return v
    vuln = model.vulnerabilities.get(v)
    if vuln is None:
        raise DanglingReference("metrics", v)
    return vuln
