"""Variable bindings and the per-variable factor machinery.

Each binding contributes one multiplicative factor in [0, 1] to a
vulnerability's likelihood or exposure score.  Up-class variables use
1 - exp(-alpha * f(raw)) so the factor grows toward 1 with diminishing
returns; down-class variables use exp(-alpha * f(raw)) so growing raw
values shrink the factor toward 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .errors import InvalidBinding

RawValue = Union[float, int, list, tuple, set, frozenset]


class VariableClass(str, Enum):
    """Which score a variable influences, and in which direction."""

    L_UP = "l_up"
    L_DOWN = "l_down"
    E_UP = "e_up"
    E_DOWN = "e_down"

    @property
    def is_up(self) -> bool:
        return self in (VariableClass.L_UP, VariableClass.E_UP)

    @property
    def is_likelihood(self) -> bool:
        return self in (VariableClass.L_UP, VariableClass.L_DOWN)


class TransformKind(str, Enum):
    IDENTITY = "identity"
    SCALE = "scale"
    CARDINALITY = "cardinality"
    LOG1P = "log1p"


@dataclass(frozen=True)
class TransformSpec:
    """Monotone non-decreasing value conversion with f(0) = 0."""

    kind: TransformKind = TransformKind.IDENTITY
    k: float = 1.0  # divisor, used by SCALE only

    def __post_init__(self):
        if self.kind is TransformKind.SCALE and self.k <= 0:
            raise InvalidBinding("transform", f"scale divisor must be > 0, got {self.k}")
        object.__setattr__(self, "k", float(self.k))  # canonical serialization

    def __call__(self, raw: RawValue) -> float:
        if self.kind is TransformKind.CARDINALITY:
            # Accepts a collection (counted here) or an already-counted number.
            if isinstance(raw, (list, tuple, set, frozenset)):
                return float(len(raw))
            return float(raw)
        if isinstance(raw, (list, tuple, set, frozenset)):
            raise InvalidBinding(
                "transform", f"{self.kind.value} expects a scalar, got a collection"
            )
        x = float(raw)
        if self.kind is TransformKind.IDENTITY:
            return x
        if self.kind is TransformKind.SCALE:
            return x / self.k
        return math.log1p(x)


IDENTITY = TransformSpec(TransformKind.IDENTITY)
CARDINALITY = TransformSpec(TransformKind.CARDINALITY)


def scale(k: float) -> TransformSpec:
    return TransformSpec(TransformKind.SCALE, k)


@dataclass
class VariableBinding:
    """One variable attached to a vulnerability: class, raw value, tuning."""

    name: str
    klass: VariableClass
    raw: RawValue = 0.0
    alpha: float = 1.0
    transform: TransformSpec = field(default_factory=lambda: IDENTITY)

    def __post_init__(self):
        # Canonicalize set-valued raws so serialization and equality are
        # deterministic regardless of how the caller built the value.
        if isinstance(self.raw, (set, frozenset, tuple)):
            self.raw = sorted(self.raw, key=repr)


def factor(binding: VariableBinding) -> float:
    """Evaluate one binding's multiplicative contribution, in [0, 1]."""
    if binding.alpha <= 0:
        raise InvalidBinding(binding.name, f"alpha must be > 0, got {binding.alpha}")
    value = binding.transform(binding.raw)
    if value < 0:
        raise InvalidBinding(binding.name, f"transformed raw must be >= 0, got {value}")
    if binding.klass.is_up:
        return 1.0 - math.exp(-binding.alpha * value)
    return math.exp(-binding.alpha * value)


# Calibration defaults per well-known variable name.  Unknown variables
# default to alpha=1.0 with the identity transform.
VARIABLE_DEFAULTS: dict[str, VariableBinding] = {
    "exploitability": VariableBinding(
        "exploitability", VariableClass.L_UP, raw=0.0, alpha=1.0, transform=scale(10)
    ),
    "days_public": VariableBinding(
        "days_public", VariableClass.L_UP, raw=0.0, alpha=1.0,
        transform=TransformSpec(TransformKind.LOG1P),
    ),
    "known_exploits": VariableBinding(
        "known_exploits", VariableClass.L_UP, raw=0.0, alpha=1.0, transform=CARDINALITY
    ),
    "ids_rules_known": VariableBinding(
        "ids_rules_known", VariableClass.L_DOWN, raw=0.0, alpha=0.5, transform=CARDINALITY
    ),
    "scan_plugins": VariableBinding(
        "scan_plugins", VariableClass.L_DOWN, raw=0.0, alpha=0.5, transform=CARDINALITY
    ),
    "impact": VariableBinding(
        "impact", VariableClass.E_UP, raw=0.0, alpha=1.0, transform=scale(10)
    ),
    "deployed_ids": VariableBinding(
        "deployed_ids", VariableClass.E_DOWN, raw=0.0, alpha=0.7, transform=CARDINALITY
    ),
}

# Bindings injected from labeled risk factors (see riskgraph.context).
RISK_FACTOR_ALPHA = 0.7
RISK_FACTOR_PREFIX = "rf:"


def default_binding(name: str, klass: VariableClass | None = None) -> VariableBinding:
    """Fresh binding for a well-known variable name (raw starts at 0)."""
    known = VARIABLE_DEFAULTS.get(name)
    if known is not None:
        return VariableBinding(known.name, known.klass, 0.0, known.alpha, known.transform)
    if klass is None:
        raise InvalidBinding(name, "unknown variable needs an explicit class")
    return VariableBinding(name, klass, 0.0, 1.0, IDENTITY)
