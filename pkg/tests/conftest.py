from __future__ import annotations

from pathlib import Path

import pytest

from riskgraph.bindings import CARDINALITY, VariableBinding, VariableClass, scale
from riskgraph.graph import Component, Level, MultiGraph, QualityTag, Vulnerability

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def simple_model() -> MultiGraph:
    """One system, one vulnerability with the reference binding set."""
    model = MultiGraph()
    model.add_node(Component("c1", "web frontend", Level.SYSTEM, 1.0,
                             QualityTag(0.9, "feed-a")))
    model.add_node(
        Vulnerability(
            "v1",
            "c1",
            bindings=[
                VariableBinding("exploitability", VariableClass.L_UP,
                                raw=10, alpha=1.0, transform=scale(10)),
                VariableBinding("ids_rules_known", VariableClass.L_DOWN,
                                raw=1, alpha=0.5, transform=CARDINALITY),
                VariableBinding("impact", VariableClass.E_UP,
                                raw=10, alpha=1.0, transform=scale(10)),
            ],
            quality=QualityTag(0.8, "feed-a"),
        )
    )
    return model
