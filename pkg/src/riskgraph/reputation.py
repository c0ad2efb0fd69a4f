"""Bipartite source/plan reputation scoring from signed analyst feedback.

Sources and plans form a bipartite graph; analyst verdicts in [-1, +1]
attach to plans.  Scoring alternates plan-trust and source-score means,
damped toward a neutral prior, until a fixed point.  With damping < 1
the update is a contraction, so convergence is guaranteed.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .errors import RangeViolation, UnknownPlan

DAMPING = 0.85
NEUTRAL_PRIOR = 0.5
TOLERANCE = 1e-9
MAX_ITERATIONS = 1000


@dataclass
class FeedbackGraph:
    """Sources, plans, who-contributed-to-what, and analyst verdicts."""

    sources: set[str] = field(default_factory=set)
    plans: set[str] = field(default_factory=set)
    contributes: set[tuple[str, str]] = field(default_factory=set)
    verdicts: dict[str, float] = field(default_factory=dict)

    def add_source(self, source_id: str) -> None:
        self.sources.add(source_id)

    def add_plan(self, plan_id: str, contributors: set[str] = frozenset()) -> None:
        self.plans.add(plan_id)
        for source_id in contributors:
            self.sources.add(source_id)
            self.contributes.add((source_id, plan_id))

    def copy(self) -> "FeedbackGraph":
        return copy.deepcopy(self)


@dataclass
class ReputationScores:
    """Converged per-source trust in [0, 1]."""

    scores: dict[str, float]
    iterations: int
    converged: bool


def record_feedback(graph: FeedbackGraph, plan_id: str, verdict: float) -> FeedbackGraph:
    """New graph with the verdict stored (overwriting any previous one)."""
    if plan_id not in graph.plans:
        raise UnknownPlan(plan_id)
    if not -1.0 <= verdict <= 1.0:
        raise RangeViolation(f"verdict[{plan_id}]", verdict, "[-1,1]")
    updated = graph.copy()
    updated.verdicts[plan_id] = float(verdict)
    return updated


def score(
    graph: FeedbackGraph,
    damping: float = DAMPING,
    prior: float = NEUTRAL_PRIOR,
    tol: float = TOLERANCE,
    max_iter: int = MAX_ITERATIONS,
) -> ReputationScores:
    """Fixed point of the two-phase mean-propagation update.

    Plan trust: evaluated plans map their verdict to [0,1] via (x+1)/2;
    unevaluated plans take the mean score of their contributors (prior
    if none).  Source score: (1-damping)*prior + damping*mean plan
    trust over contributed plans; sources with no plans stay at prior.
    Deterministic: all reductions run in sorted-id order.
    """
    source_ids = sorted(graph.sources)
    plan_contributors: dict[str, list[str]] = {p: [] for p in graph.plans}
    source_plans: dict[str, list[str]] = {s: [] for s in source_ids}
    for source_id, plan_id in sorted(graph.contributes):
        plan_contributors[plan_id].append(source_id)
        source_plans[source_id].append(plan_id)

    scores = {s: prior for s in source_ids}
    iterations = 0
    converged = False
    while iterations < max_iter:
        iterations += 1
        trust: dict[str, float] = {}
        for plan_id in sorted(graph.plans):
            if plan_id in graph.verdicts:
                trust[plan_id] = (graph.verdicts[plan_id] + 1.0) / 2.0
            else:
                contributors = plan_contributors[plan_id]
                if contributors:
                    trust[plan_id] = sum(scores[s] for s in contributors) / len(contributors)
                else:
                    trust[plan_id] = prior
        delta = 0.0
        next_scores: dict[str, float] = {}
        for source_id in source_ids:
            plans = source_plans[source_id]
            if plans:
                mean_trust = sum(trust[p] for p in plans) / len(plans)
                value = (1.0 - damping) * prior + damping * mean_trust
            else:
                value = prior
            delta = max(delta, abs(value - scores[source_id]))
            next_scores[source_id] = value
        scores = next_scores
        if delta < tol:
            converged = True
            break
    return ReputationScores(scores=scores, iterations=iterations, converged=converged)
