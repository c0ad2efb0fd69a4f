"""Figure rendering for the CLI report path.

Charts are written straight to files (Agg backend, no display) next to
the delimited/tabular output they accompany.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .metrics import VulnerabilityMetrics  # noqa: E402


def render_metrics_figure(
    metrics_by_id: dict[str, VulnerabilityMetrics],
    path: Path,
    title: str = "Per-vulnerability risk contribution",
) -> Path:
    """Bar chart of risk contributions, largest first."""
    path = Path(path)
    order = sorted(
        metrics_by_id, key=lambda vid: (-metrics_by_id[vid].risk_contribution, vid)
    )
    values = [metrics_by_id[vid].risk_contribution for vid in order]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.8 * len(order) + 2.0), 4.0))
    bars = ax.bar(order, values, color="#d9534f")
    for bar, vid in zip(bars, order):
        if not metrics_by_id[vid].active:
            bar.set_color("#bbbbbb")
            bar.set_hatch("//")
    ax.set_ylabel("risk contribution")
    ax.set_title(title)
    ax.set_ylim(bottom=0.0)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_plan_figure(
    before: dict[str, VulnerabilityMetrics],
    after: dict[str, VulnerabilityMetrics],
    path: Path,
    title: Optional[str] = None,
) -> Path:
    """Grouped before/after contribution bars for every vulnerability."""
    path = Path(path)
    ids = sorted(set(before) | set(after))
    before_vals = [before[v].risk_contribution if v in before else 0.0 for v in ids]
    after_vals = [after[v].risk_contribution if v in after else 0.0 for v in ids]
    x = range(len(ids))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(ids) + 2.0), 4.0))
    ax.bar([i - width / 2 for i in x], before_vals, width, label="before", color="#d9534f")
    ax.bar([i + width / 2 for i in x], after_vals, width, label="after", color="#5cb85c")
    ax.set_xticks(list(x))
    ax.set_xticklabels(ids)
    ax.set_ylabel("risk contribution")
    total_before = sum(before_vals)
    total_after = sum(after_vals)
    ax.set_title(
        title
        or f"Plan impact: total risk {total_before:.4f} -> {total_after:.4f}"
    )
    ax.set_ylim(bottom=0.0)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
