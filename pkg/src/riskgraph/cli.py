"""riskctl: batch CLI over the risk graph engine.

Exit codes: 0 success, 1 validation/model error, 2 I/O error.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import metrics
from .context import apply_events, get_classifier, parse_events
from .errors import RiskGraphError
from .figures import render_metrics_figure, render_plan_figure
from .ingest import adapt_csv_inventory, build_model, load_model, parse_ncr, save_model
from .planner import (
    action_from_dict,
    plan_exhaustive,
    plan_greedy,
    plan_to_dict,
    render_report,
)
from .reputation import score
from .store import ModelStore, plan_id_for


def engine_errors(fn):
    """Map engine errors to exit 1 and I/O errors to exit 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except RiskGraphError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
def main():
    """Context-aware cyber-risk graph engine."""


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option("-o", "--output", type=click.Path(path_type=Path), default=Path("model.json"))
@engine_errors
def ingest(files: tuple[Path, ...], output: Path):
    """Parse NCR/CSV inputs, build and validate a model, save a snapshot."""
    records = []
    for path in files:
        data = path.read_bytes()
        if path.suffix == ".csv":
            records.extend(adapt_csv_inventory(data))
        else:
            records.extend(parse_ncr(data))
    model = build_model(records)
    output.write_bytes(save_model(model))
    click.echo(
        f"model written to {output}: {len(model.components)} components, "
        f"{len(model.vulnerabilities)} vulnerabilities, "
        f"{len(model.risk_factors)} risk factors, {len(model.events)} events"
    )


def _metrics_rows(model) -> tuple[list[dict], float]:
    computed = metrics.evaluate(model)
    rows = [
        {
            "id": vid,
            "rho": m.rho,
            "ef": m.ef,
            "reach": m.reach,
            "risk_contribution": m.risk_contribution,
            "active": m.active,
        }
        for vid, m in sorted(computed.items())
    ]
    return rows, sum(m.risk_contribution for m in computed.values())


@main.command(name="metrics")
@click.argument("model_file", type=click.Path(exists=True, path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text")
@click.option("--figure", type=click.Path(path_type=Path), default=None,
              help="Also render a risk-contribution bar chart to this file.")
@engine_errors
def metrics_cmd(model_file: Path, fmt: str, figure: Path | None):
    """Per-vulnerability metrics table plus total risk."""
    model = load_model(model_file.read_bytes())
    rows, total = _metrics_rows(model)
    if fmt == "json":
        click.echo(json.dumps({"total_risk": total, "vulnerabilities": rows},
                              indent=2, sort_keys=True))
    elif fmt == "csv":
        click.echo("id,rho,ef,reach,risk_contribution,active")
        for r in rows:
            click.echo(
                f"{r['id']},{r['rho']:.9f},{r['ef']:.9f},{r['reach']:.9f},"
                f"{r['risk_contribution']:.9f},{str(r['active']).lower()}"
            )
        click.echo(f"total,,,,{total:.9f},")
    else:
        header = f"{'id':<16}{'rho':>12}{'ef':>12}{'reach':>12}{'contribution':>14}  active"
        click.echo(header)
        click.echo("-" * len(header))
        for r in rows:
            click.echo(
                f"{r['id']:<16}{r['rho']:>12.6f}{r['ef']:>12.6f}{r['reach']:>12.6f}"
                f"{r['risk_contribution']:>14.6f}  {'yes' if r['active'] else 'no'}"
            )
        click.echo("-" * len(header))
        click.echo(f"{'total risk':<16}{'':>36}{total:>14.6f}")
    if figure is not None:
        render_metrics_figure(metrics.evaluate(model), figure)
        click.echo(f"figure written to {figure}", err=True)


@main.command()
@click.argument("model_file", type=click.Path(exists=True, path_type=Path))
@click.argument("events_file", type=click.Path(exists=True, path_type=Path))
@click.option("-o", "--output", type=click.Path(path_type=Path), default=None,
              help="Output snapshot (default: overwrite the model file).")
@click.option("--classifier", "classifier_name", default="baseline")
@engine_errors
def events(model_file: Path, events_file: Path, output: Path | None, classifier_name: str):
    """Classify events, add risk factors, and inject likelihood bindings."""
    model = load_model(model_file.read_bytes())
    stream = parse_events(events_file.read_text())
    updated, created = apply_events(model, stream, get_classifier(classifier_name))
    target = output if output is not None else model_file
    target.write_bytes(save_model(updated))
    for rf in created:
        click.echo(f"risk factor {rf.id}: {rf.label.value} ({rf.kind.value}) -> {rf.targets}")
    click.echo(
        f"{len(stream)} events processed, {len(created)} risk factors; model written to {target}"
    )


@main.command()
@click.argument("model_file", type=click.Path(exists=True, path_type=Path))
@click.option("--budget", type=float, required=True)
@click.option("--candidates", "candidates_file", type=click.Path(exists=True, path_type=Path),
              required=True, help="JSON array of candidate action objects.")
@click.option("--algorithm", type=click.Choice(["greedy", "exhaustive"]), default="greedy")
@click.option("--report-dir", type=click.Path(path_type=Path), default=None,
              help="Write plan.json, report.txt, and a before/after figure here.")
@engine_errors
def plan(model_file: Path, budget: float, candidates_file: Path, algorithm: str,
         report_dir: Path | None):
    """Recommend a mitigation plan under a cost budget."""
    model = load_model(model_file.read_bytes())
    raw = json.loads(candidates_file.read_text())
    if not isinstance(raw, list):
        raise click.ClickException("candidates file must hold a JSON array")
    candidates = [action_from_dict(obj, f"candidates[{i}]") for i, obj in enumerate(raw)]
    planner_fn = plan_greedy if algorithm == "greedy" else plan_exhaustive
    result = planner_fn(model, candidates, budget)
    scores = score(model.feedback)
    report = render_report(result, model, scores)
    click.echo(report)
    if report_dir is not None:
        report_dir.mkdir(parents=True, exist_ok=True)
        from .planner import _apply_all  # applied plan for the figure
        from .store import model_id_for

        payload = plan_to_dict(result)
        payload["plan_id"] = plan_id_for(model_id_for(model), result)
        (report_dir / "plan.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )
        (report_dir / "report.txt").write_text(report)
        after_model = _apply_all(result.actions, model)
        render_plan_figure(
            metrics.evaluate(model), metrics.evaluate(after_model),
            report_dir / "risk_delta.png",
        )
        click.echo(f"plan artifacts written to {report_dir}", err=True)


@main.command()
@click.argument("state_file", type=click.Path(exists=True, path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@engine_errors
def reputation(state_file: Path, fmt: str):
    """Source reputation scores from a model snapshot's feedback section."""
    model = load_model(state_file.read_bytes())
    result = score(model.feedback)
    if fmt == "json":
        click.echo(json.dumps({
            "scores": {k: result.scores[k] for k in sorted(result.scores)},
            "iterations": result.iterations,
            "converged": result.converged,
        }, indent=2, sort_keys=True))
        return
    click.echo(f"{'source':<24}{'score':>10}")
    click.echo("-" * 34)
    for source_id in sorted(result.scores):
        click.echo(f"{source_id:<24}{result.scores[source_id]:>10.6f}")
    click.echo(f"converged={result.converged} after {result.iterations} iterations")


@main.command()
@click.argument("model_file", type=click.Path(exists=True, path_type=Path))
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--data-dir", type=click.Path(path_type=Path), default=None,
              help="Snapshot directory (default: $RISKCTL_DATA_DIR if set).")
@engine_errors
def serve(model_file: Path, host: str, port: int, data_dir: Path | None):
    """Serve the HTTP API with the model preloaded."""
    import uvicorn

    from .service import create_app

    store = ModelStore(data_dir)
    model = load_model(model_file.read_bytes())
    model_id = store.add_model(model)
    click.echo(f"model {model_id} loaded from {model_file}")
    app = create_app(store)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
