import json

import pytest
from click.testing import CliRunner

from riskgraph import metrics
from riskgraph.cli import main
from riskgraph.ingest import load_model


@pytest.fixture
def runner():
    return CliRunner()


def test_ingest_empty_ncr(runner, tmp_path):
    src = tmp_path / "empty.ncr.json"
    src.write_text("[]")
    out = tmp_path / "model.json"
    result = runner.invoke(main, ["ingest", str(src), "-o", str(out)])
    assert result.exit_code == 0, result.output
    model = load_model(out.read_bytes())
    assert model.validate() == []
    assert not model.components


def test_ingest_fixture_and_metrics_table(runner, tmp_path, fixtures_dir):
    out = tmp_path / "fig3.model.json"
    result = runner.invoke(main, [
        "ingest", str(fixtures_dir / "fig3.ncr.json"), "-o", str(out)
    ])
    assert result.exit_code == 0, result.output
    assert "3 vulnerabilities" in result.output
    assert "2 risk factors" in result.output

    table = runner.invoke(main, ["metrics", str(out)])
    assert table.exit_code == 0
    for vid in ("v1", "v2", "v3"):
        assert vid in table.output
    assert "total risk" in table.output

    model = load_model(out.read_bytes())
    expected_total = metrics.total_risk(model)
    as_json = runner.invoke(main, ["metrics", str(out), "--format", "json"])
    payload = json.loads(as_json.output)
    assert payload["total_risk"] == pytest.approx(expected_total, abs=1e-12)
    rows = {r["id"]: r for r in payload["vulnerabilities"]}
    assert rows["v1"]["rho"] == pytest.approx(metrics.rho("v1", model), abs=1e-12)


def test_metrics_csv_and_figure(runner, tmp_path, fixtures_dir):
    out = tmp_path / "m.json"
    runner.invoke(main, ["ingest", str(fixtures_dir / "fig3.ncr.json"), "-o", str(out)])
    figure = tmp_path / "contrib.png"
    result = runner.invoke(main, [
        "metrics", str(out), "--format", "csv", "--figure", str(figure)
    ])
    assert result.exit_code == 0, result.output
    lines = [l for l in result.output.splitlines() if l and "figure" not in l]
    assert lines[0] == "id,rho,ef,reach,risk_contribution,active"
    assert lines[-1].startswith("total,")
    assert figure.exists() and figure.stat().st_size > 0


def test_ingest_mixed_csv_and_ncr(runner, tmp_path, fixtures_dir):
    out = tmp_path / "dnc.model.json"
    result = runner.invoke(main, [
        "ingest",
        str(fixtures_dir / "dnc.ncr.json"),
        str(fixtures_dir / "dnc-inventory.csv"),
        "-o", str(out),
    ])
    assert result.exit_code == 0, result.output
    model = load_model(out.read_bytes())
    assert "c-vpn" in model.components
    assert model.components["c-vpn"].quality.source_id == "csv-inventory"


def test_events_command_injects(runner, tmp_path, fixtures_dir):
    model_file = tmp_path / "dnc.model.json"
    runner.invoke(main, ["ingest", str(fixtures_dir / "dnc.ncr.json"),
                         "-o", str(model_file)])
    before = metrics.total_risk(load_model(model_file.read_bytes()))
    result = runner.invoke(main, [
        "events", str(model_file), str(fixtures_dir / "dnc.events.json"),
    ])
    assert result.exit_code == 0, result.output
    assert "3 risk factors" in result.output
    after_model = load_model(model_file.read_bytes())
    assert metrics.total_risk(after_model) > before
    assert len(after_model.risk_factors) == 3


def test_plan_zero_budget(runner, tmp_path, fixtures_dir):
    model_file = tmp_path / "m.json"
    runner.invoke(main, ["ingest", str(fixtures_dir / "dnc.ncr.json"),
                         "-o", str(model_file)])
    result = runner.invoke(main, [
        "plan", str(model_file), "--budget", "0",
        "--candidates", str(fixtures_dir / "dnc.candidates.json"),
    ])
    assert result.exit_code == 0, result.output
    assert "no action recommended" in result.output


def test_plan_writes_report_artifacts(runner, tmp_path, fixtures_dir):
    model_file = tmp_path / "m.json"
    runner.invoke(main, ["ingest", str(fixtures_dir / "dnc.ncr.json"),
                         "-o", str(model_file)])
    runner.invoke(main, ["events", str(model_file),
                         str(fixtures_dir / "dnc.events.json")])
    report_dir = tmp_path / "out"
    result = runner.invoke(main, [
        "plan", str(model_file), "--budget", "2",
        "--candidates", str(fixtures_dir / "dnc.candidates.json"),
        "--report-dir", str(report_dir),
    ])
    assert result.exit_code == 0, result.output
    plan_doc = json.loads((report_dir / "plan.json").read_text())
    assert plan_doc["delta"] > 0
    assert plan_doc["total_cost"] <= 2.0
    report = (report_dir / "report.txt").read_text()
    assert "MITIGATION PLAN REPORT" in report
    assert (report_dir / "risk_delta.png").stat().st_size > 0

    # regenerating on unchanged inputs is byte-identical
    report_dir2 = tmp_path / "out2"
    runner.invoke(main, [
        "plan", str(model_file), "--budget", "2",
        "--candidates", str(fixtures_dir / "dnc.candidates.json"),
        "--report-dir", str(report_dir2),
    ])
    assert (report_dir2 / "report.txt").read_bytes() == (report_dir / "report.txt").read_bytes()
    assert (report_dir2 / "plan.json").read_bytes() == (report_dir / "plan.json").read_bytes()


def test_reputation_command(runner, tmp_path):
    records = [
        {"id": "src-a", "record_type": "source", "attributes": {"name": "a"},
         "quality": {"completeness": 1.0, "source_id": "src-a"},
         "provenance": {"adapter": "t", "ingested_at": "2026-01-01T00:00:00Z"}},
        {"id": "plan-1", "record_type": "plan",
         "attributes": {"contributors": ["src-a"], "verdict": 1.0},
         "quality": {"completeness": 1.0, "source_id": "src-a"},
         "provenance": {"adapter": "t", "ingested_at": "2026-01-01T00:00:00Z"}},
    ]
    src = tmp_path / "state.ncr.json"
    src.write_text(json.dumps(records))
    state = tmp_path / "state.json"
    runner.invoke(main, ["ingest", str(src), "-o", str(state)])
    result = runner.invoke(main, ["reputation", str(state), "--format", "json"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["scores"]["src-a"] == pytest.approx(0.925, abs=1e-9)
    text = runner.invoke(main, ["reputation", str(state)])
    assert "src-a" in text.output


def test_validation_error_exit_code_1(runner, tmp_path):
    bad = tmp_path / "bad.ncr.json"
    bad.write_text(json.dumps([{"id": "x"}]))
    result = runner.invoke(main, ["ingest", str(bad), "-o", str(tmp_path / "m.json")])
    assert result.exit_code == 1
    assert "error" in result.output or result.exception


def test_io_error_exit_code_2(runner, tmp_path):
    missing = tmp_path / "nope.ncr.json"
    result = runner.invoke(main, ["ingest", str(missing), "-o", str(tmp_path / "m.json")])
    assert result.exit_code == 2
