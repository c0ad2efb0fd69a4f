/**
 * Snapshot checks: every number the views display must be byte-equal to
 * the recorded API payload value rendered through the one shared
 * formatter (plain String conversion) — the UI does no arithmetic.
 */

import { describe, expect, it } from "vitest";

import type {
  FeedbackResponse,
  MetricsPayload,
  PlanResponse,
  TopRisksPayload,
  WhatIfResponse,
} from "../src/api.js";
import { fmt, renderDashboard, renderPlanReview, renderWorkbench } from "../src/render.js";
import { initialState, withPlan, withReputation, withWhatIf } from "../src/state.js";
import { cell, field, fixture, rowOrder } from "./helpers.js";

const metricsFig3 = fixture<MetricsPayload>("metrics-fig3.json");
const topRisks = fixture<TopRisksPayload>("top-risks-fig3.json");
const metricsEmpty = fixture<MetricsPayload>("metrics-empty.json");
const whatifEmpty = fixture<WhatIfResponse>("whatif-empty.json");
const whatifPatch = fixture<WhatIfResponse>("whatif-patch-v1.json");
const planFig3 = fixture<PlanResponse>("plan-fig3.json");
const feedback = fixture<FeedbackResponse>("feedback-plus-one.json");

describe("dashboard", () => {
  it("shows the empty state for a model without vulnerabilities", () => {
    const html = renderDashboard(metricsEmpty, null);
    expect(html).toContain("no vulnerabilities");
  });

  it("renders every metric cell byte-equal to the payload", () => {
    const html = renderDashboard(metricsFig3, topRisks);
    expect(field(html, "model_id")).toBe(metricsFig3.model_id);
    expect(field(html, "total_risk")).toBe(fmt(metricsFig3.total_risk));
    for (const row of metricsFig3.vulnerabilities) {
      for (const key of ["rho", "ef", "reach", "risk_contribution"] as const) {
        expect(cell(html, "data-vuln", row.id, key)).toBe(fmt(row[key]));
      }
      expect(cell(html, "data-vuln", row.id, "active")).toBe(
        row.active ? "yes" : "no",
      );
    }
  });

  it("badges vulnerabilities with their injected risk factors", () => {
    const html = renderDashboard(metricsFig3, topRisks);
    const v1 = cell(html, "data-vuln", "v1", "risk_factors");
    expect(v1).toContain('data-rf="rf-east"');
    expect(v1).not.toContain("rf-west");
    const v3 = cell(html, "data-vuln", "v3", "risk_factors");
    expect(v3).toContain('data-rf="rf-west"');
    for (const rf of metricsFig3.risk_factors) {
      expect(html).toContain(`data-rf-badge="${rf.id}"`);
      expect(html).toContain(`${rf.id}: ${rf.label}`);
    }
  });

  it("keeps rows exactly in payload order (API owns the sort)", () => {
    const html = renderDashboard(metricsFig3, topRisks);
    const tables = html.split("top risks");
    expect(rowOrder(tables[0]!)).toEqual(
      metricsFig3.vulnerabilities.map((v) => v.id),
    );
    expect(rowOrder(tables[1]!)).toEqual(topRisks.top.map((v) => v.id));
  });
});

describe("what-if workbench", () => {
  it("renders zero deltas for an empty stage", () => {
    const state = withWhatIf(initialState(), whatifEmpty);
    const html = renderWorkbench(state);
    expect(whatifEmpty.total_delta).toBe(0);
    expect(field(html, "total_delta")).toBe(fmt(whatifEmpty.total_delta));
    for (const row of whatifEmpty.deltas) {
      expect(row.delta).toBe(0);
      expect(cell(html, "data-delta", row.id, "delta")).toBe(fmt(row.delta));
    }
  });

  it("shows a patched vulnerability going to zero contribution", () => {
    const state = withWhatIf(initialState(), whatifPatch);
    const html = renderWorkbench(state);
    const v1 = whatifPatch.deltas.find((row) => row.id === "v1")!;
    expect(v1.removed).toBe(true);
    expect(v1.risk_contribution_after).toBe(0);
    expect(cell(html, "data-delta", "v1", "risk_contribution_after")).toBe(
      fmt(v1.risk_contribution_after),
    );
    expect(cell(html, "data-delta", "v1", "removed")).toBe("removed");
    expect(field(html, "total_before")).toBe(fmt(whatifPatch.before.total_risk));
    expect(field(html, "total_after")).toBe(fmt(whatifPatch.after.total_risk));
  });

  it("renders identical output for identical payloads", () => {
    const state = withWhatIf(initialState(), whatifPatch);
    expect(renderWorkbench(state)).toBe(renderWorkbench(state));
  });
});

describe("plan review", () => {
  it("shows plan figures and the per-action rationale report verbatim", () => {
    const state = withReputation(
      withPlan(initialState(), planFig3),
      feedback.reputation,
    );
    const html = renderPlanReview(state);
    expect(field(html, "plan_id")).toBe(planFig3.plan_id);
    expect(field(html, "risk_before")).toBe(fmt(planFig3.plan.risk_before));
    expect(field(html, "risk_after")).toBe(fmt(planFig3.plan.risk_after));
    expect(field(html, "delta")).toBe(fmt(planFig3.plan.delta));
    expect(field(html, "total_cost")).toBe(fmt(planFig3.plan.total_cost));
    for (const action of planFig3.plan.actions) {
      expect(html).toContain(`data-plan-action="${action.id}"`);
    }
    expect(html).toContain("MITIGATION PLAN REPORT");
  });

  it("renders reputation scores byte-equal to the feedback payload", () => {
    const state = withReputation(
      withPlan(initialState(), planFig3),
      feedback.reputation,
    );
    const html = renderPlanReview(state);
    for (const [source, score] of Object.entries(feedback.reputation.scores)) {
      expect(cell(html, "data-source", source, "score")).toBe(fmt(score));
    }
    expect(field(html, "converged")).toBe(fmt(feedback.reputation.converged));
  });
});
