/**
 * HTML renderers for the three console views.
 *
 * Two hard rules:
 *  - every displayed number is a payload field passed through fmt()
 *    (plain String conversion), never computed or rounded client-side;
 *  - rows render in payload order, so the API's sort (contribution
 *    descending, ties by id) is what the analyst sees.
 */

import type {
  DeltaRow,
  MetricsPayload,
  PlanResponse,
  ReputationPayload,
  TopRisksPayload,
  VulnerabilityRow,
} from "./api.js";
import type { ViewState } from "./state.js";

/** Verbatim value rendering; the one formatter every number goes through. */
export function fmt(value: number | string | boolean): string {
  return String(value);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function vulnerabilityRow(row: VulnerabilityRow): string {
  const badges = row.risk_factors
    .map((rf) => `<span class="badge rf" data-rf="${escapeHtml(rf)}">${escapeHtml(rf)}</span>`)
    .join(" ");
  const active = row.active ? "yes" : "no";
  return `<tr data-vuln="${escapeHtml(row.id)}">
  <td data-field="id">${escapeHtml(row.id)}</td>
  <td data-field="rho">${fmt(row.rho)}</td>
  <td data-field="ef">${fmt(row.ef)}</td>
  <td data-field="reach">${fmt(row.reach)}</td>
  <td data-field="risk_contribution">${fmt(row.risk_contribution)}</td>
  <td data-field="active">${active}</td>
  <td data-field="risk_factors">${badges}</td>
</tr>`;
}

const METRICS_HEADER = `<tr>
  <th>vulnerability</th><th>likelihood</th><th>exposure</th>
  <th>reach</th><th>contribution</th><th>active</th><th>risk factors</th>
</tr>`;

export function renderDashboard(
  metrics: MetricsPayload | null,
  topRisks: TopRisksPayload | null,
): string {
  if (metrics === null) {
    return `<section id="dashboard"><p class="empty">no model loaded</p></section>`;
  }
  const factorBadges = metrics.risk_factors
    .map(
      (rf) =>
        `<span class="badge label-${rf.label}" data-rf-badge="${escapeHtml(rf.id)}">` +
        `${escapeHtml(rf.id)}: ${rf.label} &rarr; ${escapeHtml(rf.targets)}</span>`,
    )
    .join(" ");
  const body =
    metrics.vulnerabilities.length === 0
      ? `<p class="empty" data-field="no-vulnerabilities">no vulnerabilities</p>`
      : `<table class="metrics"><thead>${METRICS_HEADER}</thead><tbody>
${metrics.vulnerabilities.map(vulnerabilityRow).join("\n")}
</tbody></table>`;
  const ranked =
    topRisks === null || topRisks.top.length === 0
      ? ""
      : `<h3>top risks</h3><table class="top-risks"><thead>${METRICS_HEADER}</thead><tbody>
${topRisks.top.map(vulnerabilityRow).join("\n")}
</tbody></table>`;
  return `<section id="dashboard">
<h2>risk dashboard</h2>
<p>model <code data-field="model_id">${escapeHtml(metrics.model_id)}</code>
 total risk <strong data-field="total_risk">${fmt(metrics.total_risk)}</strong></p>
<p class="factors">${factorBadges}</p>
${body}
${ranked}
</section>`;
}

function deltaRow(row: DeltaRow): string {
  const status = row.removed ? "removed" : "";
  return `<tr data-delta="${escapeHtml(row.id)}">
  <td data-field="id">${escapeHtml(row.id)}</td>
  <td data-field="risk_contribution_before">${fmt(row.risk_contribution_before)}</td>
  <td data-field="risk_contribution_after">${fmt(row.risk_contribution_after)}</td>
  <td data-field="delta">${fmt(row.delta)}</td>
  <td data-field="removed">${status}</td>
</tr>`;
}

export function renderWorkbench(state: ViewState): string {
  const staged = [
    ...state.stagedActions.map(
      (a) =>
        `<li data-staged="${escapeHtml(a.id)}">${escapeHtml(a.kind)}(${escapeHtml(
          a.kind === "set_config" ? `${a.parameter}=${String(a.value)}` : a.vulnerability ?? "",
        )})</li>`,
    ),
    ...state.stagedOverrides.map(
      (o) =>
        `<li data-staged-override="${escapeHtml(o.risk_factor)}">label(${escapeHtml(
          o.risk_factor,
        )}=${o.label})</li>`,
    ),
  ];
  const stagedBlock = staged.length
    ? `<ul class="staged">${staged.join("")}</ul>`
    : `<p class="empty">nothing staged</p>`;
  let resultBlock = `<p class="empty">no what-if evaluated</p>`;
  if (state.whatif !== null) {
    resultBlock = `<p>total risk
 <span data-field="total_before">${fmt(state.whatif.before.total_risk)}</span> &rarr;
 <span data-field="total_after">${fmt(state.whatif.after.total_risk)}</span>
 (delta <span data-field="total_delta">${fmt(state.whatif.total_delta)}</span>)</p>
<table class="deltas"><thead><tr>
  <th>vulnerability</th><th>before</th><th>after</th><th>delta</th><th></th>
</tr></thead><tbody>
${state.whatif.deltas.map(deltaRow).join("\n")}
</tbody></table>`;
  }
  return `<section id="workbench">
<h2>what-if workbench</h2>
${stagedBlock}
${resultBlock}
</section>`;
}

export function renderReputation(reputation: ReputationPayload | null): string {
  if (reputation === null) {
    return `<p class="empty">no reputation data</p>`;
  }
  const rows = Object.keys(reputation.scores)
    .map(
      (source) =>
        `<tr data-source="${escapeHtml(source)}">
  <td data-field="source">${escapeHtml(source)}</td>
  <td data-field="score">${fmt(reputation.scores[source] as number)}</td>
</tr>`,
    )
    .join("\n");
  return `<table class="reputation"><thead><tr><th>source</th><th>score</th></tr></thead>
<tbody>${rows}</tbody></table>
<p class="meta">converged=<span data-field="converged">${fmt(
    reputation.converged,
  )}</span> after <span data-field="iterations">${fmt(
    reputation.iterations,
  )}</span> iterations</p>`;
}

export function renderPlanReview(state: ViewState): string {
  const plan = state.plan;
  if (plan === null) {
    return `<section id="plan-review"><h2>plan review</h2>
<p class="empty">no plan requested</p>${renderReputation(state.reputation)}</section>`;
  }
  const actions = plan.plan.actions
    .map(
      (a) =>
        `<li data-plan-action="${escapeHtml(a.id)}">${escapeHtml(a.kind)}
 target ${escapeHtml(a.vulnerability ?? a.parameter ?? "")}
 cost <span data-field="cost">${fmt(a.cost)}</span></li>`,
    )
    .join("\n");
  const verdict =
    plan.plan.verdict === null
      ? ""
      : ` verdict <span data-field="verdict">${fmt(plan.plan.verdict)}</span>`;
  return `<section id="plan-review">
<h2>plan review</h2>
<p>plan <code data-field="plan_id">${escapeHtml(plan.plan_id)}</code>
 risk <span data-field="risk_before">${fmt(plan.plan.risk_before)}</span> &rarr;
 <span data-field="risk_after">${fmt(plan.plan.risk_after)}</span>
 (delta <span data-field="delta">${fmt(plan.plan.delta)}</span>,
 cost <span data-field="total_cost">${fmt(plan.plan.total_cost)}</span>)${verdict}</p>
<ul class="plan-actions">${actions}</ul>
<pre class="report" data-field="report">${escapeHtml(plan.report)}</pre>
<h3>source reputation</h3>
${renderReputation(state.reputation)}
</section>`;
}

export function renderError(error: string | null): string {
  if (error === null) {
    return "";
  }
  return `<div class="error-banner" role="alert">${escapeHtml(error)}</div>`;
}

export function renderApp(state: ViewState): string {
  return [
    renderError(state.error),
    renderDashboard(state.metrics, state.topRisks),
    renderWorkbench(state),
    renderPlanReview(state),
  ].join("\n");
}
