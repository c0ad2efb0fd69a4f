/**
 * Typed client for the riskgraph HTTP API.
 *
 * The console never computes metrics itself: every number it shows is a
 * field from one of these payloads, so the client is a thin fetch wrapper
 * plus the payload types.
 */

export type RiskLabel = "none" | "low" | "medium" | "high";
export type ActionKind = "patch" | "deploy_ids_rule" | "set_config";

export interface VulnerabilityRow {
  id: string;
  rho: number;
  ef: number;
  reach: number;
  risk_contribution: number;
  active: boolean;
  risk_factors: string[];
}

export interface RiskFactorBadge {
  id: string;
  kind: string;
  label: RiskLabel;
  targets: string;
}

export interface ConfigParamRow {
  id: string;
  name: string;
  value: string | number | boolean;
  governs: string;
}

export interface MetricsPayload {
  model_id: string;
  total_risk: number;
  vulnerabilities: VulnerabilityRow[];
  risk_factors: RiskFactorBadge[];
  config_params: ConfigParamRow[];
}

export interface TopRisksPayload {
  model_id: string;
  total_risk: number;
  top: VulnerabilityRow[];
}

export interface ActionDescriptor {
  id: string;
  kind: ActionKind;
  vulnerability?: string;
  parameter?: string;
  value?: string | number | boolean;
  cost?: number;
}

export interface LabelOverride {
  risk_factor: string;
  label: RiskLabel;
}

export interface WhatIfRequest {
  actions?: ActionDescriptor[];
  label_overrides?: LabelOverride[];
}

export interface DeltaRow {
  id: string;
  risk_contribution_before: number;
  risk_contribution_after: number;
  delta: number;
  removed: boolean;
}

export interface WhatIfResponse {
  before: MetricsPayload;
  after: MetricsPayload;
  deltas: DeltaRow[];
  total_delta: number;
}

export interface PlanAction {
  id: string;
  kind: ActionKind;
  cost: number;
  vulnerability?: string;
  parameter?: string;
  value?: string | number | boolean;
}

export interface PlanPayload {
  actions: PlanAction[];
  total_cost: number;
  risk_before: number;
  risk_after: number;
  delta: number;
  contributing_sources: string[];
  verdict: number | null;
}

export interface PlanResponse {
  plan_id: string;
  plan: PlanPayload;
  report: string;
}

export interface ReputationPayload {
  scores: Record<string, number>;
  iterations: number;
  converged: boolean;
}

export interface FeedbackResponse {
  plan_id: string;
  verdict: number;
  reputation: ReputationPayload;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      ...init,
      headers: { "content-type": "application/json", ...(init?.headers ?? {}) },
    });
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const code = body?.code ?? "http-error";
      const message = body?.message ?? `request failed with ${response.status}`;
      throw new ApiError(response.status, code, message, body?.field);
    }
    return body as T;
  }

  getMetrics(modelId: string): Promise<MetricsPayload> {
    return this.request(`/model/${encodeURIComponent(modelId)}/metrics`);
  }

  getTopRisks(modelId: string, n: number): Promise<TopRisksPayload> {
    return this.request(
      `/model/${encodeURIComponent(modelId)}/risks/top?n=${encodeURIComponent(n)}`,
    );
  }

  postWhatIf(modelId: string, body: WhatIfRequest): Promise<WhatIfResponse> {
    return this.request(`/model/${encodeURIComponent(modelId)}/whatif`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  postPlan(
    modelId: string,
    budget: number,
    candidates: ActionDescriptor[],
  ): Promise<PlanResponse> {
    return this.request(`/model/${encodeURIComponent(modelId)}/plan`, {
      method: "POST",
      body: JSON.stringify({ budget, candidates }),
    });
  }

  postFeedback(planId: string, verdict: number): Promise<FeedbackResponse> {
    return this.request(`/plans/${encodeURIComponent(planId)}/feedback`, {
      method: "POST",
      body: JSON.stringify({ verdict }),
    });
  }

  getReputation(): Promise<ReputationPayload> {
    return this.request(`/reputation`);
  }
}
