/**
 * View state and its pure transitions.
 *
 * Staged actions/overrides only reference entities present in the fetched
 * model; staging is rejected otherwise. Clearing the stage also drops the
 * last what-if result so the dashboard shows the unmodified view again.
 */

import type {
  ActionDescriptor,
  LabelOverride,
  MetricsPayload,
  PlanResponse,
  ReputationPayload,
  TopRisksPayload,
  WhatIfResponse,
} from "./api.js";

export interface ViewState {
  modelId: string | null;
  metrics: MetricsPayload | null;
  topRisks: TopRisksPayload | null;
  stagedActions: ActionDescriptor[];
  stagedOverrides: LabelOverride[];
  whatif: WhatIfResponse | null;
  plan: PlanResponse | null;
  reputation: ReputationPayload | null;
  verdictPending: boolean;
  error: string | null;
}

export function initialState(): ViewState {
  return {
    modelId: null,
    metrics: null,
    topRisks: null,
    stagedActions: [],
    stagedOverrides: [],
    whatif: null,
    plan: null,
    reputation: null,
    verdictPending: false,
    error: null,
  };
}

export function withModel(
  state: ViewState,
  modelId: string,
  metrics: MetricsPayload,
  topRisks: TopRisksPayload,
): ViewState {
  return {
    ...initialState(),
    modelId,
    metrics,
    topRisks,
    reputation: state.reputation,
  };
}

function knownVulnerability(state: ViewState, id: string | undefined): boolean {
  return (
    id !== undefined &&
    (state.metrics?.vulnerabilities.some((v) => v.id === id) ?? false)
  );
}

function knownParameter(state: ViewState, id: string | undefined): boolean {
  return (
    id !== undefined &&
    (state.metrics?.config_params.some((p) => p.id === id) ?? false)
  );
}

function knownRiskFactor(state: ViewState, id: string): boolean {
  return state.metrics?.risk_factors.some((rf) => rf.id === id) ?? false;
}

/** Stage one action; throws if it references nothing in the fetched model
 *  or reuses a staged id. */
export function stageAction(state: ViewState, action: ActionDescriptor): ViewState {
  if (state.stagedActions.some((a) => a.id === action.id)) {
    throw new Error(`action id already staged: ${action.id}`);
  }
  const resolvable =
    action.kind === "set_config"
      ? knownParameter(state, action.parameter)
      : knownVulnerability(state, action.vulnerability);
  if (!resolvable) {
    throw new Error(
      `action ${action.id} references nothing in the loaded model`,
    );
  }
  return { ...state, stagedActions: [...state.stagedActions, action] };
}

export function unstageAction(state: ViewState, actionId: string): ViewState {
  return {
    ...state,
    stagedActions: state.stagedActions.filter((a) => a.id !== actionId),
  };
}

export function stageOverride(state: ViewState, override: LabelOverride): ViewState {
  if (!knownRiskFactor(state, override.risk_factor)) {
    throw new Error(
      `override references unknown risk factor: ${override.risk_factor}`,
    );
  }
  const rest = state.stagedOverrides.filter(
    (o) => o.risk_factor !== override.risk_factor,
  );
  return { ...state, stagedOverrides: [...rest, override] };
}

/** Drop the whole stage and the last what-if result. */
export function clearStaged(state: ViewState): ViewState {
  return { ...state, stagedActions: [], stagedOverrides: [], whatif: null };
}

export function withWhatIf(state: ViewState, result: WhatIfResponse): ViewState {
  return { ...state, whatif: result };
}

export function withPlan(state: ViewState, plan: PlanResponse): ViewState {
  return { ...state, plan };
}

export function withReputation(
  state: ViewState,
  reputation: ReputationPayload,
): ViewState {
  return { ...state, reputation };
}

export function withError(state: ViewState, error: string | null): ViewState {
  return { ...state, error };
}
