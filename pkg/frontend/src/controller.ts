/**
 * Console controller: orchestrates API calls and state transitions.
 *
 * DOM-free so the interaction contracts (what-if purity, single-flight
 * verdict submission) are unit-testable; main.ts owns the actual DOM.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ActionDescriptor, LabelOverride } from "./api.js";
import {
  ViewState,
  clearStaged,
  initialState,
  stageAction,
  stageOverride,
  unstageAction,
  withError,
  withModel,
  withPlan,
  withReputation,
  withWhatIf,
} from "./state.js";
import { renderApp } from "./render.js";

export class Console {
  state: ViewState = initialState();

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: ViewState) => void = () => {},
  ) {}

  private update(next: ViewState): void {
    this.state = next;
    this.onChange(next);
  }

  render(): string {
    return renderApp(this.state);
  }

  private fail(error: unknown): void {
    const message =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : String(error);
    this.update(withError(this.state, message));
  }

  async loadModel(modelId: string): Promise<void> {
    try {
      const [metrics, topRisks] = await Promise.all([
        this.api.getMetrics(modelId),
        this.api.getTopRisks(modelId, 10),
      ]);
      this.update(withModel(this.state, modelId, metrics, topRisks));
    } catch (error) {
      this.fail(error);
    }
  }

  stage(action: ActionDescriptor): void {
    try {
      this.update(withError(stageAction(this.state, action), null));
    } catch (error) {
      this.fail(error);
    }
  }

  unstage(actionId: string): void {
    this.update(unstageAction(this.state, actionId));
  }

  override(override: LabelOverride): void {
    try {
      this.update(withError(stageOverride(this.state, override), null));
    } catch (error) {
      this.fail(error);
    }
  }

  /** Clearing the stage restores the unmodified dashboard view. */
  clear(): void {
    this.update(clearStaged(this.state));
  }

  async evaluateWhatIf(): Promise<void> {
    if (this.state.modelId === null) {
      return;
    }
    try {
      const result = await this.api.postWhatIf(this.state.modelId, {
        actions: this.state.stagedActions,
        label_overrides: this.state.stagedOverrides,
      });
      this.update(withError(withWhatIf(this.state, result), null));
    } catch (error) {
      this.fail(error);
    }
  }

  async requestPlan(budget: number, candidates: ActionDescriptor[]): Promise<void> {
    if (this.state.modelId === null) {
      return;
    }
    try {
      const plan = await this.api.postPlan(this.state.modelId, budget, candidates);
      this.update(withError(withPlan(this.state, plan), null));
    } catch (error) {
      this.fail(error);
    }
  }

  /** Single-flight: while one submission is pending, further clicks are
   *  dropped, so a double-click sends exactly one request. */
  async submitVerdict(verdict: number): Promise<void> {
    const plan = this.state.plan;
    if (plan === null || this.state.verdictPending) {
      return;
    }
    this.update({ ...this.state, verdictPending: true });
    try {
      const response = await this.api.postFeedback(plan.plan_id, verdict);
      this.update(
        withReputation(
          {
            ...this.state,
            verdictPending: false,
            plan: {
              ...plan,
              plan: { ...plan.plan, verdict: response.verdict },
            },
          },
          response.reputation,
        ),
      );
    } catch (error) {
      this.update({ ...this.state, verdictPending: false });
      this.fail(error);
    }
  }

  async refreshReputation(): Promise<void> {
    try {
      this.update(withReputation(this.state, await this.api.getReputation()));
    } catch (error) {
      this.fail(error);
    }
  }
}
