/**
 * DOM bootstrap: base-URL + model-id form, stage controls, verdict slider.
 * All state lives in the Console controller; this file only wires events.
 */

import { ApiClient } from "./api.js";
import { Console } from "./controller.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function boot(): void {
  const root = el<HTMLDivElement>("app");
  const baseUrl = el<HTMLInputElement>("base-url");
  const modelId = el<HTMLInputElement>("model-id");

  let ui = new Console(new ApiClient(baseUrl.value), () => {
    root.innerHTML = ui.render();
  });

  el<HTMLButtonElement>("load-model").addEventListener("click", () => {
    ui = new Console(new ApiClient(baseUrl.value), () => {
      root.innerHTML = ui.render();
    });
    void ui.loadModel(modelId.value.trim()).then(() => ui.refreshReputation());
  });

  el<HTMLButtonElement>("stage-patch").addEventListener("click", () => {
    const target = el<HTMLInputElement>("stage-target").value.trim();
    ui.stage({ id: `stage-patch-${target}`, kind: "patch", vulnerability: target });
  });
  el<HTMLButtonElement>("stage-ids").addEventListener("click", () => {
    const target = el<HTMLInputElement>("stage-target").value.trim();
    ui.stage({
      id: `stage-ids-${target}`,
      kind: "deploy_ids_rule",
      vulnerability: target,
    });
  });
  el<HTMLButtonElement>("stage-clear").addEventListener("click", () => ui.clear());
  el<HTMLButtonElement>("run-whatif").addEventListener("click", () => {
    void ui.evaluateWhatIf();
  });

  el<HTMLButtonElement>("request-plan").addEventListener("click", () => {
    const budget = Number(el<HTMLInputElement>("plan-budget").value);
    const candidatesText = el<HTMLTextAreaElement>("plan-candidates").value;
    try {
      const candidates = JSON.parse(candidatesText);
      void ui.requestPlan(budget, candidates);
    } catch {
      root.innerHTML = `<div class="error-banner">candidates must be a JSON array</div>${ui.render()}`;
    }
  });

  el<HTMLButtonElement>("submit-verdict").addEventListener("click", () => {
    const verdict = Number(el<HTMLInputElement>("verdict-slider").value);
    void ui.submitVerdict(verdict);
  });
}

document.addEventListener("DOMContentLoaded", boot);
