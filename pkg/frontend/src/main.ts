/**
 * Page wiring: binds the session state to the DOM and the service client.
 * All rendering goes through the pure view functions.
 */

import { HttpTransport, ServiceClient } from "./api.js";
import { SessionView, validateParams } from "./state.js";
import { renderBadge, renderHistory, renderParamPanel, renderResults,
         renderStatements } from "./views.js";

const client = new ServiceClient(new HttpTransport(""));
const view = new SessionView(client);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function paint(): void {
  el("badge").innerHTML = renderBadge(view.consistent);
  el("statement-list").innerHTML = renderStatements(view.statements,
                                                    view.pendingStatements);
  el("history").innerHTML = renderHistory(view.history);
  el("results").innerHTML = renderResults(view);
  el("session-info").textContent = view.tableLoaded
    ? `session ${view.sessionId} | revision ${view.revision} | ` +
      `${view.alternatives} alternatives x ${view.criteria} criteria`
    : "no table loaded";
  for (const btn of document.querySelectorAll<HTMLButtonElement>(".remove-stmt")) {
    btn.onclick = () => {
      void run(() => view.removeStatement(Number(btn.dataset.index)));
    };
  }
}

async function run(action: () => Promise<unknown>): Promise<void> {
  try {
    view.lastError = "";
    await action();
  } catch (err) {
    view.lastError = err instanceof Error ? err.message : String(err);
  }
  el("error-bar").textContent = view.lastError;
  paint();
}

function readParams(): void {
  view.params = {
    mode: el<HTMLSelectElement>("param-mode").value,
    p: Number(el<HTMLInputElement>("param-p").value),
    C: Number(el<HTMLInputElement>("param-C").value),
    gamma: Number(el<HTMLInputElement>("param-gamma").value),
    epsilon: Number(el<HTMLInputElement>("param-epsilon").value),
    max_selected: el<HTMLInputElement>("param-max").value
      ? Number(el<HTMLInputElement>("param-max").value) : null,
  };
  const problems = validateParams(view.params);
  el("param-errors").textContent =
    problems.map((p) => `${p.field}: ${p.message}`).join("; ");
  el<HTMLButtonElement>("solve-button").disabled = problems.length > 0;
  el("param-p-value").textContent = String(view.params.p);
}

function bindParamPanel(): void {
  el("param-panel").innerHTML = renderParamPanel(view.params);
  for (const id of ["param-mode", "param-p", "param-C", "param-gamma",
                    "param-epsilon", "param-max"]) {
    el(id).addEventListener("input", readParams);
  }
  el("solve-button").onclick = () => void run(() => view.solve());
}

async function boot(): Promise<void> {
  await view.start();
  bindParamPanel();

  el("load-table").onclick = () => void run(async () => {
    await view.loadTable(el<HTMLTextAreaElement>("table-input").value);
  });
  el("load-statements").onclick = () => void run(async () => {
    const lines = el<HTMLTextAreaElement>("statements-input").value
      .split("\n").map((s) => s.trim()).filter(Boolean);
    await view.loadStatements(lines);
  });
  el("stage-statement").onclick = () => void run(async () => {
    const a = el<HTMLSelectElement>("pair-a").value;
    const rel = el<HTMLSelectElement>("pair-rel").value;
    const b = el<HTMLSelectElement>("pair-b").value;
    view.stageStatement(`${a} ${rel} ${b}`);
  });
  el("commit-statements").onclick = () => void run(() => view.commitPending());
  paint();
}

void boot();
