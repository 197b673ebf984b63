/**
 * Pure render functions: state in, HTML strings out.
 *
 * Every number shown comes from a service report; nothing is recomputed
 * here.  Stale reports render inside a greyed wrapper with an explicit
 * notice instead of being passed off as current.
 */

import { Report } from "./api.js";
import { piecewiseChart, relevanceStrip } from "./charts.js";
import { HistoryEntry, ParamValues, SessionView } from "./state.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderBadge(consistent: boolean | null): string {
  if (consistent === null) {
    return `<span class="badge badge-unknown">no judgments</span>`;
  }
  return consistent
    ? `<span class="badge badge-ok">consistent</span>`
    : `<span class="badge badge-bad">inconsistent</span>`;
}

export function renderStatements(statements: string[],
                                 pending: string[]): string {
  const committed = statements.map((line, i) =>
    `<li>${esc(line)} <button class="remove-stmt" data-index="${i}"` +
    ` aria-label="remove ${esc(line)}">x</button></li>`);
  const staged = pending.map((line) =>
    `<li class="pending">${esc(line)} (staged)</li>`);
  return `<ol class="statements">${committed.join("")}${staged.join("")}</ol>`;
}

export function renderParamPanel(params: ParamValues): string {
  return `
    <label>mode
      <select id="param-mode">
        ${["select-consistent", "select-inconsistent", "representative",
           "enumerate", "relevance", "rank", "uta", "consistency"]
          .map((m) => `<option value="${m}"${m === params.mode ? " selected" : ""}>${m}</option>`)
          .join("")}
      </select>
    </label>
    <label>p <input id="param-p" type="range" min="0" max="300" step="0.5"
      value="${params.p}"><span id="param-p-value">${params.p}</span></label>
    <label>C <input id="param-C" type="number" min="0" step="0.1"
      value="${params.C}"></label>
    <label>subintervals <input id="param-gamma" type="number" min="1" max="12"
      value="${params.gamma}"></label>
    <label>margin <input id="param-epsilon" type="number" min="0.0001"
      step="0.001" value="${params.epsilon}"></label>
    <label>max criteria <input id="param-max" type="number" min="1"
      value="${params.max_selected ?? ""}" placeholder="none"></label>
    <button id="solve-button">solve</button>
    <span id="param-errors" class="param-errors"></span>`;
}

export function renderHistory(history: HistoryEntry[]): string {
  if (!history.length) return `<p class="placeholder">no solves yet</p>`;
  const rows = history.map((h) =>
    `<tr><td>${h.p}</td><td>${h.C}</td><td>${h.gamma}</td>` +
    `<td>{${h.selected.join(", ")}}</td>` +
    `<td>${h.phi === null ? "" : h.phi.toFixed(4)}</td></tr>`);
  return `<table class="history"><thead>
    <tr><th>p</th><th>C</th><th>subintervals</th><th>selected</th><th>phi</th></tr>
    </thead><tbody>${rows.join("")}</tbody></table>`;
}

export function renderValueFunctions(report: Report): string {
  if (!report.value_function) return "";
  const charts = report.value_function
    .filter((vf) => vf.selected)
    .map((vf) => piecewiseChart(vf.breakpoints, vf.values,
                                `${vf.id} (w=${vf.weight.toFixed(3)})`));
  if (!charts.length) return `<p class="placeholder">no selected criteria</p>`;
  return `<div class="chart-row">${charts.join("")}</div>`;
}

export function renderRanking(report: Report): string {
  if (!report.ranking || !report.scores) return "";
  const groups = report.ranking.map((group) => {
    const members = group.map((aid) =>
      `<span class="rank-alt">${esc(aid)}` +
      `<small>${report.scores![aid].toFixed(4)}</small></span>`);
    return `<li class="rank-group">${members.join('<span class="tie">~</span>')}</li>`;
  });
  return `<ol class="ranking">${groups.join("")}</ol>`;
}

export function renderSupportGallery(report: Report): string {
  if (!report.support_family) return "";
  const relevance = report.relevance ?? {};
  const total = report.support_family.length;
  const criteria = Object.keys(relevance);
  const cards = report.support_family.map((entry) => {
    const phi = entry.phi === null || entry.phi === undefined
      ? "" : `<small>phi ${entry.phi.toFixed(3)}</small>`;
    return `<div class="support-card" data-size="${entry.criteria.length}">` +
      `{${entry.criteria.join(", ")}}${phi}</div>`;
  });
  return `<p>${total} streamlined supporting sets</p>` +
    relevanceStrip(relevance, criteria, total) +
    `<div class="gallery">${cards.join("")}</div>`;
}

export function renderSummary(report: Report): string {
  const bits: string[] = [];
  if (report.selected) {
    bits.push(`selected: {${report.selected.join(", ")}}`);
  }
  if (report.phi !== undefined) bits.push(`phi: ${report.phi.toFixed(4)}`);
  if (report.margin !== undefined) bits.push(`margin: ${report.margin.toFixed(4)}`);
  if (report.f_star !== undefined) bits.push(`F*: ${report.f_star.toExponential(2)}`);
  if (report.consistent !== undefined) bits.push(`consistent: ${report.consistent}`);
  return bits.length ? `<p class="summary">${bits.join("  |  ")}</p>` : "";
}

export function renderResults(view: SessionView): string {
  if (view.report === null) {
    return `<p class="placeholder">run a solve to see results</p>`;
  }
  const report = view.report;
  const inner = renderSummary(report) + renderValueFunctions(report) +
    renderRanking(report) + renderSupportGallery(report);
  if (view.reportIsStale) {
    return `<div class="stale" aria-disabled="true">
      <p class="stale-notice">stale: computed at revision ${report.revision},
      session is now at ${view.revision} - re-solve to refresh</p>${inner}</div>`;
  }
  return `<div class="fresh">${inner}</div>`;
}
