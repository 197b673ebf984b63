/**
 * Client-side session state: judgments being edited, solve parameters, the
 * parameter history, and the stale-report guard.
 *
 * The invariant enforced here is that a report is only presented as current
 * when its revision equals the session revision; anything older is kept but
 * flagged stale so the views grey it out.
 */

import { Report, ServiceClient, SolveParamsBody } from "./api.js";

export interface HistoryEntry {
  p: number;
  C: number;
  gamma: number;
  epsilon: number;
  selected: string[];
  phi: number | null;
  revision: number;
}

export interface ParamValues {
  mode: string;
  gamma: number;
  p: number;
  C: number;
  epsilon: number;
  max_selected: number | null;
}

export const DEFAULT_PARAMS: ParamValues = {
  mode: "select-consistent", gamma: 5, p: 10, C: 1.0, epsilon: 0.01,
  max_selected: null,
};

export interface ParamProblem { field: string; message: string; }

/** Client-side validation mirroring the service's 422 checks. */
export function validateParams(params: ParamValues): ParamProblem[] {
  const problems: ParamProblem[] = [];
  if (!(params.epsilon > 0)) {
    problems.push({ field: "epsilon", message: "margin must be positive" });
  }
  if (!(params.gamma >= 1)) {
    problems.push({ field: "gamma", message: "need at least one subinterval" });
  }
  if (params.p < 0) problems.push({ field: "p", message: "p must be >= 0" });
  if (params.C < 0) problems.push({ field: "C", message: "C must be >= 0" });
  if (params.max_selected !== null && params.max_selected < 1) {
    problems.push({ field: "max_selected", message: "cap must be >= 1" });
  }
  return problems;
}

export class SessionView {
  sessionId = "";
  revision = -1;
  tableLoaded = false;
  alternatives = 0;
  criteria = 0;
  statements: string[] = [];
  /** judgments typed but not yet committed to the service */
  pendingStatements: string[] = [];
  consistent: boolean | null = null;
  params: ParamValues = { ...DEFAULT_PARAMS };
  history: HistoryEntry[] = [];
  report: Report | null = null;
  enumerationProgress: string[][] = [];
  lastError = "";

  constructor(private client: ServiceClient) {}

  async start(): Promise<void> {
    const info = await this.client.createSession();
    this.sessionId = info.id;
    this.revision = info.revision;
  }

  async loadTable(csv: string): Promise<void> {
    const info = await this.client.putTable(this.sessionId, csv);
    this.revision = info.revision;
    this.tableLoaded = true;
    this.alternatives = info.alternatives;
    this.criteria = info.criteria;
    await this.refreshConsistency();
  }

  async loadStatements(lines: string[]): Promise<void> {
    const info = await this.client.putStatements(this.sessionId, lines);
    this.revision = info.revision;
    this.statements = [...lines];
    await this.refreshConsistency();
  }

  /** staged edits are committed explicitly so the DM controls re-solves */
  stageStatement(line: string): void {
    this.pendingStatements.push(line);
  }

  async commitPending(): Promise<void> {
    for (const line of this.pendingStatements) {
      const info = await this.client.addStatement(this.sessionId, line);
      this.revision = info.revision;
      this.statements.push(line);
    }
    this.pendingStatements = [];
    await this.refreshConsistency();
  }

  async addStatement(line: string): Promise<void> {
    this.stageStatement(line);
    await this.commitPending();
  }

  async removeStatement(index: number): Promise<void> {
    const info = await this.client.removeStatement(this.sessionId, index);
    this.revision = info.revision;
    this.statements.splice(index, 1);
    await this.refreshConsistency();
  }

  async refreshConsistency(): Promise<void> {
    if (!this.tableLoaded) return;
    const probe = await this.client.consistency(this.sessionId);
    this.consistent = probe.consistent;
  }

  /** Only a report matching the current revision may be displayed fresh. */
  get reportIsStale(): boolean {
    return this.report !== null && this.report.revision !== this.revision;
  }

  get displayableReport(): Report | null {
    return this.reportIsStale ? null : this.report;
  }

  async solve(overrides: Partial<ParamValues> = {}): Promise<Report> {
    const params = { ...this.params, ...overrides };
    const problems = validateParams(params);
    if (problems.length) {
      throw new Error(problems.map((p) => `${p.field}: ${p.message}`).join("; "));
    }
    this.params = params;
    const body: SolveParamsBody = {
      mode: params.mode, gamma: params.gamma, p: params.p, C: params.C,
      epsilon: params.epsilon, max_selected: params.max_selected,
    };
    const ticket = await this.client.solve(this.sessionId, body, true);
    const status = await this.client.jobStatus(this.sessionId, ticket.job);
    this.enumerationProgress = status.sets_found;
    const report = await this.client.report(this.sessionId, ticket.job);
    this.report = report;
    if (report.selected !== undefined) {
      this.history.push({
        p: params.p, C: params.C, gamma: params.gamma,
        epsilon: params.epsilon, selected: report.selected,
        phi: report.phi ?? null, revision: report.revision,
      });
    }
    return report;
  }
}
