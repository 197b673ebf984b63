/**
 * In-memory stand-in for the prefsel service, backed by responses captured
 * from the real thing (test/fixtures/*.json).  It reproduces the contract
 * the UI depends on: revision bumps on edits, per-(revision, mode, params)
 * job identity, revision-stamped reports, consistency flips when a strict
 * cycle appears, and streamed enumeration sets in job status.
 */

import { Transport, TransportResponse } from "../src/api.js";

import selectP10 from "./fixtures/select_p10.json";
import selectP100 from "./fixtures/select_p100.json";
import selectP200 from "./fixtures/select_p200.json";
import relevanceG5 from "./fixtures/relevance_g5.json";

type Json = Record<string, unknown>;

interface MockJob {
  id: string;
  revision: number;
  mode: string;
  report: Json | null;
  setsFound: string[][];
  errorStatus: number | null;
  errorBody: Json | null;
}

interface MockSession {
  id: string;
  revision: number;
  alternatives: string[];
  criteria: string[];
  statements: string[];
  jobs: Map<string, MockJob>;
  cache: Map<string, string>;
  jobCounter: number;
}

const CANNED_SELECT: Record<number, Json> = {
  10: selectP10 as Json,
  100: selectP100 as Json,
  200: selectP200 as Json,
};

function hasStrictCycle(statements: string[]): boolean {
  const strict = new Set(
    statements.filter((s) => s.includes(">"))
      .map((s) => s.split(">").map((t) => t.trim()).join(">")));
  for (const s of strict) {
    const [a, b] = s.split(">");
    if (strict.has(`${b}>${a}`)) return true;
  }
  return false;
}

export class MockServiceTransport implements Transport {
  sessions = new Map<string, MockSession>();
  private counter = 0;

  async request(method: string, path: string,
                body?: string | object): Promise<TransportResponse> {
    return this.route(method, path, body);
  }

  private ok(body: unknown): TransportResponse {
    return { status: 200, body };
  }

  private err(status: number, code: string, extra: Json = {}): TransportResponse {
    return { status, body: { detail: { code, ...extra } } };
  }

  private route(method: string, path: string,
                body?: string | object): TransportResponse {
    if (method === "POST" && path === "/sessions") {
      const id = `mock${++this.counter}`;
      this.sessions.set(id, {
        id, revision: 0, alternatives: [], criteria: [], statements: [],
        jobs: new Map(), cache: new Map(), jobCounter: 0,
      });
      return { status: 201, body: { id, revision: 0 } };
    }
    const m = path.match(/^\/sessions\/([^/]+)(\/.*)?$/);
    if (!m) return this.err(404, "unknown-route");
    const session = this.sessions.get(m[1]);
    if (!session) return this.err(404, "unknown-session");
    const rest = m[2] ?? "";

    if (method === "PUT" && rest === "/table") {
      const csv = typeof body === "string" ? body : String(body);
      const lines = csv.trim().split("\n");
      session.criteria = lines[0].split(",").slice(1).map((c) => c.split(":")[0]);
      session.alternatives = lines.slice(1).map((ln) => ln.split(",")[0]);
      session.revision += 1;
      return this.ok({ revision: session.revision,
                       alternatives: session.alternatives.length,
                       criteria: session.criteria.length });
    }
    if (method === "PUT" && rest === "/statements") {
      const lines = typeof body === "object" && body !== null
        ? (body as { lines: string[] }).lines : [];
      const bad = lines.find((ln) => !/^\S+ (>|~) \S+$/.test(ln));
      if (bad !== undefined) {
        return this.err(422, "bad-statement", { error: `line: ${bad}` });
      }
      session.statements = [...lines];
      session.revision += 1;
      return this.ok({ revision: session.revision, count: lines.length });
    }
    if (method === "POST" && rest === "/statements") {
      const line = (body as { line: string }).line;
      if (!/^\S+ (>|~) \S+$/.test(line)) {
        return this.err(422, "bad-statement", { error: `line 1: ${line}` });
      }
      session.statements.push(line);
      session.revision += 1;
      return this.ok({ revision: session.revision,
                       count: session.statements.length });
    }
    const del = rest.match(/^\/statements\/(\d+)$/);
    if (method === "DELETE" && del) {
      const k = Number(del[1]);
      if (k >= session.statements.length) {
        return this.err(404, "unknown-statement");
      }
      session.statements.splice(k, 1);
      session.revision += 1;
      return this.ok({ revision: session.revision,
                       count: session.statements.length });
    }
    if (method === "GET" && rest === "/consistency") {
      const consistent = !hasStrictCycle(session.statements);
      return this.ok({ revision: session.revision, consistent,
                       f_star: consistent ? 0.0 : null });
    }
    if (method === "POST" && rest.startsWith("/solve")) {
      return this.solve(session, body as Json);
    }
    const status = rest.match(/^\/solve\/([^/]+)\/status$/);
    if (method === "GET" && status) {
      const job = session.jobs.get(status[1]);
      if (!job) return this.err(404, "unknown-job");
      return this.ok({
        job: job.id, status: job.errorStatus ? "error" : "done",
        mode: job.mode, revision: job.revision,
        session_revision: session.revision,
        stale: job.revision !== session.revision,
        sets_found: job.setsFound, error: null,
      });
    }
    const rep = rest.match(/^\/report\/([^/]+)$/);
    if (method === "GET" && rep) {
      const job = session.jobs.get(rep[1]);
      if (!job) return this.err(404, "unknown-job");
      if (job.errorStatus) return { status: job.errorStatus,
                                    body: { detail: job.errorBody } };
      return this.ok(job.report);
    }
    return this.err(404, "unknown-route");
  }

  private solve(session: MockSession, params: Json): TransportResponse {
    if (session.alternatives.length === 0) return this.err(409, "no-table");
    if (session.statements.length === 0) return this.err(409, "no-statements");
    const mode = params.mode as string;
    const key = `${session.revision}|${JSON.stringify(params)}`;
    const cached = session.cache.get(key);
    if (cached) {
      return this.ok({ job: cached, status: "done",
                       revision: session.revision, cached: true });
    }
    const job: MockJob = {
      id: `j${++session.jobCounter}`, revision: session.revision, mode,
      report: null, setsFound: [], errorStatus: null, errorBody: null,
    };
    const inconsistent = hasStrictCycle(session.statements);
    const consistentOnly = ["select-consistent", "representative",
                            "enumerate", "relevance", "rank"];
    if (inconsistent && consistentOnly.includes(mode)) {
      job.errorStatus = 409;
      job.errorBody = { code: "solve-failed", error: "inconsistent judgments" };
    } else if (mode === "select-consistent" && (params.p as number) in CANNED_SELECT) {
      job.report = { ...CANNED_SELECT[params.p as number],
                     revision: session.revision, job: job.id };
    } else if (mode === "relevance" || mode === "enumerate") {
      const canned = relevanceG5 as Json;
      job.report = { ...canned, mode, revision: session.revision, job: job.id };
      job.setsFound = (canned.support_family as { criteria: string[] }[])
        .map((e) => e.criteria);
    } else if (mode === "consistency") {
      job.report = { mode, consistent: !inconsistent,
                     f_star: inconsistent ? 1 : 0,
                     revision: session.revision, job: job.id, params };
    } else {
      job.errorStatus = 422;
      job.errorBody = { code: "not-canned", mode };
    }
    session.jobs.set(job.id, job);
    session.cache.set(key, job.id);
    return this.ok({ job: job.id, status: job.errorStatus ? "error" : "done",
                     revision: job.revision, cached: false });
  }
}
