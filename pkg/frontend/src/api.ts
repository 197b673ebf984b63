/**
 * Typed client for the prefsel session service.
 *
 * All preference math happens server side; this client only moves JSON.
 * The transport is injectable so tests can run against an in-memory
 * implementation of the same contract.
 */

export interface TransportResponse {
  status: number;
  body: unknown;
}

export interface Transport {
  request(method: string, path: string, body?: string | object,
          contentType?: string): Promise<TransportResponse>;
}

export class HttpTransport implements Transport {
  constructor(private baseUrl: string = "") {}

  async request(method: string, path: string, body?: string | object,
                contentType?: string): Promise<TransportResponse> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      if (typeof body === "string") {
        init.body = body;
        init.headers = { "content-type": contentType ?? "text/plain" };
      } else {
        init.body = JSON.stringify(body);
        init.headers = { "content-type": "application/json" };
      }
    }
    const res = await fetch(this.baseUrl + path, init);
    const text = await res.text();
    let parsed: unknown = text;
    try {
      parsed = text ? JSON.parse(text) : null;
    } catch {
      /* non-JSON body stays as text */
    }
    return { status: res.status, body: parsed };
  }
}

export class ApiError extends Error {
  constructor(public status: number, public detail: unknown) {
    super(`service error ${status}: ${JSON.stringify(detail)}`);
  }
}

export interface SessionInfo { id: string; revision: number; }
export interface TableInfo { revision: number; alternatives: number; criteria: number; }
export interface StatementsInfo { revision: number; count: number; }
export interface ConsistencyInfo { revision: number; consistent: boolean; f_star: number | null; }

export interface SolveParamsBody {
  mode: string;
  gamma?: number;
  p?: number;
  C?: number;
  epsilon?: number;
  max_selected?: number | null;
}

export interface SolveTicket {
  job: string;
  status: string;
  revision: number;
  cached: boolean;
}

export interface JobStatus {
  job: string;
  status: string;
  mode: string;
  revision: number;
  session_revision: number;
  stale: boolean;
  sets_found: string[][];
  error: string | null;
}

export interface MarginalFunction {
  id: string;
  selected: boolean;
  weight: number;
  breakpoints: number[];
  values: number[];
}

export interface SupportSet { criteria: string[]; phi: number | null; }

/** Mirror of the service report schema (fields appear per mode). */
export interface Report {
  mode: string;
  revision: number;
  job: string;
  params: Record<string, unknown>;
  consistent?: boolean;
  f_star?: number;
  selected?: string[];
  sum_delta?: number;
  phi?: number;
  objective?: number;
  empirical_error?: number;
  margin?: number;
  value_function?: MarginalFunction[];
  scores?: Record<string, number>;
  ranking?: string[][];
  support_family?: SupportSet[];
  relevance?: Record<string, number>;
  core?: string[];
  redundant?: string[];
  best_sets?: string[][];
}

function ok(res: TransportResponse): unknown {
  if (res.status >= 400) {
    const detail = (res.body as { detail?: unknown })?.detail ?? res.body;
    throw new ApiError(res.status, detail);
  }
  return res.body;
}

export class ServiceClient {
  constructor(private transport: Transport) {}

  async createSession(): Promise<SessionInfo> {
    return ok(await this.transport.request("POST", "/sessions")) as SessionInfo;
  }

  async putTable(sid: string, csv: string): Promise<TableInfo> {
    return ok(await this.transport.request(
      "PUT", `/sessions/${sid}/table`, csv, "text/csv")) as TableInfo;
  }

  async putStatements(sid: string, lines: string[]): Promise<StatementsInfo> {
    return ok(await this.transport.request(
      "PUT", `/sessions/${sid}/statements`, { lines })) as StatementsInfo;
  }

  async addStatement(sid: string, line: string): Promise<StatementsInfo> {
    return ok(await this.transport.request(
      "POST", `/sessions/${sid}/statements`, { line })) as StatementsInfo;
  }

  async removeStatement(sid: string, index: number): Promise<StatementsInfo> {
    return ok(await this.transport.request(
      "DELETE", `/sessions/${sid}/statements/${index}`)) as StatementsInfo;
  }

  async consistency(sid: string): Promise<ConsistencyInfo> {
    return ok(await this.transport.request(
      "GET", `/sessions/${sid}/consistency`)) as ConsistencyInfo;
  }

  async solve(sid: string, params: SolveParamsBody,
              wait = true): Promise<SolveTicket> {
    const path = `/sessions/${sid}/solve` + (wait ? "?wait=1" : "");
    return ok(await this.transport.request("POST", path, params)) as SolveTicket;
  }

  async jobStatus(sid: string, job: string): Promise<JobStatus> {
    return ok(await this.transport.request(
      "GET", `/sessions/${sid}/solve/${job}/status`)) as JobStatus;
  }

  async report(sid: string, job: string): Promise<Report> {
    return ok(await this.transport.request(
      "GET", `/sessions/${sid}/report/${job}`)) as Report;
  }
}
