// Thin typed client over the JSON API. Every mutation in the workbench goes
// through one of these POST helpers and nothing else.

import type {
  BindingValue,
  ChangeDraft,
  CheckReportJson,
  FunctionDetail,
  FunctionRow,
  ProposalResponse,
  SpecSummary,
  StoreEntry,
  TraceRecord,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function fail(response: Response): Promise<never> {
  let code = "error";
  let message = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body === "object") {
      code = body.code ?? code;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, message);
}

export interface CallOutcome {
  status: number;
  record: TraceRecord;
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) return fail(response);
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) return fail(response);
    return (await response.json()) as T;
  }

  summary(): Promise<SpecSummary> {
    return this.getJson("/api/spec/summary");
  }

  functionRows(where: string): Promise<FunctionRow[]> {
    const params = new URLSearchParams({
      select: "id,class.category,class.group,class.states",
    });
    if (where.trim()) params.set("where", where.trim());
    return this.getJson(`/api/functions?${params.toString()}`);
  }

  functionDetail(id: string): Promise<FunctionDetail> {
    return this.getJson(`/api/functions/${encodeURIComponent(id)}`);
  }

  async createSession(): Promise<string> {
    const body = await this.postJson<{ id: string }>("/api/sessions");
    return body.id;
  }

  store(sessionId: string): Promise<StoreEntry[]> {
    return this.getJson(`/api/sessions/${sessionId}/store`);
  }

  trace(sessionId: string): Promise<TraceRecord[]> {
    return this.getJson(`/api/sessions/${sessionId}/trace`);
  }

  /** Ok calls resolve with status 200; rejected calls resolve with 422. */
  async call(
    sessionId: string,
    functionId: string,
    bindings: Record<string, BindingValue>,
  ): Promise<CallOutcome> {
    const response = await fetch(`${this.base}/api/sessions/${sessionId}/calls`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ function: functionId, bindings }),
    });
    if (response.status !== 200 && response.status !== 422) return fail(response);
    const record = (await response.json()) as TraceRecord;
    return { status: response.status, record };
  }

  check(): Promise<CheckReportJson> {
    return this.postJson("/api/check");
  }

  propose(draft: ChangeDraft): Promise<ProposalResponse> {
    return this.postJson("/api/proposals", draft);
  }

  commit(proposalId: string): Promise<{ ok: boolean; version: number }> {
    return this.postJson(`/api/proposals/${proposalId}/commit`);
  }
}
