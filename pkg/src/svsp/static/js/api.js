// Thin typed client over the JSON API. Every mutation in the workbench goes
// through one of these POST helpers and nothing else.
export class ApiError extends Error {
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
    }
}
async function fail(response) {
    let code = "error";
    let message = response.statusText;
    try {
        const body = await response.json();
        if (body && typeof body === "object") {
            code = body.code ?? code;
            message = body.message ?? message;
        }
    }
    catch {
        // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, code, message);
}
export class ApiClient {
    constructor(base = "") {
        this.base = base;
    }
    async getJson(path) {
        const response = await fetch(this.base + path);
        if (!response.ok)
            return fail(response);
        return (await response.json());
    }
    async postJson(path, body) {
        const response = await fetch(this.base + path, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        if (!response.ok)
            return fail(response);
        return (await response.json());
    }
    summary() {
        return this.getJson("/api/spec/summary");
    }
    functionRows(where) {
        const params = new URLSearchParams({
            select: "id,class.category,class.group,class.states",
        });
        if (where.trim())
            params.set("where", where.trim());
        return this.getJson(`/api/functions?${params.toString()}`);
    }
    functionDetail(id) {
        return this.getJson(`/api/functions/${encodeURIComponent(id)}`);
    }
    async createSession() {
        const body = await this.postJson("/api/sessions");
        return body.id;
    }
    store(sessionId) {
        return this.getJson(`/api/sessions/${sessionId}/store`);
    }
    trace(sessionId) {
        return this.getJson(`/api/sessions/${sessionId}/trace`);
    }
    /** Ok calls resolve with status 200; rejected calls resolve with 422. */
    async call(sessionId, functionId, bindings) {
        const response = await fetch(`${this.base}/api/sessions/${sessionId}/calls`, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify({ function: functionId, bindings }),
        });
        if (response.status !== 200 && response.status !== 422)
            return fail(response);
        const record = (await response.json());
        return { status: response.status, record };
    }
    check() {
        return this.postJson("/api/check");
    }
    propose(draft) {
        return this.postJson("/api/proposals", draft);
    }
    commit(proposalId) {
        return this.postJson(`/api/proposals/${proposalId}/commit`);
    }
}
