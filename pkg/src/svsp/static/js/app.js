// Workbench controller: catalog, call composer, store view, trace list, and
// the edit drawer, wired to the JSON API. One scenario session per page; call
// submissions are serialized (the composer is disabled while one is in flight).
import { ApiError } from "./api.js";
import { callableNow, currentState } from "./gate.js";
import { bindingsLabel, paramHint, parseBinding, showValue } from "./format.js";
export class Workbench {
    constructor(doc, api) {
        this.doc = doc;
        this.api = api;
        this.sessionId = "";
        this.rows = [];
        this.selected = null;
        this.storeEntries = [];
        this.inflight = false;
        this.proposalId = null;
    }
    el(id) {
        const node = this.doc.getElementById(id);
        if (!node)
            throw new Error(`missing #${id}`);
        return node;
    }
    async init() {
        this.el("filter").addEventListener("keydown", (event) => {
            if (event.key === "Enter")
                void this.refreshCatalog();
        });
        this.el("filter-apply").addEventListener("click", () => void this.refreshCatalog());
        this.el("composer-submit").addEventListener("click", () => void this.submitCall());
        this.el("session-reset").addEventListener("click", () => void this.restartSession());
        this.el("drawer-propose").addEventListener("click", () => void this.propose());
        this.el("drawer-commit").addEventListener("click", () => void this.commitProposal());
        const summary = await this.api.summary();
        this.el("summary").textContent =
            `${summary.functions} functions, ${summary.elements} elements, ` +
                `${summary.types} types` +
                (summary.states.length ? `, states: ${summary.states.join(" ")}` : "");
        this.sessionId = await this.api.createSession();
        await this.refreshStore();
        await this.refreshCatalog();
    }
    banner(message) {
        const node = this.el("banner");
        node.textContent = message;
        node.classList.toggle("hidden", message === "");
    }
    // -- catalog -----------------------------------------------------------
    async refreshCatalog() {
        const filter = this.el("filter").value;
        try {
            this.rows = await this.api.functionRows(filter);
            this.banner("");
        }
        catch (err) {
            // keep the previous list; surface the problem without blocking
            this.banner(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
            return;
        }
        this.renderCatalog();
    }
    renderCatalog() {
        const list = this.el("catalog-list");
        list.textContent = "";
        const state = currentState(this.storeEntries);
        for (const row of this.rows) {
            const item = this.doc.createElement("li");
            item.className = "catalog-row";
            item.dataset.fn = row.id;
            const callable = callableNow(row["class.states"], state);
            item.classList.add(callable ? "callable" : "gated");
            const name = this.doc.createElement("span");
            name.className = "fn-name";
            name.textContent = row.id;
            const meta = this.doc.createElement("span");
            meta.className = "fn-meta";
            meta.textContent =
                `${row["class.category"]} / ${row["class.group"]}` +
                    (row["class.states"].length ? ` [${row["class.states"].join(" ")}]` : "");
            item.append(name, meta);
            item.addEventListener("click", () => void this.selectFunction(row.id));
            list.appendChild(item);
        }
    }
    // -- composer ----------------------------------------------------------
    async selectFunction(id) {
        try {
            this.selected = await this.api.functionDetail(id);
        }
        catch (err) {
            this.banner(err instanceof ApiError ? err.message : String(err));
            return;
        }
        this.renderComposer();
    }
    renderComposer() {
        const fn = this.selected;
        const form = this.el("composer-form");
        form.textContent = "";
        this.el("composer-error").textContent = "";
        if (!fn)
            return;
        this.el("composer-title").textContent = fn.id;
        for (const param of fn.params) {
            if (!param.bindable)
                continue;
            const rowNode = this.doc.createElement("div");
            rowNode.className = "composer-field";
            rowNode.dataset.param = param.element;
            const label = this.doc.createElement("label");
            label.textContent = param.element;
            const hint = this.doc.createElement("span");
            hint.className = "hint";
            hint.textContent = paramHint(param);
            const input = this.doc.createElement("input");
            input.type = "text";
            input.className = "binding-input";
            input.dataset.kind = param.kind;
            input.dataset.param = param.element;
            const toggleLabel = this.doc.createElement("label");
            toggleLabel.className = "defined-toggle";
            const toggle = this.doc.createElement("input");
            toggle.type = "checkbox";
            toggle.className = "defined-checkbox";
            toggle.dataset.param = param.element;
            toggleLabel.append(toggle, this.doc.createTextNode(" defined (unknown)"));
            const error = this.doc.createElement("span");
            error.className = "field-error";
            error.dataset.param = param.element;
            rowNode.append(label, hint, input, toggleLabel, error);
            form.appendChild(rowNode);
        }
        this.el("composer-submit").disabled = false;
    }
    /** Read and validate the composer inputs; null means a field was invalid. */
    collectBindings() {
        const fn = this.selected;
        if (!fn)
            return null;
        const bindings = {};
        let valid = true;
        for (const param of fn.params) {
            if (!param.bindable)
                continue;
            const input = this.doc.querySelector(`.binding-input[data-param="${param.element}"]`);
            const toggle = this.doc.querySelector(`.defined-checkbox[data-param="${param.element}"]`);
            const errorNode = this.doc.querySelector(`.field-error[data-param="${param.element}"]`);
            const parsed = parseBinding(param.kind, input?.value ?? "", toggle?.checked ?? false);
            if (parsed.ok) {
                bindings[param.element] = parsed.value;
                if (errorNode)
                    errorNode.textContent = "";
            }
            else {
                valid = false;
                if (errorNode)
                    errorNode.textContent = parsed.error;
            }
        }
        return valid ? bindings : null;
    }
    async submitCall() {
        const fn = this.selected;
        if (!fn || this.inflight)
            return;
        const bindings = this.collectBindings();
        if (bindings === null) {
            this.el("composer-error").textContent = "fix the highlighted fields";
            return;
        }
        this.el("composer-error").textContent = "";
        this.inflight = true;
        const submit = this.el("composer-submit");
        submit.disabled = true;
        try {
            const { record } = await this.api.call(this.sessionId, fn.id, bindings);
            this.appendTraceEntry(record);
            if (record.outcome === "ok") {
                await this.refreshStore();
                this.renderCatalog(); // callable-now highlighting may have moved
            }
        }
        catch (err) {
            this.banner(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
        }
        finally {
            this.inflight = false;
            submit.disabled = false;
        }
    }
    // -- store and trace -----------------------------------------------------
    async refreshStore() {
        this.storeEntries = await this.api.store(this.sessionId);
        const list = this.el("store-list");
        list.textContent = "";
        for (const entry of this.storeEntries) {
            const chip = this.doc.createElement("li");
            chip.className = `chip status-${entry.status}`;
            chip.dataset.elem = entry.elem;
            const name = this.doc.createElement("span");
            name.className = "chip-name";
            name.textContent = entry.elem;
            const status = this.doc.createElement("span");
            status.className = "chip-status";
            status.textContent = entry.status;
            chip.append(name, status);
            if (entry.value !== null) {
                const value = this.doc.createElement("span");
                value.className = "chip-value";
                value.textContent = showValue(entry.value);
                chip.appendChild(value);
            }
            list.appendChild(chip);
        }
    }
    appendTraceEntry(record) {
        const list = this.el("trace-list");
        const item = this.doc.createElement("li");
        item.className = `trace-entry ${record.outcome === "ok" ? "trace-ok" : "trace-rejected"}`;
        item.dataset.seq = String(record.seq);
        const head = this.doc.createElement("span");
        head.className = "trace-head";
        const label = bindingsLabel(record.bindings);
        head.textContent = `#${record.seq} ${record.function}(${label})`;
        item.appendChild(head);
        const detail = this.doc.createElement("span");
        detail.className = "trace-detail";
        if (record.outcome === "ok") {
            const changed = record.effects.flatMap((e) => e.deltas.map((d) => d.elem));
            detail.textContent = changed.length ? `ok: ${[...new Set(changed)].join(", ")}` : "ok";
        }
        else {
            detail.textContent = `${record.code} ${record.message ?? "rejected"}`;
        }
        item.appendChild(detail);
        for (const diag of record.diagnostics) {
            const warn = this.doc.createElement("span");
            warn.className = "trace-warning";
            warn.textContent = `${diag.code}: ${diag.message}`;
            item.appendChild(warn);
        }
        list.appendChild(item);
    }
    async restartSession() {
        this.sessionId = await this.api.createSession();
        this.el("trace-list").textContent = "";
        await this.refreshStore();
        this.renderCatalog();
    }
    // -- edit drawer -----------------------------------------------------------
    readDraft() {
        const op = this.el("drawer-op").value;
        const kind = this.el("drawer-kind").value;
        const id = this.el("drawer-id").value.trim();
        const decl = this.el("drawer-decl").value;
        const draft = { op, kind };
        if (id)
            draft.id = id;
        if (op !== "delete")
            draft.decl = decl;
        return draft;
    }
    async propose() {
        this.proposalId = null;
        const commit = this.el("drawer-commit");
        commit.disabled = true;
        try {
            const response = await this.api.propose(this.readDraft());
            this.proposalId = response.proposal_id;
            this.renderReport(response.report);
            commit.disabled = !response.report.consistent;
            this.el("drawer-warning").textContent = response.report.consistent
                ? "committing restarts every scenario session"
                : "";
        }
        catch (err) {
            if (err instanceof ApiError) {
                this.renderReport(null, `${err.code}: ${err.message}`);
            }
            else {
                this.banner(String(err));
            }
        }
    }
    renderReport(report, error) {
        const node = this.el("drawer-report");
        node.textContent = "";
        if (error) {
            const line = this.doc.createElement("div");
            line.className = "diag diag-error";
            line.textContent = error;
            node.appendChild(line);
            return;
        }
        if (!report)
            return;
        if (report.consistent && report.diagnostics.length === 0) {
            const line = this.doc.createElement("div");
            line.className = "diag diag-clean";
            line.textContent = "consistent: no findings";
            node.appendChild(line);
        }
        for (const diag of report.diagnostics) {
            const line = this.doc.createElement("div");
            line.className = `diag diag-${diag.severity}`;
            line.dataset.entity = diag.entity;
            line.textContent = `${diag.code} ${diag.entity}: ${diag.message}`;
            node.appendChild(line);
        }
    }
    async commitProposal() {
        if (!this.proposalId)
            return;
        try {
            await this.api.commit(this.proposalId);
        }
        catch (err) {
            if (err instanceof ApiError) {
                // conflict: show why, keep the draft so it can be re-proposed
                this.renderReport(null, `${err.code}: ${err.message}`);
                this.el("drawer-commit").disabled = true;
                return;
            }
            throw err;
        }
        this.proposalId = null;
        this.el("drawer-commit").disabled = true;
        this.el("drawer-warning").textContent = "committed; scenario sessions restarted";
        await this.restartSession();
        await this.refreshCatalog();
    }
}
