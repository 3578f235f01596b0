// Drives the built workbench against a live `svsp serve mini_gks.svsp`:
// catalog load, happy-path scenario through the composer, the rejected-call
// red row with unchanged store chips, and an edit-drawer propose -> commit
// whose new function then shows up in the catalog.

import { spawn, ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { JSDOM } from "jsdom";
import { afterAll, beforeAll, expect, test } from "vitest";

import { ApiClient } from "../../src/api.js";
import { Workbench } from "../../src/app.js";

const ROOT = join(__dirname, "..", "..", "..");
const PORT = 8791;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let doc: Document;
let bench: Workbench;

async function waitForServer(): Promise<void> {
  for (let tries = 0; tries < 60; tries++) {
    try {
      const response = await fetch(`${BASE}/api/spec/summary`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("svsp serve did not come up");
}

beforeAll(async () => {
  server = spawn("svsp", ["serve", "fixtures/mini_gks.svsp", "--port", String(PORT)], {
    cwd: ROOT,
    stdio: "ignore",
  });
  await waitForServer();
  const html = readFileSync(join(ROOT, "src", "svsp", "static", "index.html"), "utf-8");
  const dom = new JSDOM(html, { url: BASE });
  doc = dom.window.document;
  bench = new Workbench(doc, new ApiClient(BASE));
  await bench.init();
});

afterAll(() => {
  server?.kill();
});

function rows(): HTMLElement[] {
  return Array.from(doc.querySelectorAll<HTMLElement>("#catalog-list .catalog-row"));
}

function chip(elem: string): HTMLElement {
  const node = doc.querySelector<HTMLElement>(`#store-list .chip[data-elem="${elem}"]`);
  if (!node) throw new Error(`no chip for ${elem}`);
  return node;
}

function setField(param: string, value: string): void {
  const input = doc.querySelector<HTMLInputElement>(
    `.binding-input[data-param="${param}"]`,
  );
  if (!input) throw new Error(`no input for ${param}`);
  input.value = value;
}

async function compose(fn: string, fields: Record<string, string>): Promise<void> {
  await bench.selectFunction(fn);
  for (const [param, value] of Object.entries(fields)) setField(param, value);
  await bench.submitCall();
}

test("catalog loads all 11 functions with the state gate highlighted", () => {
  expect(rows()).toHaveLength(11);
  const byId = Object.fromEntries(rows().map((r) => [r.dataset.fn, r]));
  expect(byId["OPEN_GKS"].classList.contains("callable")).toBe(true);
  expect(byId["POLYLINE"].classList.contains("gated")).toBe(true);
  expect(chip("$state").textContent).toContain("GKCL");
});

test("composer shows type and restriction hints", async () => {
  await bench.selectFunction("SET_LINE_WIDTH");
  const hint = doc.querySelector('.composer-field[data-param="lw"] .hint');
  expect(hint?.textContent).toBe("real, value >= 0.0");
  // only the explicit in-parameter gets a field; line_width is implicit
  expect(doc.querySelectorAll("#composer-form .composer-field")).toHaveLength(1);
});

test("client-side kind validation blocks a non-numeric real", async () => {
  await bench.selectFunction("SET_LINE_WIDTH");
  setField("lw", "rather wide");
  await bench.submitCall();
  const error = doc.querySelector('.field-error[data-param="lw"]');
  expect(error?.textContent).toBe("enter a number");
  expect(doc.querySelectorAll("#trace-list .trace-entry")).toHaveLength(0);
});

test("happy path runs green through the composer", async () => {
  await compose("OPEN_GKS", {});
  await compose("OPEN_WORKSTATION", { ws_id: "1", ws_name: "tek4014" });
  await compose("ACTIVATE_WORKSTATION", { ws_id: "1" });
  await compose("SET_LINE_WIDTH", { lw: "2.5" });
  await compose("POLYLINE", { npts: "3" });

  const entries = Array.from(doc.querySelectorAll("#trace-list .trace-entry"));
  expect(entries).toHaveLength(5);
  expect(entries.every((e) => e.classList.contains("trace-ok"))).toBe(true);
  expect(chip("$state").textContent).toContain("WSAC");
  expect(chip("line_width").textContent).toContain("known");
  expect(chip("line_width").textContent).toContain("2.5");
  expect(chip("pline_count").textContent).toContain("1");
  // the gate highlighting followed the state
  const byId = Object.fromEntries(rows().map((r) => [r.dataset.fn, r]));
  expect(byId["POLYLINE"].classList.contains("callable")).toBe(true);
  expect(byId["OPEN_GKS"].classList.contains("gated")).toBe(true);
});

test("rejected call appends a red row and leaves the chips alone", async () => {
  const storeBefore = doc.getElementById("store-list")!.innerHTML;
  await compose("SET_LINE_WIDTH", { lw: "-1" });
  const entries = Array.from(doc.querySelectorAll("#trace-list .trace-entry"));
  expect(entries).toHaveLength(6);
  const last = entries[entries.length - 1]!;
  expect(last.classList.contains("trace-rejected")).toBe(true);
  expect(last.textContent).toContain("R103");
  expect(doc.getElementById("store-list")!.innerHTML).toBe(storeBefore);
});

test("defined toggle submits an unknown-but-present value", async () => {
  await bench.selectFunction("SET_MARKER_SIZE");
  const toggle = doc.querySelector<HTMLInputElement>(
    '.defined-checkbox[data-param="ms"]',
  );
  toggle!.checked = true;
  await bench.submitCall();
  expect(chip("marker_size").textContent).toContain("defined");
  expect(chip("marker_size").querySelector(".chip-value")).toBeNull();
});

test("edit drawer gates a duplicate and commits a clean function", async () => {
  const setValue = (id: string, value: string) => {
    (doc.getElementById(id) as HTMLInputElement | HTMLTextAreaElement).value = value;
  };

  // duplicate element: report shows E001 and commit stays disabled
  setValue("drawer-op", "add");
  setValue("drawer-kind", "element");
  setValue("drawer-decl", "data lw : WidthScale");
  await bench.propose();
  expect(doc.getElementById("drawer-report")!.textContent).toContain("E001");
  expect((doc.getElementById("drawer-commit") as HTMLButtonElement).disabled).toBe(true);

  // a fresh inquiry function over an existing register is clean
  setValue("drawer-kind", "function");
  setValue(
    "drawer-decl",
    [
      "func INQUIRE_LINE_WIDTH {",
      "  class category = inquiry group = polyline_attr level = ma " +
        "states = [GKOP, WSOP, WSAC, SGOP]",
      "  param line_width in implicit",
      "  effect inquire_line_width_main {",
      "    pre line_width defined",
      "    abstract",
      "  }",
      "}",
    ].join("\n"),
  );
  await bench.propose();
  expect(doc.getElementById("drawer-report")!.textContent).toContain("consistent");
  const commitButton = doc.getElementById("drawer-commit") as HTMLButtonElement;
  expect(commitButton.disabled).toBe(false);
  expect(doc.getElementById("drawer-warning")!.textContent).toContain("restarts");

  await bench.commitProposal();
  expect(rows()).toHaveLength(12);
  expect(rows().map((r) => r.dataset.fn)).toContain("INQUIRE_LINE_WIDTH");
  // sessions restarted: fresh store and empty trace
  expect(chip("$state").textContent).toContain("GKCL");
  expect(doc.querySelectorAll("#trace-list .trace-entry")).toHaveLength(0);
});
