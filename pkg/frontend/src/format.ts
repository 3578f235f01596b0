// Field hints, binding validation, and small display helpers.

import type { BindingValue, ParamInfo } from "./types.js";

/** Composer field label, e.g. "real, value >= 0.0". */
export function paramHint(param: ParamInfo): string {
  if (param.restriction === "unrestricted" || param.restriction === "") {
    return param.kind;
  }
  return `${param.kind}, ${param.restriction}`;
}

export type Parsed =
  | { ok: true; value: BindingValue }
  | { ok: false; error: string };

const INT_RE = /^[+-]?\d+$/;
const REAL_RE = /^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$/;

/**
 * Turn raw composer input into a binding value, client-side.
 * `defined` wins over the text field and maps to null on the wire.
 */
export function parseBinding(kind: string, raw: string, defined: boolean): Parsed {
  if (defined) return { ok: true, value: null };
  const text = raw.trim();
  if (kind === "int") {
    if (!INT_RE.test(text)) return { ok: false, error: "enter an integer" };
    return { ok: true, value: parseInt(text, 10) };
  }
  if (kind === "real") {
    if (!REAL_RE.test(text)) return { ok: false, error: "enter a number" };
    return { ok: true, value: parseFloat(text) };
  }
  if (kind === "string") {
    return { ok: true, value: raw };
  }
  return { ok: false, error: `${kind} parameters can only be bound as defined` };
}

export function showValue(value: number | string | null): string {
  if (value === null) return "";
  if (typeof value === "string") return JSON.stringify(value);
  return String(value);
}

export function bindingsLabel(bindings: Record<string, BindingValue>): string {
  const parts = Object.entries(bindings).map(([name, value]) =>
    value === null ? `${name}=defined` : `${name}=${showValue(value)}`,
  );
  return parts.join(", ");
}
