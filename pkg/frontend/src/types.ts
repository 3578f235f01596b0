// Wire types for the JSON API.

export interface SpecSummary {
  types: number;
  elements: number;
  functions: number;
  states: string[];
  consistent: boolean;
  version: number;
}

export interface ParamInfo {
  element: string;
  direction: string;
  implicit: boolean;
  kind: string; // int | real | string | record
  restriction: string;
  bindable: boolean;
}

export interface EffectInfo {
  id: string;
  abstract: boolean;
  pre: { param: string; required: string; restriction: string | null }[];
  post: { param: string; resulting: string }[];
}

export interface FunctionDetail {
  id: string;
  classification: {
    category: string;
    group: string;
    level: string;
    states: string[];
  };
  params: ParamInfo[];
  effects: EffectInfo[];
}

export interface FunctionRow {
  id: string;
  "class.category": string;
  "class.group": string;
  "class.states": string[];
}

export interface StoreEntry {
  elem: string;
  status: string;
  value: number | string | null;
}

export interface TraceRecord {
  seq: number;
  function: string;
  bindings: Record<string, number | string | null>;
  outcome: "ok" | "rejected";
  code: string | null;
  message?: string;
  effects: { id: string; deltas: StoreEntry[] }[];
  diagnostics: { code: string; entity: string; message: string }[];
}

export interface DiagnosticJson {
  code: string;
  severity: string;
  entity: string;
  message: string;
  line: number | null;
  col: number | null;
}

export interface CheckReportJson {
  consistent: boolean;
  summary: Record<string, number>;
  diagnostics: DiagnosticJson[];
}

export interface ProposalResponse {
  proposal_id: string;
  change: string;
  report: CheckReportJson;
}

export type BindingValue = number | string | null;

export interface ChangeDraft {
  op: "add" | "replace" | "delete";
  kind: "type" | "element" | "function";
  id?: string;
  decl?: string;
}
