import { describe, expect, test } from "vitest";

import { callableNow, currentState } from "../../src/gate.js";

describe("currentState", () => {
  test("reads the $state chip", () => {
    const store = [
      { elem: "lw", value: null },
      { elem: "$state", value: "GKCL" },
    ];
    expect(currentState(store)).toBe("GKCL");
  });

  test("absent when the spec declares no states", () => {
    expect(currentState([{ elem: "x", value: 3 }])).toBeNull();
  });
});

describe("callableNow", () => {
  test("plain set membership", () => {
    expect(callableNow(["GKCL"], "GKCL")).toBe(true);
    expect(callableNow(["WSAC", "SGOP"], "GKCL")).toBe(false);
  });

  test("no state machine means no gating", () => {
    expect(callableNow([], null)).toBe(true);
  });

  test("empty allowed set is never callable", () => {
    expect(callableNow([], "GKOP")).toBe(false);
  });
});
