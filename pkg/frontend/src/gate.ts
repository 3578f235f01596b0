// Client-side copy of the server's state gate. Kept to a set-membership
// check on purpose: anything fancier could drift from the real gate.

export function currentState(
  store: { elem: string; value: number | string | null }[],
): string | null {
  const entry = store.find((e) => e.elem === "$state");
  return entry && typeof entry.value === "string" ? entry.value : null;
}

export function callableNow(
  allowedStates: string[],
  state: string | null,
): boolean {
  if (state === null) return true; // spec declares no states: nothing is gated
  return allowedStates.includes(state);
}
