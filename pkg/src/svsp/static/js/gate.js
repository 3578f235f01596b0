// Client-side copy of the server's state gate. Kept to a set-membership
// check on purpose: anything fancier could drift from the real gate.
export function currentState(store) {
    const entry = store.find((e) => e.elem === "$state");
    return entry && typeof entry.value === "string" ? entry.value : null;
}
export function callableNow(allowedStates, state) {
    if (state === null)
        return true; // spec declares no states: nothing is gated
    return allowedStates.includes(state);
}
