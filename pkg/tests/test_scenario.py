"""Scenario sessions: gating, bindings, transforms, atomicity, scripts."""

import itertools
import random

import pytest

from svsp.checker import check_status_flow
from svsp.dsl import parse_spec
from svsp.model import Status
from svsp.scenario import (
    DEFINED,
    InconsistentSpec,
    ScriptSyntaxError,
    Session,
    new_session,
    parse_script,
    run_script,
    store_text,
    trace_json,
)

from conftest import FIXTURES


def make_spec(text):
    outcome = parse_spec(text)
    assert outcome.ok, [d.render() for d in outcome.diagnostics]
    return outcome.spec


@pytest.fixture()
def session(mini_gks) -> Session:
    return Session(mini_gks)


def open_up_to_active(session):
    assert session.call_function("OPEN_GKS").ok
    assert session.call_function("OPEN_WORKSTATION", {"ws_id": 1, "ws_name": "tek"}).ok
    assert session.call_function("ACTIVATE_WORKSTATION", {"ws_id": 1}).ok


# --- session setup -----------------------------------------------------------


def test_initial_store(session, mini_gks):
    assert session.store["$state"].value == "GKCL"
    assert session.store["line_width"].status == Status.DEFINED
    assert session.store["seg_count"].value == 0
    assert len(session.store) == len(mini_gks.elements) + 1


def test_no_states_no_state_entry():
    spec = make_spec("type C int\ndata x : C\n"
                     "func F {\n  class category = c group = g level = l states = []\n"
                     "  param x in\n  effect e1 { abstract }\n}")
    assert "$state" not in Session(spec).store


def test_inconsistent_spec_refused():
    spec = make_spec("type C int\ndata x : C restrict 5 <= value <= 4\n"
                     "func F {\n  class category = c group = g level = l states = []\n"
                     "  param x in\n  effect e1 { abstract }\n}")
    with pytest.raises(InconsistentSpec):
        new_session(spec)


# --- call pipeline ----------------------------------------------------------


def test_state_gate_rejects_before_open(session):
    rec = session.call_function("SET_LINE_WIDTH", {"lw": 2.5})
    assert rec.outcome == "rejected" and rec.code == "R102"


def test_happy_set_line_width(session):
    assert session.call_function("OPEN_GKS").ok
    rec = session.call_function("SET_LINE_WIDTH", {"lw": 2.5})
    assert rec.ok
    assert session.store["line_width"].value == 2.5
    assert session.store["$state"].value == "GKOP"


def test_restriction_gate_is_atomic(session):
    session.call_function("OPEN_GKS")
    before = store_text(session.store)
    rec = session.call_function("SET_LINE_WIDTH", {"lw": -1.0})
    assert rec.code == "R103"
    assert store_text(session.store) == before


def test_unknown_function_r101(session):
    assert session.call_function("NO_SUCH").code == "R101"


def test_missing_binding_r105(session):
    session.call_function("OPEN_GKS")
    rec = session.call_function("OPEN_WORKSTATION", {"ws_id": 1})
    assert rec.code == "R105" and "ws_name" in rec.message


def test_extra_binding_r106(session):
    rec = session.call_function("OPEN_GKS", {"zzz": 1})
    assert rec.code == "R106"


def test_kind_mismatch_r106(session):
    session.call_function("OPEN_GKS")
    rec = session.call_function("OPEN_WORKSTATION", {"ws_id": 1.5, "ws_name": "tek"})
    assert rec.code == "R106"


def test_int_promotes_to_real_binding(session):
    session.call_function("OPEN_GKS")
    rec = session.call_function("SET_LINE_WIDTH", {"lw": 2})
    assert rec.ok
    assert session.store["line_width"].value == 2.0


def test_effect_pre_restriction_checked_on_binding(session):
    open_up_to_active(session)
    rec = session.call_function("POLYLINE", {"npts": 1})
    assert rec.code == "R103"  # npts >= 2 both at element and pre level


def test_defined_marker_flows_symbolically(session):
    session.call_function("OPEN_GKS")
    rec = session.call_function("SET_LINE_WIDTH", {"lw": DEFINED})
    assert rec.ok
    entry = session.store["line_width"]
    assert entry.status == Status.DEFINED and entry.value is None


def test_defined_marker_cannot_satisfy_known_pre(session):
    session.call_function("OPEN_GKS")
    rec = session.call_function("OPEN_WORKSTATION", {"ws_id": DEFINED, "ws_name": "tek"})
    assert rec.code == "R104"


def test_post_lowers_status_and_clears_value(session):
    open_up_to_active(session)
    session.call_function("DEACTIVATE_WORKSTATION", {"ws_id": 1})
    assert session.store["ws_conn"].value == "tek_conn"
    rec = session.call_function("CLOSE_WORKSTATION", {"ws_id": 1})
    assert rec.ok
    entry = session.store["ws_conn"]
    assert entry.status == Status.ALLOCATED and entry.value is None


def test_transform_arithmetic(session):
    open_up_to_active(session)
    session.call_function("CREATE_SEGMENT", {"seg_id": 4})
    assert session.store["seg_count"].value == 1
    assert session.store["open_segment"].value == 4
    assert session.store["$state"].value == "SGOP"
    session.call_function("CLOSE_SEGMENT")
    assert session.store["open_segment"].value == 0
    assert session.store["$state"].value == "WSAC"


DIV_SPEC = """
type C int
data a : C
data b : C
data q : C
func DIV {
  class category = c group = g level = l states = []
  param a in
  param b in
  param q out implicit
  effect div_main {
    pre a known
    pre b known
    q := a / b
  }
}
func GUARD {
  class category = c group = g level = l states = []
  param a in
  param b in
  effect guard_main {
    pre a known
    pre b defined
    require a > 0
    require b > a
  }
}
"""


def test_division_by_zero_r107():
    session = Session(make_spec(DIV_SPEC))
    rec = session.call_function("DIV", {"a": 3, "b": 0})
    assert rec.code == "R107"
    assert session.store["q"].status == Status.UNALLOCATED


def test_int_division_truncates_toward_zero():
    session = Session(make_spec(DIV_SPEC))
    assert session.call_function("DIV", {"a": -7, "b": 2}).ok
    assert session.store["q"].value == -3


def test_require_failure_r108():
    session = Session(make_spec(DIV_SPEC))
    rec = session.call_function("GUARD", {"a": 0, "b": 1})
    assert rec.code == "R108"


def test_require_over_defined_warns_w201():
    session = Session(make_spec(DIV_SPEC))
    rec = session.call_function("GUARD", {"a": 5, "b": DEFINED})
    assert rec.ok
    assert any(d["code"] == "W201" for d in rec.diagnostics)


def test_rejected_record_has_no_deltas(session):
    rec = session.call_function("SET_LINE_WIDTH", {"lw": 2.5})
    assert rec.outcome == "rejected" and rec.effects == []


# --- snapshots and atomicity --------------------------------------------------


def test_snapshot_equals_init_store(session, mini_gks):
    from svsp.scenario import initial_store

    assert session.snapshot() == initial_store(mini_gks)


def test_snapshot_unchanged_by_rejection(session):
    before = session.snapshot()
    session.call_function("POLYLINE", {"npts": 3})
    assert session.snapshot() == before


def test_snapshot_after_ok_differs_only_by_deltas(session):
    before = session.snapshot()
    rec = session.call_function("OPEN_GKS")
    after = session.snapshot()
    replay = dict(before)
    for log in rec.effects:
        for name, entry in log.deltas:
            replay[name] = entry
    assert replay == after


def random_binding(rng, name):
    pool = [
        rng.randint(-5, 10),
        rng.uniform(-3, 10),
        rng.choice(["tek", "", "x" * 20, "_conn"]),
        DEFINED,
    ]
    return rng.choice(pool)


def test_atomicity_fuzz_small(mini_gks):
    session = Session(mini_gks)
    rng = random.Random(99)
    fn_ids = [f.id for f in mini_gks.functions] + ["BOGUS"]
    elements = {e.id: e for e in mini_gks.elements}
    for _ in range(800):
        fn_id = rng.choice(fn_ids)
        fn = mini_gks.functions_by_id().get(fn_id)
        names = (
            [p.element_ref for p in fn.params if not p.implicit] if fn else ["x"]
        )
        bindings = {}
        for name in names:
            if rng.random() < 0.85:
                bindings[name] = random_binding(rng, name)
        before = store_text(session.store)
        rec = session.call_function(fn_id, bindings)
        if rec.outcome == "rejected":
            assert store_text(session.store) == before
        for name, entry in session.store.items():
            assert (entry.value is not None) == (entry.status == Status.KNOWN)
            if entry.value is not None and name in elements:
                from svsp.model import restriction_admits

                assert restriction_admits(elements[name].restriction, entry.value)


# --- scripts ------------------------------------------------------------------


def test_happy_script(mini_gks):
    result = run_script(mini_gks, (FIXTURES / "happy.svs").read_text())
    assert result.passed == 5 and result.failed == 0


def test_gate_script(mini_gks):
    result = run_script(mini_gks, (FIXTURES / "gate.svs").read_text())
    assert result.ok and result.passed == 1


def test_assert_status_before_set_fails(mini_gks):
    result = run_script(mini_gks, "assert-status line_width known\n")
    assert result.failed == 1


def test_assert_directives(mini_gks):
    text = "\n".join(
        [
            "call OPEN_GKS",
            "call OPEN_WORKSTATION ws_id=2 ws_name=\"plotter\"",
            "assert open_ws == 2",
            "assert-status ws_conn known",
            "assert ws_conn == \"plotter_conn\"",
            "assert open_ws >= 1",
        ]
    )
    result = run_script(mini_gks, text)
    assert result.failed == 0


def test_unexpected_rejection_fails_but_continues(mini_gks):
    text = "call POLYLINE npts=3\ncall OPEN_GKS\n"
    result = run_script(mini_gks, text)
    assert [r.passed for r in result.results] == [False, True]


def test_script_syntax_error_executes_nothing(mini_gks):
    with pytest.raises(ScriptSyntaxError):
        parse_script("call OPEN_GKS\nfrobnicate\n")
    with pytest.raises(ScriptSyntaxError):
        run_script(mini_gks, "call OPEN_GKS\nexpect-error Q999 call X\n")


def test_trace_serialization_deterministic(mini_gks):
    text = (FIXTURES / "happy.svs").read_text() + "call SET_LINE_WIDTH lw=defined\n"
    a = trace_json(run_script(mini_gks, text).trace)
    b = trace_json(run_script(mini_gks, text).trace)
    assert a == b
    assert '"outcome": "ok"' in a


def test_state_gate_soundness_over_trace(mini_gks):
    rng = random.Random(3)
    session = Session(mini_gks)
    fn_by_id = mini_gks.functions_by_id()
    fn_ids = list(fn_by_id)
    for _ in range(400):
        state_before = session.store["$state"].value
        fn_id = rng.choice(fn_ids)
        bindings = {}
        fn = fn_by_id[fn_id]
        for p in fn.params:
            if not p.implicit and p.direction.value in ("in", "inout"):
                bindings[p.element_ref] = random_binding(rng, p.element_ref)
        rec = session.call_function(fn_id, bindings)
        if rec.ok:
            assert state_before in fn.classification.states


# --- agreement with the static analyzer --------------------------------------


def test_r104_agrees_with_status_flow():
    statuses = ["unallocated", "allocated", "defined", "known"]
    for required, actual in itertools.product(statuses, statuses):
        init = "" if actual == "unallocated" else (
            " init 1" if actual == "known" else f" init {actual}"
        )
        spec = make_spec(
            f"type C int\ndata x : C{init}\n"
            "func F {\n  class category = c group = g level = l states = []\n"
            "  param x in implicit\n"
            f"  effect e1 {{ pre x {required} abstract }}\n}}"
        )
        session = Session(spec)
        rec = session.call_function("F")
        rejected = rec.outcome == "rejected" and rec.code == "R104"
        flow = check_status_flow(
            spec.functions[0], spec,
            entry_statuses={"x": Status.from_keyword(actual)},
        )
        statically_flagged = any(d.code == "E004" and "x" in d.entity for d in flow)
        assert rejected == statically_flagged == (
            statuses.index(actual) < statuses.index(required)
        )
