"""HTTP API contract, exercised through the ASGI test client."""

import json

import pytest
from fastapi.testclient import TestClient

from svsp.api import create_app
from svsp.dsl import parse_spec
from svsp.scenario import store_json

from conftest import FIXTURES


@pytest.fixture()
def client(mini_gks):
    return TestClient(create_app(mini_gks, ui=False, session_cap=4))


def make_session(client):
    response = client.post("/api/sessions")
    assert response.status_code == 200
    return response.json()["id"]


def test_summary(client):
    body = client.get("/api/spec/summary").json()
    assert body["functions"] == 11 and body["elements"] == 14
    assert body["states"][0] == "GKCL" and body["consistent"] is True


def test_function_query_returns_ids(client):
    response = client.get("/api/functions", params={"where": "class.states~GKCL"})
    assert response.json() == ["OPEN_GKS"]
    response = client.get("/api/functions")
    assert len(response.json()) == 11


def test_function_query_with_select(client):
    response = client.get(
        "/api/functions",
        params={"where": "name=POLYLINE", "select": "id,class.category"},
    )
    assert response.json() == [{"id": "POLYLINE", "class.category": "output"}]


def test_bad_query_400(client):
    response = client.get("/api/functions", params={"where": "wibble=1"})
    assert response.status_code == 400
    body = response.json()
    assert body["code"] and body["message"]


def test_function_detail_hints(client):
    body = client.get("/api/functions/SET_LINE_WIDTH").json()
    lw = [p for p in body["params"] if p["element"] == "lw"][0]
    assert lw["kind"] == "real" and lw["restriction"] == "value >= 0.0"
    assert lw["bindable"] is True
    state_param = [p for p in body["params"] if p["element"] == "$state"]
    assert state_param == [] or not state_param[0]["bindable"]
    assert client.get("/api/functions/NOPE").status_code == 404


def test_elements_and_types(client):
    assert len(client.get("/api/elements").json()) == 14
    assert client.get("/api/types").json() == ["WidthScale", "Count", "Name", "Point"]


def test_xref_endpoint(client):
    body = client.get("/api/elements/line_width/xref").json()
    assert {u["function"] for u in body["functions"]} == {"SET_LINE_WIDTH", "POLYLINE"}
    assert client.get("/api/elements/ghost/xref").status_code == 404


def test_check_endpoint(client):
    body = client.post("/api/check").json()
    assert body["consistent"] is True and body["diagnostics"] == []


def test_session_lifecycle(client, mini_gks):
    handle = make_session(client)
    store = client.get(f"/api/sessions/{handle}/store").json()
    state_entry = [e for e in store if e["elem"] == "$state"][0]
    assert state_entry == {"elem": "$state", "status": "known", "value": "GKCL"}

    response = client.post(
        f"/api/sessions/{handle}/calls", json={"function": "OPEN_GKS", "bindings": {}}
    )
    assert response.status_code == 200 and response.json()["outcome"] == "ok"

    response = client.post(
        f"/api/sessions/{handle}/calls",
        json={"function": "SET_LINE_WIDTH", "bindings": {"lw": -1.0}},
    )
    assert response.status_code == 422
    body = response.json()
    assert body["outcome"] == "rejected" and body["code"] == "R103" and body["message"]

    trace = client.get(f"/api/sessions/{handle}/trace").json()
    assert [t["outcome"] for t in trace] == ["ok", "rejected"]

    assert client.post(f"/api/sessions/{handle}/reset").json() == {"ok": True}
    trace = client.get(f"/api/sessions/{handle}/trace").json()
    assert trace == []
    assert client.get("/api/sessions/nope/store").status_code == 404


def test_defined_marker_binding_via_null(client):
    handle = make_session(client)
    client.post(f"/api/sessions/{handle}/calls", json={"function": "OPEN_GKS"})
    response = client.post(
        f"/api/sessions/{handle}/calls",
        json={"function": "SET_LINE_WIDTH", "bindings": {"lw": None}},
    )
    assert response.status_code == 200
    store = client.get(f"/api/sessions/{handle}/store").json()
    lw = [e for e in store if e["elem"] == "line_width"][0]
    assert lw["status"] == "defined" and lw["value"] is None


def test_get_endpoints_do_not_mutate(client, mini_gks):
    handle = make_session(client)
    before = client.get(f"/api/sessions/{handle}/store").text
    client.get("/api/functions")
    client.get("/api/functions/POLYLINE")
    client.get("/api/elements/lw/xref")
    client.get(f"/api/sessions/{handle}/trace")
    assert client.get(f"/api/sessions/{handle}/store").text == before


def test_malformed_call_body_400(client):
    handle = make_session(client)
    response = client.post(
        f"/api/sessions/{handle}/calls",
        content=b"{oops",
        headers={"content-type": "application/json"},
    )
    assert response.status_code == 400
    assert response.json()["code"] == "E000"
    response = client.post(f"/api/sessions/{handle}/calls", json={"bindings": {}})
    assert response.status_code == 400


def test_session_cap_evicts_lru(client):
    handles = [make_session(client) for _ in range(5)]
    assert client.get(f"/api/sessions/{handles[0]}/store").status_code == 404
    assert client.get(f"/api/sessions/{handles[-1]}/store").status_code == 200


def test_proposal_flow(client):
    response = client.post(
        "/api/proposals",
        json={"op": "add", "kind": "element", "decl": "data lw : WidthScale"},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["report"]["consistent"] is False
    assert any(d["code"] == "E001" for d in body["report"]["diagnostics"])
    commit = client.post(f"/api/proposals/{body['proposal_id']}/commit")
    assert commit.status_code == 409

    response = client.post(
        "/api/proposals",
        json={"op": "add", "kind": "element",
              "decl": "data pen : Count restrict 0 <= value <= 15 init 0"},
    )
    pid = response.json()["proposal_id"]
    assert response.json()["report"]["consistent"] is True
    commit = client.post(f"/api/proposals/{pid}/commit")
    assert commit.status_code == 200
    assert "data pen : Count" in commit.json()["text"]
    ids = client.get("/api/elements").json()
    assert "pen" in ids


def test_commit_invalidates_sessions(client):
    handle = make_session(client)
    pid = client.post(
        "/api/proposals",
        json={"op": "add", "kind": "element", "decl": "data pen2 : Count"},
    ).json()["proposal_id"]
    assert client.post(f"/api/proposals/{pid}/commit").status_code == 200
    assert client.get(f"/api/sessions/{handle}/store").status_code == 404


def test_stale_proposal_409(client):
    first = client.post(
        "/api/proposals",
        json={"op": "add", "kind": "element", "decl": "data a1 : Count"},
    ).json()["proposal_id"]
    second = client.post(
        "/api/proposals",
        json={"op": "add", "kind": "element", "decl": "data a2 : Count"},
    ).json()["proposal_id"]
    assert client.post(f"/api/proposals/{second}/commit").status_code == 200
    response = client.post(f"/api/proposals/{first}/commit")
    assert response.status_code == 409
    assert response.json()["code"] == "stale_proposal"


def test_malformed_proposal_400(client):
    response = client.post(
        "/api/proposals", json={"op": "add", "kind": "element", "decl": "data ("}
    )
    assert response.status_code == 400
    assert response.json()["code"] == "E000"


def test_check_only_mode_for_inconsistent_spec():
    broken = parse_spec(
        "type C int\ndata n : C restrict 5 <= value <= 4\n"
    ).spec
    client = TestClient(create_app(broken, ui=False))
    summary = client.get("/api/spec/summary")
    assert summary.status_code == 200 and summary.json()["consistent"] is False
    report = client.post("/api/check")
    assert report.status_code == 200 and not report.json()["consistent"]
    assert client.post("/api/sessions").status_code == 409
    assert client.get("/api/functions").status_code == 409


def test_fallback_page_when_ui_missing(mini_gks):
    client = TestClient(create_app(mini_gks, ui=False))
    response = client.get("/")
    assert response.status_code == 200 and "svsp" in response.text
