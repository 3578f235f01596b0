"""JSON-over-HTTP service for browsing, checking, editing and simulating.

One served specification, one editor workspace, many scenario sessions.
Handlers run on the event loop and contain no awaits between reading a
request and writing its response, so calls to one session can never
interleave; per-handle locks guard against threaded deployments. An editor
commit atomically swaps the served spec and invalidates every session.
"""

from __future__ import annotations

import secrets
import threading
from collections import OrderedDict
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .checker import check_spec
from .dsl import format_spec
from .editor import (
    EditSession,
    NotConsistent,
    StaleProposal,
    UnknownProposal,
    change_from_json,
)
from .model import RecordType, Specification, restriction_text
from .query import EntityKind, InvalidQuery, UnknownElement, evaluate, parse_query, xref
from .scenario import DEFINED, Session, store_json

SESSION_CAP = 64

STATIC_DIR = Path(__file__).parent / "static"

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>svsp</title></head>
<body><h1>svsp service</h1>
<p>The workbench UI is not built. The JSON API is live under <code>/api/</code>.</p>
</body></html>
"""


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"code": code, "message": message}, status_code=status)


class _State:
    """Mutable service state: served spec, editor workspace, scenario sessions."""

    def __init__(self, spec: Specification, session_cap: int = SESSION_CAP):
        self.lock = threading.Lock()
        self.spec = spec
        self.consistent = check_spec(spec).consistent
        self.editor: Optional[EditSession] = EditSession(spec) if self.consistent else None
        self.sessions: "OrderedDict[str, Session]" = OrderedDict()
        self.session_locks: dict[str, threading.Lock] = {}
        self.session_cap = session_cap

    def new_session(self) -> str:
        handle = secrets.token_urlsafe(12)
        with self.lock:
            self.sessions[handle] = Session(self.spec)
            self.session_locks[handle] = threading.Lock()
            while len(self.sessions) > self.session_cap:
                evicted, _ = self.sessions.popitem(last=False)
                self.session_locks.pop(evicted, None)
        return handle

    def get_session(self, handle: str) -> Optional[Session]:
        with self.lock:
            session = self.sessions.get(handle)
            if session is not None:
                self.sessions.move_to_end(handle)
            return session

    def swap_spec(self, spec: Specification) -> None:
        with self.lock:
            self.spec = spec
            self.sessions.clear()
            self.session_locks.clear()


def create_app(
    spec: Specification,
    ui: bool = True,
    static_dir: Optional[Path] = None,
    session_cap: int = SESSION_CAP,
) -> FastAPI:
    app = FastAPI(title="svsp", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    state = _State(spec, session_cap)
    app.state.svsp = state

    @app.exception_handler(RequestValidationError)
    async def malformed(request, exc):  # noqa: ANN001
        return _error(400, "E000", str(exc))

    def gate() -> Optional[JSONResponse]:
        if not state.consistent:
            return _error(
                409, "not_consistent",
                "served specification has check errors; only summary and check respond",
            )
        return None

    # -- browsing --

    @app.get("/api/spec/summary")
    async def summary():
        s = state.spec
        return {
            "types": len(s.types),
            "elements": len(s.elements),
            "functions": len(s.functions),
            "states": list(s.state_decl.states) if s.state_decl else [],
            "consistent": state.consistent,
            "version": state.editor.version if state.editor else 0,
        }

    def _query_endpoint(kind: EntityKind, where: str, select: str):
        try:
            q = parse_query(where or "", default_kind=kind)
            if q.kind != kind:
                raise InvalidQuery(f"this endpoint serves {kind.value} queries")
            if select:
                fields = tuple(s.strip() for s in select.split(",") if s.strip())
                import dataclasses

                q = dataclasses.replace(q, select=fields).validated()
        except InvalidQuery as err:
            return _error(400, "invalid_query", str(err))
        table = evaluate(state.spec, q)
        if not q.select:
            return [row["id"] for row in table.rows]
        return table.rows

    @app.get("/api/functions")
    async def functions(where: str = "", select: str = ""):
        return gate() or _query_endpoint(EntityKind.FUNCTION, where, select)

    @app.get("/api/elements")
    async def elements(where: str = "", select: str = ""):
        return gate() or _query_endpoint(EntityKind.ELEMENT, where, select)

    @app.get("/api/types")
    async def types(where: str = "", select: str = ""):
        return gate() or _query_endpoint(EntityKind.TYPE, where, select)

    @app.get("/api/functions/{fn_id}")
    async def function_detail(fn_id: str):
        blocked = gate()
        if blocked:
            return blocked
        fn = state.spec.functions_by_id().get(fn_id)
        if fn is None:
            return _error(404, "not_found", f"no function '{fn_id}'")
        return _function_json(state.spec, fn)

    @app.get("/api/elements/{elem_id}/xref")
    async def element_xref(elem_id: str):
        blocked = gate()
        if blocked:
            return blocked
        try:
            return xref(state.spec, elem_id).to_json()
        except UnknownElement:
            return _error(404, "not_found", f"no element '{elem_id}'")

    @app.post("/api/check")
    async def check_now():
        return check_spec(state.spec).to_json()

    # -- scenario sessions --

    @app.post("/api/sessions")
    async def create_session():
        blocked = gate()
        if blocked:
            return blocked
        return {"id": state.new_session()}

    def _with_session(handle: str):
        session = state.get_session(handle)
        if session is None:
            return None, _error(404, "not_found", f"no session '{handle}'")
        return session, None

    @app.get("/api/sessions/{handle}/store")
    async def session_store(handle: str):
        session, err = _with_session(handle)
        return err or store_json(session.store)

    @app.get("/api/sessions/{handle}/trace")
    async def session_trace(handle: str):
        session, err = _with_session(handle)
        return err or [r.to_json() for r in session.trace]

    @app.post("/api/sessions/{handle}/reset")
    async def session_reset(handle: str):
        session, err = _with_session(handle)
        if err:
            return err
        with state.session_locks[handle]:
            session.reset()
        return {"ok": True}

    @app.post("/api/sessions/{handle}/calls")
    async def session_call(handle: str, request: Request):
        session, err = _with_session(handle)
        if err:
            return err
        try:
            body = await request.json()
        except Exception:
            return _error(400, "E000", "request body is not valid JSON")
        if not isinstance(body, dict) or not isinstance(body.get("function"), str):
            return _error(400, "E000", 'body must be {"function": ..., "bindings": {...}}')
        raw = body.get("bindings") or {}
        if not isinstance(raw, dict):
            return _error(400, "E000", "bindings must be an object")
        bindings = {k: (DEFINED if v is None else v) for k, v in raw.items()}
        with state.session_locks[handle]:
            record = session.call_function(body["function"], bindings)
        payload = record.to_json()
        if record.ok:
            return payload
        return JSONResponse(payload, status_code=422)

    # -- editing --

    @app.post("/api/proposals")
    async def propose(request: Request):
        blocked = gate()
        if blocked:
            return blocked
        try:
            body = await request.json()
        except Exception:
            return _error(400, "E000", "request body is not valid JSON")
        change, diags = change_from_json(body if isinstance(body, dict) else {})
        if change is None:
            return JSONResponse(
                {"code": "E000", "message": "malformed change",
                 "diagnostics": [d.to_json() for d in diags]},
                status_code=400,
            )
        with state.lock:
            proposal = state.editor.propose(change)
        return {
            "proposal_id": proposal.id,
            "change": change.describe(),
            "report": proposal.report.to_json(),
        }

    @app.post("/api/proposals/{proposal_id}/commit")
    async def commit(proposal_id: str):
        blocked = gate()
        if blocked:
            return blocked
        editor = state.editor
        with state.lock:
            try:
                new_spec = editor.commit(proposal_id)
            except NotConsistent as err:
                return _error(409, "not_consistent", str(err))
            except StaleProposal as err:
                return _error(409, "stale_proposal", str(err))
            except UnknownProposal:
                return _error(404, "not_found", f"no pending proposal '{proposal_id}'")
            state.spec = new_spec
            state.sessions.clear()
            state.session_locks.clear()
        return {"ok": True, "version": editor.version, "text": format_spec(new_spec)}

    # -- workbench assets --

    directory = static_dir if static_dir is not None else STATIC_DIR
    if ui and directory.is_dir() and (directory / "index.html").exists():
        app.mount("/", StaticFiles(directory=directory, html=True), name="workbench")
    else:

        @app.get("/", response_class=HTMLResponse)
        async def index():
            return _FALLBACK_PAGE

    return app


def _function_json(spec: Specification, fn) -> dict:
    elements = spec.elements_by_id()
    params = []
    for p in fn.params:
        elem = elements.get(p.element_ref)
        kind = spec.element_kind(elem) if elem else None
        params.append(
            {
                "element": p.element_ref,
                "direction": p.direction.value,
                "implicit": p.implicit,
                "kind": "record" if isinstance(kind, RecordType)
                        else (kind.value if kind else "unknown"),
                "restriction": restriction_text(elem.restriction) if elem else "",
                "bindable": not p.implicit and p.direction.value in ("in", "inout"),
            }
        )
    effects = []
    for eff in fn.effects:
        effects.append(
            {
                "id": eff.id,
                "abstract": eff.is_abstract,
                "pre": [
                    {
                        "param": pre.param,
                        "required": pre.required.keyword,
                        "restriction": restriction_text(pre.value_restriction)
                        if pre.value_restriction
                        else None,
                    }
                    for pre in eff.pre
                ],
                "post": [
                    {"param": post.param, "resulting": post.resulting.keyword}
                    for post in eff.post
                ],
            }
        )
    c = fn.classification
    return {
        "id": fn.id,
        "classification": {
            "category": c.category,
            "group": c.group,
            "level": c.level,
            "states": list(c.states),
        },
        "params": params,
        "effects": effects,
    }


def serve(spec: Specification, port: int, ui: bool = True) -> None:
    import uvicorn

    app = create_app(spec, ui=ui)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
