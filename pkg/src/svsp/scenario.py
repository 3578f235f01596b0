"""Dynamic simulation of function calls against a store of element statuses.

A session holds the live store; every call either commits atomically or is
rejected with an R-code and leaves the store untouched. Defined-but-unknown
values flow through transforms symbolically: results exist but carry no
value, and guards over them warn (W201) instead of deciding.

Rejection codes:
  R101 unknown function      R102 state violation      R103 restriction violation
  R104 status violation      R105 missing binding      R106 type mismatch
  R107 division by zero      R108 require failed
Dynamic warnings: W201 unverifiable guard.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .checker import check_spec, first_mention_pre
from .dsl import format_statement, tokenize
from .model import (
    Assign,
    BaseKind,
    BinOp,
    Diagnostic,
    Direction,
    Expr,
    LenOp,
    Lit,
    Literal,
    Loc,
    Neg,
    RecordType,
    Ref,
    Specification,
    Status,
    STATE_ELEMENT,
    expr_refs,
    restriction_admits,
)

REJECTION_CODES = ("R101", "R102", "R103", "R104", "R105", "R106", "R107", "R108")


class ScenarioError(Exception):
    pass


class InconsistentSpec(ScenarioError):
    """Only a specification with zero check errors can be simulated."""


class DefinedMarker:
    """Binding marker: the element has a value, but the caller will not say which."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "defined"


DEFINED = DefinedMarker()

Binding = dict[str, Union[Literal, DefinedMarker]]


@dataclass(frozen=True)
class StoreEntry:
    status: Status
    value: Optional[Literal] = None  # present iff status is KNOWN


Store = dict[str, StoreEntry]


@dataclass
class EffectLog:
    effect: str
    statements: Optional[list[str]]  # None for abstract bodies
    deltas: list[tuple[str, StoreEntry]]

    def to_json(self) -> dict:
        return {
            "id": self.effect,
            "deltas": [
                {"elem": name, "status": entry.status.keyword, "value": entry.value}
                for name, entry in self.deltas
            ],
        }


@dataclass
class TraceRecord:
    seq: int
    function: str
    bindings: Binding
    outcome: str  # "ok" | "rejected"
    code: Optional[str] = None
    message: Optional[str] = None
    effects: list[EffectLog] = field(default_factory=list)
    diagnostics: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.outcome == "ok"

    def to_json(self) -> dict:
        out = {
            "seq": self.seq,
            "function": self.function,
            "bindings": {
                k: (None if isinstance(v, DefinedMarker) else v)
                for k, v in self.bindings.items()
            },
            "outcome": self.outcome,
            "code": self.code,
            "effects": [e.to_json() for e in self.effects],
            "diagnostics": list(self.diagnostics),
        }
        if self.message is not None:
            out["message"] = self.message
        return out


class _Reject(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


def store_json(store: Store) -> list[dict]:
    return [
        {"elem": name, "status": entry.status.keyword, "value": entry.value}
        for name, entry in store.items()
    ]


def store_text(store: Store) -> str:
    """Canonical serialized form, used for golden files and atomicity checks."""
    return json.dumps(store_json(store), indent=2) + "\n"


def initial_store(spec: Specification) -> Store:
    store: Store = {}
    types = spec.types_by_id()
    for elem in spec.elements:
        value = elem.init_value
        if value is not None:
            ty = types.get(elem.type_ref)
            if ty is not None and ty.base == BaseKind.REAL:
                value = float(value)
        store[elem.id] = StoreEntry(elem.init_status, value)
    if spec.state_decl is not None:
        store[STATE_ELEMENT] = StoreEntry(Status.KNOWN, spec.state_decl.states[0])
    return store


class Session:
    """Single-writer scenario session over an immutable, consistent Specification."""

    def __init__(self, spec: Specification):
        report = check_spec(spec)
        if not report.consistent:
            raise InconsistentSpec(
                f"specification has {len(report.diagnostics)} check findings; "
                "fix errors before simulating"
            )
        self.spec = spec
        self._functions = spec.functions_by_id()
        self._elements = spec.elements_by_id()
        self._types = spec.types_by_id()
        self.store: Store = initial_store(spec)
        self.trace: list[TraceRecord] = []

    # -- public operations --

    def reset(self) -> None:
        self.store = initial_store(self.spec)
        self.trace = []

    def snapshot(self) -> Store:
        return dict(self.store)

    def call_function(self, function_id: str, bindings: Optional[Binding] = None) -> TraceRecord:
        bindings = dict(bindings or {})
        seq = len(self.trace) + 1
        record = TraceRecord(seq, function_id, bindings, "ok")
        try:
            shadow = self._execute(function_id, bindings, record)
        except _Reject as rej:
            record.outcome = "rejected"
            record.code = rej.code
            record.message = rej.message
            record.effects = []
            self.trace.append(record)
            return record
        self.store = shadow
        self.trace.append(record)
        return record

    # -- call pipeline --

    def _execute(self, function_id: str, bindings: Binding, record: TraceRecord) -> Store:
        fn = self._functions.get(function_id)
        if fn is None:
            raise _Reject("R101", f"unknown function '{function_id}'")
        if self.spec.state_decl is not None:
            current = self.store[STATE_ELEMENT].value
            if current not in fn.classification.states:
                allowed = ", ".join(fn.classification.states) or "none"
                raise _Reject(
                    "R102",
                    f"{fn.id} is not callable in state {current} (allowed: {allowed})",
                )
        shadow = self._bind(fn, bindings)
        for p in fn.params:
            pre = first_mention_pre(fn, p.element_ref)
            if pre is None:
                continue
            actual = shadow[p.element_ref].status
            if actual < pre.required:
                raise _Reject(
                    "R104",
                    f"'{p.element_ref}' must be {pre.required.keyword} "
                    f"but is {actual.keyword}",
                )
        for eff in fn.effects:
            before = dict(shadow)
            statements: Optional[list[str]] = None
            if eff.body is not None:
                statements = []
                for stmt in eff.body:
                    statements.append(self._run_statement(fn, stmt, shadow, record))
            for post in eff.post:
                current = shadow[post.param]
                if post.resulting == Status.KNOWN and current.value is not None:
                    entry = StoreEntry(Status.KNOWN, current.value)
                elif post.resulting == Status.KNOWN:
                    # nothing to promise a value with; the simulator caps at defined
                    entry = StoreEntry(Status.DEFINED, None)
                else:
                    entry = StoreEntry(post.resulting, None)
                shadow[post.param] = entry
            deltas = [
                (name, shadow[name])
                for name in shadow
                if shadow[name] != before.get(name)
            ]
            record.effects.append(EffectLog(eff.id, statements, deltas))
        return shadow

    def _bind(self, fn, bindings: Binding) -> Store:
        explicit = {
            p.element_ref: p
            for p in fn.params
            if not p.implicit and p.direction in (Direction.IN, Direction.INOUT)
        }
        missing = [name for name in explicit if name not in bindings]
        if missing:
            raise _Reject("R105", f"missing binding for '{missing[0]}'")
        for name in bindings:
            if name not in explicit:
                raise _Reject("R106", f"'{name}' is not a bindable in-parameter of {fn.id}")
        shadow = dict(self.store)
        for name, value in bindings.items():
            if isinstance(value, DefinedMarker):
                shadow[name] = StoreEntry(Status.DEFINED, None)
                continue
            elem = self._elements[name]
            kind = self._kind_of(name)
            if isinstance(kind, RecordType):
                raise _Reject("R106", f"record element '{name}' takes no literal value")
            value = self._coerce(value, kind, name)
            if not restriction_admits(elem.restriction, value):
                raise _Reject(
                    "R103", f"value {value!r} violates the restriction on '{name}'"
                )
            for eff in fn.effects:
                for pre in eff.pre:
                    if pre.param != name or pre.value_restriction is None:
                        continue
                    if not restriction_admits(pre.value_restriction, value):
                        raise _Reject(
                            "R103",
                            f"value {value!r} violates effect {eff.id}'s "
                            f"restriction on '{name}'",
                        )
            shadow[name] = StoreEntry(Status.KNOWN, value)
        return shadow

    def _kind_of(self, name: str):
        if name == STATE_ELEMENT:
            return BaseKind.STRING
        elem = self._elements[name]
        return self._types[elem.type_ref].base

    def _coerce(self, value: Literal, kind: BaseKind, name: str) -> Literal:
        actual = (
            BaseKind.STRING if isinstance(value, str)
            else BaseKind.REAL if isinstance(value, float)
            else BaseKind.INT if isinstance(value, int) and not isinstance(value, bool)
            else None
        )
        if actual is None:
            raise _Reject("R106", f"unsupported value {value!r} for '{name}'")
        if actual == kind:
            return value
        if actual == BaseKind.INT and kind == BaseKind.REAL:
            return float(value)
        raise _Reject(
            "R106", f"'{name}' is {kind.value} but the binding is {actual.value}"
        )

    def _run_statement(self, fn, stmt, shadow: Store, record: TraceRecord) -> str:
        text = format_statement(stmt)
        if isinstance(stmt, Assign):
            operands = expr_refs(stmt.expr)
            all_known = all(shadow[name].status == Status.KNOWN for name in operands)
            if not all_known:
                shadow[stmt.target] = StoreEntry(Status.DEFINED, None)
                return text + "  (symbolic)"
            value = _eval(stmt.expr, shadow)
            if stmt.target != STATE_ELEMENT:
                kind = self._kind_of(stmt.target)
                if kind == BaseKind.REAL and isinstance(value, int):
                    value = float(value)
                elem = self._elements[stmt.target]
                if not restriction_admits(elem.restriction, value):
                    raise _Reject(
                        "R103",
                        f"computed value {value!r} violates the restriction "
                        f"on '{stmt.target}'",
                    )
            shadow[stmt.target] = StoreEntry(Status.KNOWN, value)
            return text
        # require
        operands = expr_refs(stmt.left) + expr_refs(stmt.right)
        if any(shadow[name].status != Status.KNOWN for name in operands):
            record.diagnostics.append(
                {
                    "code": "W201",
                    "entity": fn.id,
                    "message": f"guard '{text}' is unverifiable: operand value unknown",
                }
            )
            return text + "  (unverified)"
        left = _eval(stmt.left, shadow)
        right = _eval(stmt.right, shadow)
        if not _compare(stmt.op, left, right):
            raise _Reject("R108", f"guard failed: {text}")
        return text


def _eval(expr: Expr, shadow: Store) -> Literal:
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, Ref):
        return shadow[expr.name].value
    if isinstance(expr, Neg):
        return -_eval(expr.operand, shadow)
    if isinstance(expr, LenOp):
        return len(_eval(expr.arg, shadow))
    if isinstance(expr, BinOp):
        left = _eval(expr.left, shadow)
        right = _eval(expr.right, shadow)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if expr.op == "++":
            return left + right
        if expr.op == "/":
            if right == 0:
                raise _Reject("R107", "division by zero")
            if isinstance(left, int) and isinstance(right, int):
                q = left // right
                if q < 0 and q * right != left:
                    q += 1  # integer division truncates toward zero
                return q
            return left / right
    raise TypeError(f"not an expression: {expr!r}")


def _compare(op: str, left: Literal, right: Literal) -> bool:
    if op == "==":
        return left == right
    if op == "!=":
        return left != right
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    return left >= right


def new_session(spec: Specification) -> Session:
    return Session(spec)


# ---------------------------------------------------------------------------
# Scripted scenarios (.svs files)


@dataclass
class Directive:
    line: int
    text: str
    kind: str  # call | expect-error | assert | assert-status
    function: Optional[str] = None
    bindings: Optional[Binding] = None
    expected_code: Optional[str] = None
    element: Optional[str] = None
    relop: Optional[str] = None
    literal: Optional[Literal] = None
    status: Optional[Status] = None


@dataclass
class DirectiveResult:
    directive: Directive
    passed: bool
    detail: str = ""


@dataclass
class ScriptResult:
    results: list[DirectiveResult]
    trace: list[TraceRecord]

    @property
    def passed(self) -> int:
        return sum(1 for r in self.results if r.passed)

    @property
    def failed(self) -> int:
        return sum(1 for r in self.results if not r.passed)

    @property
    def ok(self) -> bool:
        return self.failed == 0


class ScriptSyntaxError(ScenarioError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(d.message for d in diagnostics))
        self.diagnostics = diagnostics


def parse_script(text: str) -> list[Directive]:
    """Parse a scenario script; raises ScriptSyntaxError (nothing executes)."""
    directives: list[Directive] = []
    problems: list[Diagnostic] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            directives.append(_parse_directive(lineno, stripped))
        except _ScriptError as err:
            problems.append(Diagnostic("E000", "-", err.message, Loc(lineno, err.col)))
    if problems:
        raise ScriptSyntaxError(problems)
    return directives


class _ScriptError(Exception):
    def __init__(self, message: str, col: int = 1):
        super().__init__(message)
        self.message = message
        self.col = col


class _LineTokens:
    def __init__(self, line: str):
        tokens, diags = tokenize(line)
        if diags:
            raise _ScriptError(diags[0].message, diags[0].loc.col)
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def word(self, what: str) -> str:
        tok = self.next()
        if tok.kind not in ("ident", "kw"):
            raise _ScriptError(f"expected {what}", tok.loc.col)
        return tok.text

    def punct(self, text: str) -> None:
        tok = self.next()
        if tok.kind != "punct" or tok.text != text:
            raise _ScriptError(f"expected {text!r}", tok.loc.col)

    def literal(self) -> Literal:
        tok = self.next()
        if tok.kind == "punct" and tok.text == "-":
            num = self.next()
            if num.kind not in ("int", "real"):
                raise _ScriptError("expected a number after '-'", num.loc.col)
            return -num.value
        if tok.kind in ("int", "real", "str"):
            return tok.value
        raise _ScriptError("expected a literal", tok.loc.col)

    def done(self) -> bool:
        return self.peek().kind == "eof"


def _parse_directive(lineno: int, line: str) -> Directive:
    toks = _LineTokens(line)
    head = toks.word("a directive")
    if head == "expect":
        toks.punct("-")
        if toks.word("'error'") != "error":
            raise _ScriptError("expected 'expect-error'")
        code = toks.word("a rejection code")
        if code not in REJECTION_CODES:
            raise _ScriptError(f"unknown rejection code {code!r}")
        if toks.word("'call'") != "call":
            raise _ScriptError("expected 'call' after the code")
        fn, bindings = _parse_call(toks)
        return Directive(lineno, line, "expect-error", function=fn,
                         bindings=bindings, expected_code=code)
    if head == "call":
        fn, bindings = _parse_call(toks)
        return Directive(lineno, line, "call", function=fn, bindings=bindings)
    if head == "assert":
        if toks.peek().kind == "punct" and toks.peek().text == "-":
            toks.punct("-")
            if toks.word("'status'") != "status":
                raise _ScriptError("expected 'assert-status'")
            elem = toks.word("an element name")
            status_word = toks.word("a status keyword")
            try:
                status = Status.from_keyword(status_word)
            except KeyError:
                raise _ScriptError(f"unknown status {status_word!r}") from None
            if not toks.done():
                raise _ScriptError("trailing tokens after directive")
            return Directive(lineno, line, "assert-status", element=elem, status=status)
        elem = toks.word("an element name")
        op = toks.next()
        if op.kind != "punct" or op.text not in ("==", "!=", "<", "<=", ">", ">="):
            raise _ScriptError("expected a relational operator", op.loc.col)
        literal = toks.literal()
        if not toks.done():
            raise _ScriptError("trailing tokens after directive")
        return Directive(lineno, line, "assert", element=elem, relop=op.text,
                         literal=literal)
    raise _ScriptError(f"unknown directive {head!r}")


def _parse_call(toks: _LineTokens) -> tuple[str, Binding]:
    fn = toks.word("a function name")
    bindings: Binding = {}
    while not toks.done():
        name = toks.word("a parameter name")
        toks.punct("=")
        tok = toks.peek()
        if tok.kind == "kw" and tok.text == "defined":
            toks.next()
            bindings[name] = DEFINED
        else:
            bindings[name] = toks.literal()
    return fn, bindings


def run_script(spec: Specification, text: str) -> ScriptResult:
    """Execute a script; failures are collected, execution always continues."""
    directives = parse_script(text)
    session = Session(spec)
    results: list[DirectiveResult] = []
    for d in directives:
        if d.kind == "call":
            rec = session.call_function(d.function, d.bindings)
            if rec.ok:
                results.append(DirectiveResult(d, True))
            else:
                results.append(
                    DirectiveResult(d, False, f"rejected {rec.code}: {rec.message}")
                )
        elif d.kind == "expect-error":
            rec = session.call_function(d.function, d.bindings)
            if not rec.ok and rec.code == d.expected_code:
                results.append(DirectiveResult(d, True))
            elif rec.ok:
                results.append(
                    DirectiveResult(d, False, f"expected {d.expected_code}, call succeeded")
                )
            else:
                results.append(
                    DirectiveResult(d, False, f"expected {d.expected_code}, got {rec.code}")
                )
        elif d.kind == "assert":
            results.append(_check_assert(session, d))
        else:
            entry = session.store.get(d.element)
            if entry is None:
                results.append(DirectiveResult(d, False, f"no element '{d.element}'"))
            elif entry.status == d.status:
                results.append(DirectiveResult(d, True))
            else:
                results.append(
                    DirectiveResult(d, False, f"status is {entry.status.keyword}")
                )
    return ScriptResult(results, session.trace)


def _check_assert(session: Session, d: Directive) -> DirectiveResult:
    entry = session.store.get(d.element)
    if entry is None:
        return DirectiveResult(d, False, f"no element '{d.element}'")
    if entry.status != Status.KNOWN:
        return DirectiveResult(d, False, f"'{d.element}' is {entry.status.keyword}, not known")
    left, right = entry.value, d.literal
    if isinstance(left, str) != isinstance(right, str):
        return DirectiveResult(d, False, "kind mismatch in assertion")
    if _compare(d.relop, left, right):
        return DirectiveResult(d, True)
    return DirectiveResult(d, False, f"'{d.element}' is {left!r}")


def trace_json(trace: list[TraceRecord]) -> str:
    return json.dumps([r.to_json() for r in trace], indent=2) + "\n"
