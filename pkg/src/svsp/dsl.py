"""Textual specification language: tokenizer, parser, and canonical formatter.

The language is line-oriented and keyword-driven; `#` comments run to end of
line. Parsing is purely syntactic: dangling references, subset violations and
the like are left to the checker. Parse errors are reported as E000
diagnostics with recovery at the next top-level keyword, so one pass reports
every syntax problem it can.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .model import (
    Assign,
    BaseKind,
    BinOp,
    Bound,
    Classification,
    DataElement,
    DataType,
    Diagnostic,
    Direction,
    Effect,
    EffectPost,
    EffectPre,
    Expr,
    FunctionSpec,
    LenOp,
    Lit,
    Literal,
    Loc,
    Neg,
    NumericRange,
    ParamRef,
    RecordField,
    RecordType,
    Ref,
    Require,
    Restriction,
    Specification,
    StateDecl,
    Status,
    StringLength,
    UNRESTRICTED,
    Unrestricted,
)

KEYWORDS = {
    "type", "data", "states", "func", "class", "param", "effect",
    "pre", "post", "abstract", "require", "init", "restrict",
    "value", "length", "len", "in", "out", "inout", "implicit",
    "unallocated", "allocated", "defined", "known",
    "int", "real", "string", "record",
    "category", "group", "level",
}

TOP_LEVEL = {"type", "data", "states", "func"}

STATUS_KEYWORDS = {"unallocated", "allocated", "defined", "known"}

BASE_KEYWORDS = {"int": BaseKind.INT, "real": BaseKind.REAL, "string": BaseKind.STRING}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<real>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<word>[A-Za-z_$][A-Za-z0-9_]*)
  | (?P<str>"(?:\\.|[^"\\\n])*")
  | (?P<badstr>"(?:\\.|[^"\\\n])*)
  | (?P<punct>:=|\+\+|==|!=|<=|>=|[{}()\[\],:=<>+\-*/])
    """,
    re.VERBOSE,
)

MAX_EXPR_DEPTH = 100


@dataclass(frozen=True)
class Token:
    kind: str  # ident kw int real str punct eof
    text: str
    value: object
    loc: Loc


@dataclass
class ParseOutcome:
    """A Specification on success, otherwise one E000 per syntax error."""

    spec: Optional[Specification]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.spec is not None


class _SyntaxError(Exception):
    def __init__(self, message: str, loc: Loc):
        super().__init__(message)
        self.message = message
        self.loc = loc


def _unescape(raw: str) -> str:
    out = []
    i = 1
    while i < len(raw) - 1:
        c = raw[i]
        if c == "\\" and i + 1 < len(raw) - 1:
            out.append(raw[i + 1])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, col = 1, 1
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            diags.append(
                Diagnostic("E000", "-", f"unexpected character {text[pos]!r}", Loc(line, col))
            )
            pos += 1
            col += 1
            continue
        loc = Loc(line, col)
        kind = m.lastgroup
        raw = m.group()
        pos = m.end()
        if kind == "nl":
            line += 1
            col = 1
            continue
        col += len(raw)
        if kind in ("ws", "comment"):
            continue
        if kind == "word":
            if raw in KEYWORDS:
                tokens.append(Token("kw", raw, raw, loc))
            else:
                tokens.append(Token("ident", raw, raw, loc))
        elif kind == "int":
            tokens.append(Token("int", raw, int(raw), loc))
        elif kind == "real":
            tokens.append(Token("real", raw, float(raw), loc))
        elif kind == "str":
            tokens.append(Token("str", raw, _unescape(raw), loc))
        elif kind == "badstr":
            diags.append(Diagnostic("E000", "-", "unterminated string literal", loc))
        else:
            tokens.append(Token("punct", raw, raw, loc))
    tokens.append(Token("eof", "", None, Loc(line, col)))
    return tokens, diags


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diags: list[Diagnostic] = []

    # -- token plumbing --

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_kw(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "kw" and tok.text in words

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    def expect_punct(self, text: str) -> Token:
        if self.at_punct(text):
            return self.advance()
        tok = self.peek()
        raise _SyntaxError(f"expected {text!r}, found {tok.text or 'end of file'!r}", tok.loc)

    def expect_kw(self, word: str) -> Token:
        if self.at_kw(word):
            return self.advance()
        tok = self.peek()
        raise _SyntaxError(f"expected {word!r}, found {tok.text or 'end of file'!r}", tok.loc)

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind == "ident":
            return self.advance()
        raise _SyntaxError(f"expected {what}, found {tok.text or 'end of file'!r}", tok.loc)

    def expect_declared_ident(self, what: str = "identifier") -> Token:
        tok = self.expect_ident(what)
        if tok.text == "$state":
            raise _SyntaxError("'$state' is reserved and cannot be declared", tok.loc)
        return tok

    def error(self, message: str, loc: Optional[Loc] = None) -> None:
        self.diags.append(Diagnostic("E000", "-", message, loc or self.peek().loc))

    def recover(self) -> None:
        """Skip to the next top-level keyword so later declarations still parse."""
        if self.peek().kind != "eof":
            self.advance()
        while self.peek().kind != "eof":
            if self.peek().kind == "kw" and self.peek().text in TOP_LEVEL:
                return
            self.advance()

    # -- grammar --

    def parse_spec(self) -> ParseOutcome:
        types: list[DataType] = []
        elements: list[DataElement] = []
        functions: list[FunctionSpec] = []
        state_decl: Optional[StateDecl] = None
        while self.peek().kind != "eof":
            tok = self.peek()
            try:
                if self.at_kw("type"):
                    types.append(self.parse_type())
                elif self.at_kw("states"):
                    decl = self.parse_states()
                    if state_decl is not None:
                        raise _SyntaxError("at most one states declaration per file", tok.loc)
                    state_decl = decl
                elif self.at_kw("data"):
                    elements.append(self.parse_data())
                elif self.at_kw("func"):
                    functions.append(self.parse_func())
                else:
                    raise _SyntaxError(
                        f"expected declaration, found {tok.text or 'end of file'!r}", tok.loc
                    )
            except _SyntaxError as err:
                self.error(err.message, err.loc)
                self.recover()
        if self.diags:
            return ParseOutcome(None, self.diags)
        spec = Specification(
            types=tuple(types),
            state_decl=state_decl,
            elements=tuple(elements),
            functions=tuple(functions),
        )
        return ParseOutcome(spec, [])

    def parse_type(self) -> DataType:
        loc = self.expect_kw("type").loc
        name = self.expect_declared_ident("type name")
        tok = self.peek()
        if tok.kind == "kw" and tok.text in BASE_KEYWORDS:
            self.advance()
            return DataType(name.text, BASE_KEYWORDS[tok.text], loc=loc)
        if self.at_kw("record"):
            self.advance()
            self.expect_punct("{")
            fields = [self.parse_field()]
            while self.at_punct(","):
                self.advance()
                fields.append(self.parse_field())
            self.expect_punct("}")
            return DataType(name.text, RecordType(tuple(fields)), loc=loc)
        raise _SyntaxError(
            f"expected 'int', 'real', 'string' or 'record', found {tok.text!r}", tok.loc
        )

    def parse_field(self) -> RecordField:
        name = self.expect_ident("field name")
        self.expect_punct(":")
        tok = self.peek()
        if tok.kind == "kw" and tok.text in BASE_KEYWORDS:
            self.advance()
            return RecordField(name.text, BASE_KEYWORDS[tok.text])
        raise _SyntaxError(f"expected field kind, found {tok.text!r}", tok.loc)

    def parse_states(self) -> StateDecl:
        loc = self.expect_kw("states").loc
        self.expect_punct("{")
        names = [self.expect_declared_ident("state name").text]
        while self.at_punct(","):
            self.advance()
            names.append(self.expect_declared_ident("state name").text)
        self.expect_punct("}")
        return StateDecl(tuple(names), loc=loc)

    def parse_data(self) -> DataElement:
        loc = self.expect_kw("data").loc
        name = self.expect_declared_ident("element name")
        self.expect_punct(":")
        type_ref = self.expect_ident("type name")
        restriction: Restriction = UNRESTRICTED
        while self.at_kw("restrict"):
            clause = self.parse_restriction()
            restriction = self.merge_restrictions(restriction, clause)
        init_status, init_value = Status.UNALLOCATED, None
        if self.at_kw("init"):
            self.advance()
            init_status, init_value = self.parse_init()
        return DataElement(
            id=name.text,
            type_ref=type_ref.text,
            restriction=restriction,
            init_status=init_status,
            init_value=init_value,
            loc=loc,
        )

    def parse_init(self) -> tuple[Status, Optional[Literal]]:
        tok = self.peek()
        if self.at_kw("allocated"):
            self.advance()
            return Status.ALLOCATED, None
        if self.at_kw("defined"):
            self.advance()
            return Status.DEFINED, None
        if tok.kind in ("int", "real", "str") or self.at_punct("-"):
            return Status.KNOWN, self.parse_signed_literal()
        raise _SyntaxError(
            f"expected 'allocated', 'defined' or a literal, found {tok.text!r}", tok.loc
        )

    def parse_signed_literal(self) -> Literal:
        if self.at_punct("-"):
            loc = self.advance().loc
            tok = self.peek()
            if tok.kind in ("int", "real"):
                self.advance()
                return -tok.value
            raise _SyntaxError("expected a numeric literal after '-'", loc)
        tok = self.peek()
        if tok.kind in ("int", "real", "str"):
            self.advance()
            return tok.value
        raise _SyntaxError(f"expected a literal, found {tok.text or 'end of file'!r}", tok.loc)

    def parse_cmp(self) -> str:
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ("<", "<=", ">", ">="):
            self.advance()
            return tok.text
        raise _SyntaxError(f"expected a comparison operator, found {tok.text!r}", tok.loc)

    def parse_restriction(self) -> Restriction:
        """One `restrict` clause: a value inequality (possibly chained) or a length bound."""
        loc = self.expect_kw("restrict").loc
        if self.at_kw("value"):
            self.advance()
            cmp = self.parse_cmp()
            lit = self.parse_signed_literal()
            if isinstance(lit, str):
                raise _SyntaxError("value bounds must be numeric", loc)
            return _single_bound(cmp, lit)
        if self.at_kw("length"):
            self.advance()
            cmp = self.parse_cmp()
            tok = self.peek()
            if tok.kind != "int":
                raise _SyntaxError("length bounds must be natural numbers", tok.loc)
            self.advance()
            n = tok.value
            if cmp == "<":
                return StringLength(max=n - 1)
            if cmp == "<=":
                return StringLength(max=n)
            if cmp == ">":
                return StringLength(min=n + 1)
            return StringLength(min=n)
        # literal cmp value [cmp literal]
        first = self.parse_signed_literal()
        if isinstance(first, str):
            raise _SyntaxError("value bounds must be numeric", loc)
        cmp1 = self.parse_cmp()
        self.expect_kw("value")
        lowish = cmp1 in ("<", "<=")
        if lowish:
            result = NumericRange(lower=Bound(first, cmp1 == "<="))
        else:
            result = NumericRange(upper=Bound(first, cmp1 == ">="))
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ("<", "<=", ">", ">="):
            cmp2 = self.parse_cmp()
            second = self.parse_signed_literal()
            if isinstance(second, str):
                raise _SyntaxError("value bounds must be numeric", loc)
            if lowish != (cmp2 in ("<", "<=")):
                raise _SyntaxError("inequality chain must run in one direction", tok.loc)
            if lowish:
                result = NumericRange(result.lower, Bound(second, cmp2 == "<="))
            else:
                result = NumericRange(Bound(second, cmp2 == ">="), result.upper)
        return result

    def merge_restrictions(self, acc: Restriction, clause: Restriction) -> Restriction:
        if isinstance(acc, Unrestricted):
            return clause
        if isinstance(acc, NumericRange) and isinstance(clause, NumericRange):
            return NumericRange(
                _tighter_lower(acc.lower, clause.lower),
                _tighter_upper(acc.upper, clause.upper),
            )
        if isinstance(acc, StringLength) and isinstance(clause, StringLength):
            mx = acc.max if clause.max is None else (clause.max if acc.max is None else min(acc.max, clause.max))
            return StringLength(min=max(acc.min, clause.min), max=mx)
        raise _SyntaxError("conflicting restriction kinds on one element", self.peek().loc)

    def parse_func(self) -> FunctionSpec:
        loc = self.expect_kw("func").loc
        name = self.expect_declared_ident("function name")
        self.expect_punct("{")
        classification = self.parse_class()
        params: list[ParamRef] = []
        while self.at_kw("param"):
            params.append(self.parse_param())
        effects: list[Effect] = []
        while self.at_kw("effect"):
            effects.append(self.parse_effect())
        self.expect_punct("}")
        return FunctionSpec(
            id=name.text,
            classification=classification,
            params=tuple(params),
            effects=tuple(effects),
            loc=loc,
        )

    def parse_class(self) -> Classification:
        self.expect_kw("class")
        self.expect_kw("category")
        self.expect_punct("=")
        category = self.expect_ident("category")
        self.expect_kw("group")
        self.expect_punct("=")
        group = self.expect_ident("group")
        self.expect_kw("level")
        self.expect_punct("=")
        level = self.expect_ident("level")
        self.expect_kw("states")
        self.expect_punct("=")
        self.expect_punct("[")
        names: list[str] = []
        if not self.at_punct("]"):
            names.append(self.expect_ident("state name").text)
            while self.at_punct(","):
                self.advance()
                names.append(self.expect_ident("state name").text)
        self.expect_punct("]")
        return Classification(category.text, group.text, level.text, tuple(names))

    def parse_param(self) -> ParamRef:
        loc = self.expect_kw("param").loc
        name = self.expect_ident("element name")
        tok = self.peek()
        if not (tok.kind == "kw" and tok.text in ("in", "out", "inout")):
            raise _SyntaxError(f"expected 'in', 'out' or 'inout', found {tok.text!r}", tok.loc)
        self.advance()
        direction = Direction(tok.text)
        implicit = False
        if self.at_kw("implicit"):
            self.advance()
            implicit = True
        return ParamRef(name.text, direction, implicit, loc=loc)

    def parse_effect(self) -> Effect:
        loc = self.expect_kw("effect").loc
        name = self.expect_ident("effect name")
        self.expect_punct("{")
        pres: list[EffectPre] = []
        while self.at_kw("pre"):
            ploc = self.advance().loc
            param = self.expect_ident("parameter name")
            status = self.parse_status()
            restriction = None
            if self.at_kw("restrict"):
                restriction = self.parse_restriction()
            pres.append(EffectPre(param.text, status, restriction, loc=ploc))
        posts: list[EffectPost] = []
        while self.at_kw("post"):
            ploc = self.advance().loc
            param = self.expect_ident("parameter name")
            status = self.parse_status()
            posts.append(EffectPost(param.text, status, loc=ploc))
        body: Optional[tuple] = None
        if self.at_kw("abstract"):
            self.advance()
        else:
            stmts = []
            while not self.at_punct("}"):
                stmts.append(self.parse_statement())
            body = tuple(stmts)
        self.expect_punct("}")
        return Effect(name.text, tuple(pres), tuple(posts), body, loc=loc)

    def parse_status(self) -> Status:
        tok = self.peek()
        if tok.kind == "kw" and tok.text in STATUS_KEYWORDS:
            self.advance()
            return Status.from_keyword(tok.text)
        raise _SyntaxError(f"expected a status keyword, found {tok.text!r}", tok.loc)

    def parse_statement(self):
        tok = self.peek()
        if self.at_kw("require"):
            loc = self.advance().loc
            left = self.parse_expr()
            op = self.parse_relop()
            right = self.parse_expr()
            return Require(left, op, right, loc=loc)
        if tok.kind == "ident":
            self.advance()
            self.expect_punct(":=")
            expr = self.parse_expr()
            return Assign(tok.text, expr, loc=tok.loc)
        raise _SyntaxError(
            f"expected a statement or '}}', found {tok.text or 'end of file'!r}", tok.loc
        )

    def parse_relop(self) -> str:
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ("==", "!=", "<", "<=", ">", ">="):
            self.advance()
            return tok.text
        raise _SyntaxError(f"expected a relational operator, found {tok.text!r}", tok.loc)

    def parse_expr(self, depth: int = 0) -> Expr:
        if depth > MAX_EXPR_DEPTH:
            raise _SyntaxError("expression too deeply nested", self.peek().loc)
        left = self.parse_term(depth)
        while self.peek().kind == "punct" and self.peek().text in ("+", "-", "++"):
            op = self.advance()
            right = self.parse_term(depth)
            left = BinOp(op.text, left, right, loc=op.loc)
        return left

    def parse_term(self, depth: int) -> Expr:
        left = self.parse_factor(depth)
        while self.peek().kind == "punct" and self.peek().text in ("*", "/"):
            op = self.advance()
            right = self.parse_factor(depth)
            left = BinOp(op.text, left, right, loc=op.loc)
        return left

    def parse_factor(self, depth: int) -> Expr:
        if depth > MAX_EXPR_DEPTH:
            raise _SyntaxError("expression too deeply nested", self.peek().loc)
        tok = self.peek()
        if tok.kind in ("int", "real", "str"):
            self.advance()
            return Lit(tok.value, loc=tok.loc)
        if tok.kind == "ident":
            self.advance()
            return Ref(tok.text, loc=tok.loc)
        if self.at_punct("-"):
            self.advance()
            return Neg(self.parse_factor(depth + 1), loc=tok.loc)
        if self.at_kw("len"):
            self.advance()
            self.expect_punct("(")
            arg = self.parse_expr(depth + 1)
            self.expect_punct(")")
            return LenOp(arg, loc=tok.loc)
        if self.at_punct("("):
            self.advance()
            inner = self.parse_expr(depth + 1)
            self.expect_punct(")")
            return inner
        raise _SyntaxError(
            f"expected an expression, found {tok.text or 'end of file'!r}", tok.loc
        )


def _single_bound(cmp: str, lit: Union[int, float]) -> NumericRange:
    if cmp == "<":
        return NumericRange(upper=Bound(lit, False))
    if cmp == "<=":
        return NumericRange(upper=Bound(lit, True))
    if cmp == ">":
        return NumericRange(lower=Bound(lit, False))
    return NumericRange(lower=Bound(lit, True))


def _tighter_lower(a: Optional[Bound], b: Optional[Bound]) -> Optional[Bound]:
    if a is None:
        return b
    if b is None:
        return a
    if a.value != b.value:
        return a if a.value > b.value else b
    return a if not a.inclusive else b


def _tighter_upper(a: Optional[Bound], b: Optional[Bound]) -> Optional[Bound]:
    if a is None:
        return b
    if b is None:
        return a
    if a.value != b.value:
        return a if a.value < b.value else b
    return a if not a.inclusive else b


def parse_spec(text: str) -> ParseOutcome:
    """Parse specification source into a Specification, or E000 diagnostics."""
    tokens, lex_diags = tokenize(text)
    parser = _Parser(tokens)
    parser.diags.extend(lex_diags)
    return parser.parse_spec()


def parse_declaration(text: str) -> tuple[Optional[object], list[Diagnostic]]:
    """Parse a single type/data/func declaration (used for piecewise edits)."""
    outcome = parse_spec(text)
    if not outcome.ok:
        return None, outcome.diagnostics
    spec = outcome.spec
    entities = list(spec.types) + list(spec.elements) + list(spec.functions)
    if spec.state_decl is not None:
        return None, [
            Diagnostic("E000", "-", "a states declaration cannot be edited piecewise",
                       spec.state_decl.loc)
        ]
    if len(entities) != 1:
        return None, [
            Diagnostic("E000", "-", f"expected exactly one declaration, found {len(entities)}",
                       Loc(1, 1))
        ]
    return entities[0], []


# ---------------------------------------------------------------------------
# Canonical formatting


def format_spec(spec: Specification) -> str:
    """Emit canonical text such that parsing it reproduces `spec` structurally."""
    blocks: list[str] = []
    for ty in spec.types:
        blocks.append(_format_type(ty))
    if spec.state_decl is not None:
        blocks.append("states { " + ", ".join(spec.state_decl.states) + " }")
    for elem in spec.elements:
        blocks.append(format_element(elem))
    lines = ["\n".join(blocks)] if blocks else []
    for fn in spec.functions:
        lines.append(format_function(fn))
    return "\n\n".join(lines) + "\n" if lines else ""


def _format_type(ty: DataType) -> str:
    if isinstance(ty.base, RecordType):
        fields = ", ".join(f"{f.name}: {f.kind.value}" for f in ty.base.fields)
        return f"type {ty.id} record {{ {fields} }}"
    return f"type {ty.id} {ty.base.value}"


def _restriction_clauses(r: Restriction) -> str:
    if isinstance(r, NumericRange):
        if r.lower is not None and r.upper is not None:
            lo = "<=" if r.lower.inclusive else "<"
            hi = "<=" if r.upper.inclusive else "<"
            return (
                f" restrict {_lit(r.lower.value)} {lo} value {hi} {_lit(r.upper.value)}"
            )
        if r.lower is not None:
            op = ">=" if r.lower.inclusive else ">"
            return f" restrict value {op} {_lit(r.lower.value)}"
        if r.upper is not None:
            op = "<=" if r.upper.inclusive else "<"
            return f" restrict value {op} {_lit(r.upper.value)}"
        return ""
    if isinstance(r, StringLength):
        out = ""
        if r.min > 0:
            out += f" restrict length >= {r.min}"
        if r.max is not None:
            out += f" restrict length <= {r.max}"
        return out
    return ""


def format_element(elem: DataElement) -> str:
    text = f"data {elem.id} : {elem.type_ref}" + _restriction_clauses(elem.restriction)
    if elem.init_status == Status.ALLOCATED:
        text += " init allocated"
    elif elem.init_status == Status.DEFINED:
        text += " init defined"
    elif elem.init_status == Status.KNOWN:
        text += f" init {_lit(elem.init_value)}"
    return text


def format_function(fn: FunctionSpec) -> str:
    c = fn.classification
    lines = [f"func {fn.id} {{"]
    lines.append(
        f"  class category = {c.category} group = {c.group} level = {c.level} "
        f"states = [{', '.join(c.states)}]"
    )
    for p in fn.params:
        suffix = " implicit" if p.implicit else ""
        lines.append(f"  param {p.element_ref} {p.direction.value}{suffix}")
    for eff in fn.effects:
        lines.append(f"  effect {eff.id} {{")
        for pre in eff.pre:
            extra = _restriction_clauses(pre.value_restriction) if pre.value_restriction else ""
            lines.append(f"    pre {pre.param} {pre.required.keyword}{extra}")
        for post in eff.post:
            lines.append(f"    post {post.param} {post.resulting.keyword}")
        if eff.body is None:
            lines.append("    abstract")
        else:
            for stmt in eff.body:
                lines.append(f"    {format_statement(stmt)}")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines)


def format_statement(stmt) -> str:
    if isinstance(stmt, Assign):
        return f"{stmt.target} := {format_expr(stmt.expr)}"
    return f"require {format_expr(stmt.left)} {stmt.op} {format_expr(stmt.right)}"


def format_expr(expr: Expr, parent_prec: int = 0) -> str:
    text, prec = _expr_text(expr)
    return f"({text})" if prec < parent_prec else text


def _expr_text(expr: Expr) -> tuple[str, int]:
    if isinstance(expr, Lit):
        return _lit(expr.value), 3
    if isinstance(expr, Ref):
        return expr.name, 3
    if isinstance(expr, Neg):
        return f"-{format_expr(expr.operand, 3)}", 3
    if isinstance(expr, LenOp):
        return f"len({format_expr(expr.arg)})", 3
    if isinstance(expr, BinOp):
        prec = 2 if expr.op in ("*", "/") else 1
        left = format_expr(expr.left, prec)
        right = format_expr(expr.right, prec + 1)
        return f"{left} {expr.op} {right}", prec
    raise TypeError(f"not an expression: {expr!r}")


def _lit(value: Literal) -> str:
    from .model import format_literal

    return format_literal(value)
