"""Selective retrieval over functions, elements and types, with cross-references.

Queries are conjunctions of filters over one entity kind, evaluated by linear
scan in declaration order. The textual form (`kind=function & class.states~GKOP
& name=SET_*`) is shared by the CLI and the HTTP API.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .model import (
    Assign,
    DataElement,
    DataType,
    FunctionSpec,
    RecordType,
    Specification,
    STATE_ELEMENT,
    expr_refs,
    restriction_text,
)


class InvalidQuery(ValueError):
    pass


class UnknownElement(KeyError):
    pass


class EntityKind(Enum):
    FUNCTION = "function"
    ELEMENT = "element"
    TYPE = "type"


@dataclass(frozen=True)
class NameGlob:
    pattern: str


@dataclass(frozen=True)
class ClassEquals:
    descriptor: str  # category | group | level
    value: str


@dataclass(frozen=True)
class StateContains:
    state: str


@dataclass(frozen=True)
class References:
    element: str


@dataclass(frozen=True)
class UsesType:
    type_id: str


@dataclass(frozen=True)
class Unused:
    pass


Filter = Union[NameGlob, ClassEquals, StateContains, References, UsesType, Unused]

_FILTER_KINDS = {
    NameGlob: {EntityKind.FUNCTION, EntityKind.ELEMENT, EntityKind.TYPE},
    ClassEquals: {EntityKind.FUNCTION},
    StateContains: {EntityKind.FUNCTION},
    References: {EntityKind.FUNCTION},
    UsesType: {EntityKind.FUNCTION, EntityKind.ELEMENT},
    Unused: {EntityKind.ELEMENT},
}

_PROJECTIONS = {
    EntityKind.FUNCTION: (
        "id", "class.category", "class.group", "class.level", "class.states",
        "param-count", "effect-count",
    ),
    EntityKind.ELEMENT: ("id", "type", "restriction"),
    EntityKind.TYPE: ("id", "type"),
}


@dataclass(frozen=True)
class Query:
    kind: EntityKind
    filters: tuple[Filter, ...] = ()
    select: tuple[str, ...] = ()

    def validated(self) -> "Query":
        for f in self.filters:
            if self.kind not in _FILTER_KINDS[type(f)]:
                raise InvalidQuery(
                    f"filter {type(f).__name__} does not apply to {self.kind.value} queries"
                )
        for name in self.select:
            if name not in _PROJECTIONS[self.kind]:
                raise InvalidQuery(
                    f"unknown projection field '{name}' for {self.kind.value} queries"
                )
        return self


@dataclass
class Table:
    fields: tuple[str, ...]
    rows: list[dict]


def glob_match(pattern: str, text: str) -> bool:
    """Glob with `*` and `?` only; everything else is literal."""
    parts = []
    for ch in pattern:
        if ch == "*":
            parts.append(".*")
        elif ch == "?":
            parts.append(".")
        else:
            parts.append(re.escape(ch))
    return re.fullmatch("".join(parts), text) is not None


def _referenced_elements(spec: Specification) -> set[str]:
    return {p.element_ref for fn in spec.functions for p in fn.params}


def _function_matches(fn: FunctionSpec, f: Filter, spec: Specification) -> bool:
    if isinstance(f, NameGlob):
        return glob_match(f.pattern, fn.id)
    if isinstance(f, ClassEquals):
        return getattr(fn.classification, f.descriptor) == f.value
    if isinstance(f, StateContains):
        return f.state in fn.classification.states
    if isinstance(f, References):
        return fn.param_for(f.element) is not None
    if isinstance(f, UsesType):
        elems = spec.elements_by_id()
        for p in fn.params:
            elem = elems.get(p.element_ref)
            if elem is not None and elem.type_ref == f.type_id:
                return True
        return False
    raise InvalidQuery(f"filter {type(f).__name__} does not apply to functions")


def _element_matches(elem: DataElement, f: Filter, referenced: set[str]) -> bool:
    if isinstance(f, NameGlob):
        return glob_match(f.pattern, elem.id)
    if isinstance(f, UsesType):
        return elem.type_ref == f.type_id
    if isinstance(f, Unused):
        return elem.id not in referenced
    raise InvalidQuery(f"filter {type(f).__name__} does not apply to elements")


def _project_function(fn: FunctionSpec, fields: tuple[str, ...]) -> dict:
    row = {}
    for name in fields:
        if name == "id":
            row[name] = fn.id
        elif name == "class.category":
            row[name] = fn.classification.category
        elif name == "class.group":
            row[name] = fn.classification.group
        elif name == "class.level":
            row[name] = fn.classification.level
        elif name == "class.states":
            row[name] = list(fn.classification.states)
        elif name == "param-count":
            row[name] = len(fn.params)
        elif name == "effect-count":
            row[name] = len(fn.effects)
    return row


def _project_element(elem: DataElement, fields: tuple[str, ...]) -> dict:
    row = {}
    for name in fields:
        if name == "id":
            row[name] = elem.id
        elif name == "type":
            row[name] = elem.type_ref
        elif name == "restriction":
            row[name] = restriction_text(elem.restriction)
    return row


def evaluate(spec: Specification, q: Query) -> Table:
    """Entities of q.kind matching every filter, in declaration order."""
    q = q.validated()
    fields = q.select or ("id",)
    rows: list[dict] = []
    if q.kind == EntityKind.FUNCTION:
        for fn in spec.functions:
            if all(_function_matches(fn, f, spec) for f in q.filters):
                rows.append(_project_function(fn, fields))
    elif q.kind == EntityKind.ELEMENT:
        referenced = _referenced_elements(spec)
        for elem in spec.elements:
            if all(_element_matches(elem, f, referenced) for f in q.filters):
                rows.append(_project_element(elem, fields))
    else:
        for ty in spec.types:
            if all(_type_matches(ty, f) for f in q.filters):
                rows.append(_project_type(ty, fields))
    return Table(fields, rows)


def _type_matches(ty: DataType, f: Filter) -> bool:
    if isinstance(f, NameGlob):
        return glob_match(f.pattern, ty.id)
    raise InvalidQuery(f"filter {type(f).__name__} does not apply to types")


def _project_type(ty: DataType, fields: tuple[str, ...]) -> dict:
    row = {}
    for name in fields:
        if name == "id":
            row[name] = ty.id
        elif name == "type":
            if isinstance(ty.base, RecordType):
                row[name] = "record"
            else:
                row[name] = ty.base.value
    return row


# ---------------------------------------------------------------------------
# Query-string parsing:  kind=function & class.states~GKOP & name=SET_*


_DESCRIPTORS = ("category", "group", "level")


def parse_query(text: str, default_kind: Optional[EntityKind] = None) -> Query:
    kind = default_kind
    filters: list[Filter] = []
    select: tuple[str, ...] = ()
    for raw in text.split("&"):
        term = raw.strip()
        if not term:
            continue
        if term == "unused":
            filters.append(Unused())
            continue
        m = re.fullmatch(r"([A-Za-z_.$][A-Za-z0-9_.\-]*)\s*(=|~)\s*(.*)", term)
        if m is None:
            raise InvalidQuery(f"cannot parse query term {term!r}")
        key, op, value = m.group(1), m.group(2), m.group(3).strip()
        if not value:
            raise InvalidQuery(f"empty value in query term {term!r}")
        if key == "kind":
            try:
                kind = EntityKind(value)
            except ValueError:
                raise InvalidQuery(f"unknown kind {value!r}") from None
        elif key == "name":
            filters.append(NameGlob(value))
        elif key == "class.states":
            if op != "~":
                raise InvalidQuery("class.states filters with '~' (set contains)")
            filters.append(StateContains(value))
        elif key.startswith("class."):
            descriptor = key[len("class."):]
            if descriptor not in _DESCRIPTORS:
                raise InvalidQuery(f"unknown classification descriptor {descriptor!r}")
            filters.append(ClassEquals(descriptor, value))
        elif key == "refs":
            filters.append(References(value))
        elif key == "type":
            filters.append(UsesType(value))
        elif key == "select":
            select = tuple(s.strip() for s in value.split(",") if s.strip())
        else:
            raise InvalidQuery(f"unknown query key {key!r}")
    if kind is None:
        raise InvalidQuery("query must state a kind (kind=function|element|type)")
    return Query(kind, tuple(filters), select).validated()


# ---------------------------------------------------------------------------
# Cross-reference reports


@dataclass(frozen=True)
class FunctionUse:
    function: str
    direction: str
    implicit: bool


@dataclass(frozen=True)
class EffectUse:
    function: str
    effect: str
    reads: bool
    assigns: bool


@dataclass
class XrefReport:
    element: str
    type_ref: str
    restriction: str
    functions: list[FunctionUse] = field(default_factory=list)
    effects: list[EffectUse] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "element": self.element,
            "type": self.type_ref,
            "restriction": self.restriction,
            "functions": [
                {"function": u.function, "direction": u.direction, "implicit": u.implicit}
                for u in self.functions
            ],
            "effects": [
                {"function": u.function, "effect": u.effect,
                 "reads": u.reads, "assigns": u.assigns}
                for u in self.effects
            ],
        }


def xref(spec: Specification, element_id: str) -> XrefReport:
    """Where an element is declared, referenced, read and assigned."""
    elem = spec.elements_by_id().get(element_id)
    if elem is None:
        raise UnknownElement(element_id)
    report = XrefReport(
        element=element_id,
        type_ref="string" if element_id == STATE_ELEMENT else elem.type_ref,
        restriction=restriction_text(elem.restriction),
    )
    for fn in spec.functions:
        param = fn.param_for(element_id)
        if param is None:
            continue
        report.functions.append(
            FunctionUse(fn.id, param.direction.value, param.implicit)
        )
        for eff in fn.effects:
            reads = assigns = False
            for stmt in eff.body or ():
                if isinstance(stmt, Assign):
                    assigns = assigns or stmt.target == element_id
                    reads = reads or element_id in expr_refs(stmt.expr)
                else:
                    reads = reads or element_id in (
                        expr_refs(stmt.left) + expr_refs(stmt.right)
                    )
            if reads or assigns:
                report.effects.append(EffectUse(fn.id, eff.id, reads, assigns))
    return report
