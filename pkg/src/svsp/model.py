"""Core domain model: statuses, data types, restrictions, functions, effects.

Everything here is immutable after construction and safe to share between
threads. Structural equality ignores source locations, so two parses of the
same text compare equal even when the text moved around.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import NamedTuple, Optional, Union

STATE_ELEMENT = "$state"

Literal = Union[int, float, str]


class Loc(NamedTuple):
    line: int
    col: int


class Status(IntEnum):
    """How much is established about a data element, as a total order."""

    UNALLOCATED = 0
    ALLOCATED = 1
    DEFINED = 2
    KNOWN = 3

    @property
    def keyword(self) -> str:
        return self.name.lower()

    @classmethod
    def from_keyword(cls, word: str) -> "Status":
        return cls[word.upper()]


def status_at_least(actual: Status, required: Status) -> bool:
    """True iff `actual` is at or above `required` in the status order."""
    return actual >= required


class BaseKind(Enum):
    INT = "int"
    REAL = "real"
    STRING = "string"


_INT = BaseKind.INT


class Direction(Enum):
    IN = "in"
    OUT = "out"
    INOUT = "inout"


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


# ---------------------------------------------------------------------------
# Restrictions


class KindMismatch(TypeError):
    """A restriction was applied to a value or peer of the wrong base kind."""


@dataclass(frozen=True, slots=True)
class Bound:
    value: Union[int, float]
    inclusive: bool = True


@dataclass(frozen=True, slots=True)
class NumericRange:
    """Inequality bounds on an Int or Real element; None means unbounded.

    The inclusive integer form of each bound is precomputed at construction
    (`int_lower`/`int_upper`, unbounded as +-inf) so Int containment checks
    stay cheap on hot paths.
    """

    lower: Optional[Bound] = None
    upper: Optional[Bound] = None
    int_lower: float = field(init=False, compare=False, repr=False, default=-math.inf)
    int_upper: float = field(init=False, compare=False, repr=False, default=math.inf)

    def __post_init__(self):
        if self.lower is not None:
            v, inc = self.lower.value, self.lower.inclusive
            object.__setattr__(self, "int_lower", math.ceil(v) if inc else math.floor(v) + 1)
        if self.upper is not None:
            v, inc = self.upper.value, self.upper.inclusive
            object.__setattr__(self, "int_upper", math.floor(v) if inc else math.ceil(v) - 1)


@dataclass(frozen=True)
class StringLength:
    min: int = 0
    max: Optional[int] = None


@dataclass(frozen=True)
class Unrestricted:
    pass


Restriction = Union[NumericRange, StringLength, Unrestricted]

UNRESTRICTED = Unrestricted()


def literal_kind(value: Literal) -> BaseKind:
    if isinstance(value, bool):  # bool is an int subclass; never a spec literal
        raise KindMismatch("boolean is not a specification literal")
    if isinstance(value, int):
        return BaseKind.INT
    if isinstance(value, float):
        return BaseKind.REAL
    if isinstance(value, str):
        return BaseKind.STRING
    raise KindMismatch(f"unsupported literal {value!r}")


def restriction_admits(r: Restriction, value: Literal) -> bool:
    """True iff `value` satisfies every bound of `r`.

    Raises KindMismatch when the value's kind does not fit the restriction's
    variant, so callers can tell a type error from a range miss.
    """
    if isinstance(r, Unrestricted):
        literal_kind(value)  # still reject non-literals
        return True
    if isinstance(r, NumericRange):
        if literal_kind(value) == BaseKind.STRING:
            raise KindMismatch("numeric restriction applied to a string value")
        if r.lower is not None:
            if value < r.lower.value or (value == r.lower.value and not r.lower.inclusive):
                return False
        if r.upper is not None:
            if value > r.upper.value or (value == r.upper.value and not r.upper.inclusive):
                return False
        return True
    if isinstance(r, StringLength):
        if literal_kind(value) != BaseKind.STRING:
            raise KindMismatch("length restriction applied to a non-string value")
        n = len(value)
        return n >= r.min and (r.max is None or n <= r.max)
    raise KindMismatch(f"unknown restriction {r!r}")


def normalize_int_range(r: NumericRange) -> NumericRange:
    """Rewrite an Int-kind range to inclusive integer bounds.

    Strict bounds move inward (value > 3 becomes value >= 4) and fractional
    bounds round inward; the admitted set of integers is unchanged.
    """
    lower = None if r.lower is None else Bound(int(r.int_lower), True)
    upper = None if r.upper is None else Bound(int(r.int_upper), True)
    return NumericRange(lower, upper)


def _real_range_is_empty(r: NumericRange) -> bool:
    if r.lower is None or r.upper is None:
        return False
    lo, hi = r.lower, r.upper
    if lo.value > hi.value:
        return True
    return lo.value == hi.value and not (lo.inclusive and hi.inclusive)


def restriction_is_empty(r: Restriction, kind: BaseKind) -> bool:
    """True iff the restriction admits no value of the given kind."""
    if isinstance(r, Unrestricted):
        return False
    if isinstance(r, NumericRange):
        if kind == BaseKind.STRING:
            raise KindMismatch("numeric restriction on a string element")
        if kind == BaseKind.INT:
            return r.int_lower > r.int_upper
        return _real_range_is_empty(r)
    if isinstance(r, StringLength):
        if kind != BaseKind.STRING:
            raise KindMismatch("length restriction on a numeric element")
        return r.max is not None and r.min > r.max
    raise KindMismatch(f"unknown restriction {r!r}")


def _numeric_contains(outer: NumericRange, inner: NumericRange, kind: BaseKind) -> bool:
    if kind == BaseKind.INT:
        if inner.int_lower > inner.int_upper:
            return True
        if outer.int_lower > outer.int_upper:
            return False
        return outer.int_lower <= inner.int_lower and inner.int_upper <= outer.int_upper
    if _real_range_is_empty(inner):
        return True
    if _real_range_is_empty(outer):
        return False
    if outer.lower is not None:
        if inner.lower is None:
            return False
        ov, iv = outer.lower, inner.lower
        if ov.value > iv.value:
            return False
        if ov.value == iv.value and not ov.inclusive and iv.inclusive:
            return False
    if outer.upper is not None:
        if inner.upper is None:
            return False
        ov, iv = outer.upper, inner.upper
        if ov.value < iv.value:
            return False
        if ov.value == iv.value and not ov.inclusive and iv.inclusive:
            return False
    return True


def restriction_contains(outer: Restriction, inner: Restriction, kind: BaseKind) -> bool:
    """True iff every value admitted by `inner` is admitted by `outer`.

    Both restrictions must apply to the same base kind; `kind` selects the
    interpretation (Int bounds normalize to inclusive integers first).
    """
    # hot path: Int interval containment is pure integer arithmetic
    if kind is _INT and type(outer) is NumericRange and type(inner) is NumericRange:
        ilo = inner.int_lower
        ihi = inner.int_upper
        if ilo > ihi:
            return True
        if outer.int_lower > outer.int_upper:
            return False
        return outer.int_lower <= ilo and ihi <= outer.int_upper
    if isinstance(outer, Unrestricted):
        _check_variant(inner, kind)
        return True
    if isinstance(inner, Unrestricted):
        _check_variant(outer, kind)
        # Only a vacuous outer admits every value of the kind.
        if isinstance(outer, NumericRange):
            return outer.lower is None and outer.upper is None
        return outer.min == 0 and outer.max is None
    if isinstance(outer, NumericRange) and isinstance(inner, NumericRange):
        if kind == BaseKind.STRING:
            raise KindMismatch("numeric restrictions on a string element")
        return _numeric_contains(outer, inner, kind)
    if isinstance(outer, StringLength) and isinstance(inner, StringLength):
        if kind != BaseKind.STRING:
            raise KindMismatch("length restrictions on a numeric element")
        if inner.max is not None and inner.min > inner.max:
            return True
        if outer.min > inner.min:
            return False
        if outer.max is None:
            return True
        return inner.max is not None and inner.max <= outer.max
    raise KindMismatch(
        f"restriction variants disagree: {type(outer).__name__} vs {type(inner).__name__}"
    )


def _check_variant(r: Restriction, kind: BaseKind) -> None:
    if isinstance(r, NumericRange) and kind == BaseKind.STRING:
        raise KindMismatch("numeric restriction on a string element")
    if isinstance(r, StringLength) and kind != BaseKind.STRING:
        raise KindMismatch("length restriction on a numeric element")


def format_literal(value: Literal) -> str:
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, float):
        text = repr(value)
        return text if "." in text or "e" in text or "inf" in text else text + ".0"
    return repr(value)


def restriction_text(r: Restriction) -> str:
    """Canonical one-line rendering, as shown in queries and the workbench."""
    if isinstance(r, Unrestricted):
        return "unrestricted"
    if isinstance(r, NumericRange):
        parts = []
        if r.lower is not None and r.upper is not None:
            lo_op = "<=" if r.lower.inclusive else "<"
            hi_op = "<=" if r.upper.inclusive else "<"
            return (
                f"{format_literal(r.lower.value)} {lo_op} value "
                f"{hi_op} {format_literal(r.upper.value)}"
            )
        if r.lower is not None:
            op = ">=" if r.lower.inclusive else ">"
            parts.append(f"value {op} {format_literal(r.lower.value)}")
        if r.upper is not None:
            op = "<=" if r.upper.inclusive else "<"
            parts.append(f"value {op} {format_literal(r.upper.value)}")
        return ", ".join(parts) if parts else "unrestricted"
    if isinstance(r, StringLength):
        parts = []
        if r.min > 0:
            parts.append(f"length >= {r.min}")
        if r.max is not None:
            parts.append(f"length <= {r.max}")
        return ", ".join(parts) if parts else "any length"
    raise KindMismatch(f"unknown restriction {r!r}")


# ---------------------------------------------------------------------------
# Data types and elements


@dataclass(frozen=True)
class RecordField:
    name: str
    kind: BaseKind


@dataclass(frozen=True)
class RecordType:
    fields: tuple[RecordField, ...]


@dataclass(frozen=True)
class DataType:
    id: str
    base: Union[BaseKind, RecordType]
    loc: Optional[Loc] = field(default=None, compare=False)

    @property
    def is_record(self) -> bool:
        return isinstance(self.base, RecordType)


@dataclass(frozen=True)
class DataElement:
    id: str
    type_ref: str
    restriction: Restriction = UNRESTRICTED
    init_status: Status = Status.UNALLOCATED
    init_value: Optional[Literal] = None  # present iff init_status is KNOWN
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class Classification:
    """The four grouping descriptors every function carries."""

    category: str
    group: str
    level: str
    states: tuple[str, ...]


@dataclass(frozen=True)
class ParamRef:
    element_ref: str
    direction: Direction
    implicit: bool = False
    loc: Optional[Loc] = field(default=None, compare=False)


# ---------------------------------------------------------------------------
# Transform expressions and statements


@dataclass(frozen=True)
class Lit:
    value: Literal
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class Ref:
    name: str
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * / ++
    left: "Expr"
    right: "Expr"
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class LenOp:
    arg: "Expr"
    loc: Optional[Loc] = field(default=None, compare=False)


Expr = Union[Lit, Ref, Neg, BinOp, LenOp]


@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class Require:
    left: Expr
    op: str  # == != < <= > >=
    right: Expr
    loc: Optional[Loc] = field(default=None, compare=False)


Statement = Union[Assign, Require]


def expr_refs(expr: Expr) -> tuple[str, ...]:
    """Element identifiers read by an expression, left to right."""
    if isinstance(expr, Lit):
        return ()
    if isinstance(expr, Ref):
        return (expr.name,)
    if isinstance(expr, Neg):
        return expr_refs(expr.operand)
    if isinstance(expr, BinOp):
        return expr_refs(expr.left) + expr_refs(expr.right)
    if isinstance(expr, LenOp):
        return expr_refs(expr.arg)
    raise TypeError(f"not an expression: {expr!r}")


# ---------------------------------------------------------------------------
# Effects and functions


@dataclass(frozen=True)
class EffectPre:
    param: str
    required: Status
    value_restriction: Optional[Restriction] = None
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class EffectPost:
    param: str
    resulting: Status
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class Effect:
    """Pre/post status contract plus either a transform body or `abstract`."""

    id: str
    pre: tuple[EffectPre, ...] = ()
    post: tuple[EffectPost, ...] = ()
    body: Optional[tuple[Statement, ...]] = None  # None means abstract
    loc: Optional[Loc] = field(default=None, compare=False)

    @property
    def is_abstract(self) -> bool:
        return self.body is None


@dataclass(frozen=True)
class FunctionSpec:
    id: str
    classification: Classification
    params: tuple[ParamRef, ...] = ()
    effects: tuple[Effect, ...] = ()
    loc: Optional[Loc] = field(default=None, compare=False)

    def param_for(self, element_id: str) -> Optional[ParamRef]:
        for p in self.params:
            if p.element_ref == element_id:
                return p
        return None


@dataclass(frozen=True)
class StateDecl:
    states: tuple[str, ...]
    loc: Optional[Loc] = field(default=None, compare=False)


@dataclass(frozen=True)
class Specification:
    types: tuple[DataType, ...] = ()
    state_decl: Optional[StateDecl] = None
    elements: tuple[DataElement, ...] = ()
    functions: tuple[FunctionSpec, ...] = ()

    def types_by_id(self) -> dict[str, DataType]:
        return {t.id: t for t in self.types}

    def elements_by_id(self) -> dict[str, DataElement]:
        out = {e.id: e for e in self.elements}
        state = self.state_element()
        if state is not None:
            out[STATE_ELEMENT] = state
        return out

    def functions_by_id(self) -> dict[str, FunctionSpec]:
        return {f.id: f for f in self.functions}

    def state_element(self) -> Optional[DataElement]:
        """The implicit `$state` element, present iff states are declared."""
        if self.state_decl is None:
            return None
        return DataElement(
            id=STATE_ELEMENT,
            type_ref=STATE_ELEMENT,
            restriction=UNRESTRICTED,
            init_status=Status.KNOWN,
            init_value=self.state_decl.states[0],
        )

    def element_kind(self, elem: DataElement) -> Optional[Union[BaseKind, RecordType]]:
        """Resolved base of an element's type; None when the type is unknown."""
        if elem.id == STATE_ELEMENT:
            return BaseKind.STRING
        ty = self.types_by_id().get(elem.type_ref)
        return ty.base if ty is not None else None


# ---------------------------------------------------------------------------
# Diagnostics


@dataclass(frozen=True)
class Diagnostic:
    """A coded checker or parser finding; severity follows from the code."""

    code: str
    entity: str
    message: str
    loc: Optional[Loc] = field(default=None, compare=False)

    @property
    def severity(self) -> Severity:
        return Severity.ERROR if self.code.startswith("E") else Severity.WARNING

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity.value,
            "entity": self.entity,
            "message": self.message,
            "line": self.loc.line if self.loc else None,
            "col": self.loc.col if self.loc else None,
        }

    def render(self) -> str:
        where = f"{self.loc.line}:{self.loc.col}" if self.loc else "-"
        return f"{self.code} {self.severity.value} {self.entity} {where} {self.message}"
