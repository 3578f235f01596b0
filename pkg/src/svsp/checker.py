"""Static consistency analysis over a whole Specification.

Checks run in a fixed order: uniqueness, reference existence, restriction
well-formedness and agreement, transform typing, status flow, unused-entity
warnings. Later phases skip entities flagged by earlier ones, so one root
cause produces one diagnostic instead of a cascade.

Diagnostic catalog:
  E000 syntax                     E001 duplicate identifier
  E002 unresolved reference       E003 restriction not within element's
  E004 status-flow violation      E005 type mismatch
  E006 unknown state name         E007 unsatisfiable restriction
  E008 assignment to in-parameter
  W003 cross-namespace shadowing  W101 unused data element
  W102 function with no effects
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .model import (
    Assign,
    BaseKind,
    BinOp,
    DataElement,
    Diagnostic,
    Direction,
    Effect,
    Expr,
    FunctionSpec,
    KindMismatch,
    LenOp,
    Lit,
    Neg,
    RecordType,
    Ref,
    Require,
    Severity,
    Specification,
    Status,
    STATE_ELEMENT,
    Unrestricted,
    expr_refs,
    literal_kind,
    restriction_admits,
    restriction_contains,
    restriction_is_empty,
    status_at_least,
)

ALL_CODES = (
    "E000", "E001", "E002", "E003", "E004", "E005", "E006", "E007", "E008",
    "W003", "W101", "W102",
)


@dataclass(frozen=True)
class CheckReport:
    diagnostics: tuple[Diagnostic, ...]

    @property
    def consistent(self) -> bool:
        return not any(d.severity == Severity.ERROR for d in self.diagnostics)

    @property
    def summary(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for d in self.diagnostics:
            counts[d.code] = counts.get(d.code, 0) + 1
        return counts

    @property
    def warnings(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity == Severity.WARNING)

    def to_json(self) -> dict:
        return {
            "consistent": self.consistent,
            "summary": self.summary,
            "diagnostics": [d.to_json() for d in self.diagnostics],
        }


def _sort_key(d: Diagnostic):
    line = d.loc.line if d.loc else 0
    col = d.loc.col if d.loc else 0
    return (line, col, d.code, d.entity)


def check_spec(spec: Specification) -> CheckReport:
    """Run every static check and return the ordered report."""
    a = _Analysis(spec)
    a.check_uniqueness()
    a.check_existence()
    a.diags.extend(_restriction_diagnostics(spec, a))
    for fn in spec.functions:
        if fn.id in a.dup_functions:
            continue
        a.diags.extend(_transform_type_diagnostics(fn, spec, a))
        a.diags.extend(_status_flow_diagnostics(fn, spec, a))
    a.check_unused()
    return CheckReport(tuple(sorted(a.diags, key=_sort_key)))


def check_restriction_agreement(spec: Specification) -> list[Diagnostic]:
    """Element and effect-level restriction checks only (refs assumed resolved)."""
    a = _Analysis(spec)
    a.check_uniqueness()
    a.check_existence()
    a.diags = []
    return sorted(_restriction_diagnostics(spec, a), key=_sort_key)


def check_transform_types(fn: FunctionSpec, spec: Specification) -> list[Diagnostic]:
    a = _Analysis(spec)
    a.check_uniqueness()
    a.check_existence()
    a.diags = []
    return sorted(_transform_type_diagnostics(fn, spec, a), key=_sort_key)


def check_status_flow(
    fn: FunctionSpec,
    spec: Specification,
    entry_statuses: Optional[dict[str, Status]] = None,
) -> list[Diagnostic]:
    """Status simulation through one function's effects.

    With `entry_statuses` the caller supplies concrete statuses at entry and
    every effect pre is checked against them; otherwise the first pre that
    mentions a parameter is taken as the caller's obligation.
    """
    a = _Analysis(spec)
    a.check_uniqueness()
    a.check_existence()
    a.diags = []
    return sorted(
        _status_flow_diagnostics(fn, spec, a, entry_statuses=entry_statuses),
        key=_sort_key,
    )


class _Analysis:
    """Shared resolution state: first-wins symbol tables plus poison sets."""

    def __init__(self, spec: Specification):
        self.spec = spec
        self.diags: list[Diagnostic] = []
        self.types: dict[str, object] = {}
        self.elements: dict[str, DataElement] = {}
        self.functions: dict[str, FunctionSpec] = {}
        self.states: set[str] = set(spec.state_decl.states) if spec.state_decl else set()
        self.dup_functions: set[str] = set()
        self.dup_elements: list[DataElement] = []
        self.bad_elements: set[str] = set()  # unresolved type or broken restriction
        self.fn_bad_params: dict[str, set[str]] = {}

    # -- phase 1: uniqueness ------------------------------------------------

    def check_uniqueness(self) -> None:
        spec = self.spec
        for ty in spec.types:
            if ty.id in self.types:
                self.diags.append(
                    Diagnostic("E001", ty.id, "duplicate type identifier", ty.loc)
                )
            else:
                self.types[ty.id] = ty
                if isinstance(ty.base, RecordType):
                    seen = set()
                    for f in ty.base.fields:
                        if f.name in seen:
                            self.diags.append(
                                Diagnostic("E001", f"{ty.id}.{f.name}",
                                           "duplicate record field", ty.loc)
                            )
                        seen.add(f.name)
        if spec.state_decl is not None:
            seen = set()
            for name in spec.state_decl.states:
                if name in seen:
                    self.diags.append(
                        Diagnostic("E001", name, "duplicate state name", spec.state_decl.loc)
                    )
                seen.add(name)
        for elem in spec.elements:
            if elem.id in self.elements:
                self.diags.append(
                    Diagnostic("E001", elem.id, "duplicate element identifier", elem.loc)
                )
                self.dup_elements.append(elem)
            else:
                self.elements[elem.id] = elem
        effect_ids: dict[str, str] = {}
        for fn in spec.functions:
            if fn.id in self.functions:
                self.diags.append(
                    Diagnostic("E001", fn.id, "duplicate function identifier", fn.loc)
                )
                self.dup_functions.add(fn.id)
                continue
            self.functions[fn.id] = fn
            seen_params: set[str] = set()
            for p in fn.params:
                if p.element_ref in seen_params:
                    self.diags.append(
                        Diagnostic("E001", f"{fn.id}.{p.element_ref}",
                                   "element listed twice in parameter list", p.loc)
                    )
                seen_params.add(p.element_ref)
            for eff in fn.effects:
                if eff.id in effect_ids:
                    self.diags.append(
                        Diagnostic("E001", f"{fn.id}.{eff.id}",
                                   "duplicate effect identifier", eff.loc)
                    )
                else:
                    effect_ids[eff.id] = fn.id
                for entries, label in ((eff.pre, "pre"), (eff.post, "post")):
                    seen = set()
                    for entry in entries:
                        if entry.param in seen:
                            self.diags.append(
                                Diagnostic("E001", f"{fn.id}.{eff.id}.{entry.param}",
                                           f"duplicate {label} entry for parameter",
                                           entry.loc)
                            )
                        seen.add(entry.param)
        self._check_shadowing()

    def _check_shadowing(self) -> None:
        spec = self.spec
        occupied: dict[str, list[tuple[str, object]]] = {}
        for ty in spec.types:
            occupied.setdefault(ty.id, []).append(("type", ty.loc))
        for elem in spec.elements:
            occupied.setdefault(elem.id, []).append(("element", elem.loc))
        for fn in spec.functions:
            occupied.setdefault(fn.id, []).append(("function", fn.loc))
        if spec.state_decl is not None:
            for name in spec.state_decl.states:
                occupied.setdefault(name, []).append(("state", spec.state_decl.loc))
        for name, uses in occupied.items():
            namespaces = {ns for ns, _ in uses}
            if len(namespaces) < 2:
                continue
            first_ns = uses[0][0]
            for ns, loc in uses[1:]:
                if ns != first_ns:
                    self.diags.append(
                        Diagnostic("W003", name,
                                   f"name also declared as a {first_ns}", loc)
                    )

    # -- phase 2: existence ---------------------------------------------------

    def check_existence(self) -> None:
        spec = self.spec
        for elem in spec.elements:
            if elem in self.dup_elements:
                continue
            if elem.type_ref not in self.types:
                self.diags.append(
                    Diagnostic("E002", elem.id, f"unknown type '{elem.type_ref}'", elem.loc)
                )
                self.bad_elements.add(elem.id)
        for fn in spec.functions:
            if fn.id in self.dup_functions:
                continue
            bad = self.fn_bad_params.setdefault(fn.id, set())
            param_names = {p.element_ref for p in fn.params}
            for p in fn.params:
                if not self._element_exists(p.element_ref):
                    self.diags.append(
                        Diagnostic("E002", f"{fn.id}.{p.element_ref}",
                                   f"unknown element '{p.element_ref}'", p.loc)
                    )
                    bad.add(p.element_ref)
            for state in fn.classification.states:
                if state not in self.states:
                    self.diags.append(
                        Diagnostic("E006", fn.id, f"unknown state name '{state}'", fn.loc)
                    )
            if self.spec.state_decl is not None and not fn.classification.states:
                self.diags.append(
                    Diagnostic("E006", fn.id,
                               "empty allowed-state set makes the function uncallable",
                               fn.loc)
                )
            for eff in fn.effects:
                for entry in list(eff.pre) + list(eff.post):
                    if entry.param not in param_names:
                        self.diags.append(
                            Diagnostic("E002", f"{fn.id}.{eff.id}",
                                       f"'{entry.param}' is not a parameter of {fn.id}",
                                       entry.loc)
                        )
                        bad.add(entry.param)
                for stmt in eff.body or ():
                    names = ((stmt.target,) if isinstance(stmt, Assign) else ()) + (
                        expr_refs(stmt.expr)
                        if isinstance(stmt, Assign)
                        else expr_refs(stmt.left) + expr_refs(stmt.right)
                    )
                    for ident in names:
                        if ident not in param_names and ident not in bad:
                            self.diags.append(
                                Diagnostic("E002", f"{fn.id}.{eff.id}",
                                           f"'{ident}' is not a parameter of {fn.id}",
                                           stmt.loc)
                            )
                            bad.add(ident)

    def _element_exists(self, name: str) -> bool:
        if name == STATE_ELEMENT:
            return self.spec.state_decl is not None
        return name in self.elements

    # -- resolution helpers ---------------------------------------------------

    def elem_kind(self, name: str) -> Optional[Union[BaseKind, RecordType]]:
        """Resolved base kind; None when unresolvable or poisoned."""
        if name == STATE_ELEMENT:
            return BaseKind.STRING if self.spec.state_decl is not None else None
        elem = self.elements.get(name)
        if elem is None or elem.id in self.bad_elements:
            return None
        ty = self.types.get(elem.type_ref)
        return ty.base if ty is not None else None

    def element(self, name: str) -> Optional[DataElement]:
        if name == STATE_ELEMENT:
            return self.spec.state_element()
        return self.elements.get(name)

    def usable_param(self, fn: FunctionSpec, name: str) -> bool:
        if name in self.fn_bad_params.get(fn.id, set()):
            return False
        return fn.param_for(name) is not None

    # -- phase 6: unused-entity warnings ---------------------------------------

    def check_unused(self) -> None:
        referenced: set[str] = set()
        for fn in self.spec.functions:
            for p in fn.params:
                referenced.add(p.element_ref)
        for elem in self.spec.elements:
            if elem in self.dup_elements:
                continue
            if elem.id not in referenced:
                self.diags.append(
                    Diagnostic("W101", elem.id, "element referenced by no function", elem.loc)
                )
        for fn in self.spec.functions:
            if fn.id in self.dup_functions:
                continue
            if not fn.effects:
                self.diags.append(
                    Diagnostic("W102", fn.id, "function declares no effects", fn.loc)
                )


# ---------------------------------------------------------------------------
# Phase 3: restriction well-formedness and agreement


def _restriction_diagnostics(spec: Specification, a: _Analysis) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    empty_elements: set[str] = set()
    for elem in spec.elements:
        if elem in a.dup_elements or elem.id in a.bad_elements:
            continue
        kind = a.elem_kind(elem.id)
        if kind is None:
            continue
        if isinstance(kind, RecordType):
            if not isinstance(elem.restriction, Unrestricted):
                out.append(
                    Diagnostic("E005", elem.id,
                               "record elements cannot carry value restrictions", elem.loc)
                )
                a.bad_elements.add(elem.id)
            if elem.init_status == Status.KNOWN:
                out.append(
                    Diagnostic("E005", elem.id,
                               "record elements cannot have a known initial value",
                               elem.loc)
                )
            continue
        if not _variant_fits(elem.restriction, kind):
            out.append(
                Diagnostic("E005", elem.id,
                           f"restriction does not fit a {kind.value} element", elem.loc)
            )
            a.bad_elements.add(elem.id)
            continue
        if restriction_is_empty(elem.restriction, kind):
            out.append(
                Diagnostic("E007", elem.id, "restriction admits no value", elem.loc)
            )
            empty_elements.add(elem.id)
            continue
        if elem.init_status == Status.KNOWN:
            vkind = literal_kind(elem.init_value)
            if not _literal_fits(vkind, kind):
                out.append(
                    Diagnostic("E005", elem.id,
                               f"initial value is {vkind.value}, element is {kind.value}",
                               elem.loc)
                )
            elif not restriction_admits(elem.restriction, elem.init_value):
                out.append(
                    Diagnostic("E003", elem.id,
                               "initial value violates the element's restriction",
                               elem.loc)
                )
    for fn in spec.functions:
        if fn.id in a.dup_functions:
            continue
        for eff in fn.effects:
            for pre in eff.pre:
                if pre.value_restriction is None:
                    continue
                if not a.usable_param(fn, pre.param):
                    continue
                entity = f"{fn.id}.{eff.id}.{pre.param}"
                kind = a.elem_kind(pre.param)
                if kind is None:
                    continue
                if isinstance(kind, RecordType):
                    out.append(
                        Diagnostic("E005", entity,
                                   "record elements cannot carry value restrictions",
                                   pre.loc)
                    )
                    continue
                if not _variant_fits(pre.value_restriction, kind):
                    out.append(
                        Diagnostic("E005", entity,
                                   f"restriction does not fit a {kind.value} element",
                                   pre.loc)
                    )
                    continue
                if restriction_is_empty(pre.value_restriction, kind):
                    out.append(
                        Diagnostic("E007", entity, "restriction admits no value", pre.loc)
                    )
                    continue
                elem = a.element(pre.param)
                if elem.id in empty_elements:
                    continue
                if not restriction_contains(elem.restriction, pre.value_restriction, kind):
                    out.append(
                        Diagnostic("E003", entity,
                                   "effect restriction is not a subset of the element's",
                                   pre.loc)
                    )
    return out


def _variant_fits(restriction, kind: BaseKind) -> bool:
    if isinstance(restriction, Unrestricted):
        return True
    try:
        restriction_is_empty(restriction, kind)
        return True
    except KindMismatch:
        return False


def _literal_fits(value_kind: BaseKind, elem_kind: BaseKind) -> bool:
    if value_kind == elem_kind:
        return True
    return value_kind == BaseKind.INT and elem_kind == BaseKind.REAL  # promotion


# ---------------------------------------------------------------------------
# Phase 4: transform typing


def _transform_type_diagnostics(
    fn: FunctionSpec, spec: Specification, a: _Analysis
) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for eff in fn.effects:
        for stmt in eff.body or ():
            entity = f"{fn.id}.{eff.id}"
            if isinstance(stmt, Assign):
                _check_assign(fn, eff, stmt, a, out)
            else:
                lk = _expr_kind(stmt.left, fn, a, out, f"{fn.id}.{eff.id}")
                rk = _expr_kind(stmt.right, fn, a, out, entity)
                if lk is not None and rk is not None and not _relop_compatible(lk, rk):
                    out.append(
                        Diagnostic("E005", entity,
                                   f"cannot compare {lk.value} with {rk.value}", stmt.loc)
                    )
    return out


def _check_assign(fn: FunctionSpec, eff: Effect, stmt: Assign, a: _Analysis, out) -> None:
    entity = f"{fn.id}.{eff.id}"
    expr_kind = _expr_kind(stmt.expr, fn, a, out, entity)
    if not a.usable_param(fn, stmt.target):
        return
    param = fn.param_for(stmt.target)
    if param.direction == Direction.IN:
        out.append(
            Diagnostic("E008", entity,
                       f"assignment to in-parameter '{stmt.target}'", stmt.loc)
        )
        return
    if stmt.target == STATE_ELEMENT:
        if not (isinstance(stmt.expr, Lit) and stmt.expr.value in a.states):
            out.append(
                Diagnostic("E006", entity,
                           "'$state' must be assigned a declared state literal", stmt.loc)
            )
        return
    target_kind = a.elem_kind(stmt.target)
    if target_kind is None:
        return
    if isinstance(target_kind, RecordType):
        out.append(
            Diagnostic("E005", entity,
                       f"record element '{stmt.target}' cannot be assigned", stmt.loc)
        )
        return
    if expr_kind is None:
        return
    if target_kind == expr_kind:
        return
    if target_kind == BaseKind.REAL and expr_kind == BaseKind.INT:
        return  # promotion
    out.append(
        Diagnostic("E005", entity,
                   f"cannot assign {expr_kind.value} to {target_kind.value} "
                   f"element '{stmt.target}'", stmt.loc)
    )


def _relop_compatible(left: BaseKind, right: BaseKind) -> bool:
    if left == right:
        return True
    return BaseKind.STRING not in (left, right)  # Int and Real inter-compare


def _expr_kind(
    expr: Expr, fn: FunctionSpec, a: _Analysis, out: list, entity: str
) -> Optional[BaseKind]:
    """Expression kind, emitting E005 for operator misuse; None poisons upward."""
    if isinstance(expr, Lit):
        return literal_kind(expr.value)
    if isinstance(expr, Ref):
        if not a.usable_param(fn, expr.name):
            return None
        kind = a.elem_kind(expr.name)
        if isinstance(kind, RecordType):
            out.append(
                Diagnostic("E005", entity,
                           f"record element '{expr.name}' used in an expression",
                           expr.loc)
            )
            return None
        return kind
    if isinstance(expr, Neg):
        kind = _expr_kind(expr.operand, fn, a, out, entity)
        if kind == BaseKind.STRING:
            out.append(Diagnostic("E005", entity, "cannot negate a string", expr.loc))
            return None
        return kind
    if isinstance(expr, LenOp):
        kind = _expr_kind(expr.arg, fn, a, out, entity)
        if kind is not None and kind != BaseKind.STRING:
            out.append(
                Diagnostic("E005", entity, "len() requires a string operand", expr.loc)
            )
            return None
        return BaseKind.INT if kind is not None else None
    if isinstance(expr, BinOp):
        left = _expr_kind(expr.left, fn, a, out, entity)
        right = _expr_kind(expr.right, fn, a, out, entity)
        if left is None or right is None:
            return None
        if expr.op == "++":
            if left == BaseKind.STRING and right == BaseKind.STRING:
                return BaseKind.STRING
            out.append(
                Diagnostic("E005", entity, "'++' requires string operands", expr.loc)
            )
            return None
        if BaseKind.STRING in (left, right):
            out.append(
                Diagnostic("E005", entity,
                           f"'{expr.op}' requires numeric operands", expr.loc)
            )
            return None
        if left == BaseKind.INT and right == BaseKind.INT:
            return BaseKind.INT
        return BaseKind.REAL
    raise TypeError(f"not an expression: {expr!r}")


# ---------------------------------------------------------------------------
# Phase 5: status flow


def first_mention_pre(fn: FunctionSpec, param: str):
    """The pre entry of the first effect mentioning `param`, if any."""
    for eff in fn.effects:
        for pre in eff.pre:
            if pre.param == param:
                return pre
    return None


def _status_flow_diagnostics(
    fn: FunctionSpec,
    spec: Specification,
    a: _Analysis,
    entry_statuses: Optional[dict[str, Status]] = None,
) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    guaranteed: dict[str, Status] = {}
    for p in fn.params:
        if not a.usable_param(fn, p.element_ref):
            continue
        if entry_statuses is not None:
            guaranteed[p.element_ref] = entry_statuses.get(
                p.element_ref, Status.UNALLOCATED
            )
            continue
        pre = first_mention_pre(fn, p.element_ref)
        if pre is not None:
            guaranteed[p.element_ref] = pre.required
        else:
            elem = a.element(p.element_ref)
            guaranteed[p.element_ref] = elem.init_status if elem else Status.UNALLOCATED

    def read(name: str, loc, entity: str) -> Status:
        status = guaranteed.get(name)
        if status is None:
            return Status.DEFINED  # poisoned ref, already reported
        if not status_at_least(status, Status.DEFINED):
            out.append(
                Diagnostic("E004", entity,
                           f"'{name}' is read while only {status.keyword}", loc)
            )
            return Status.DEFINED  # assume repaired to avoid cascades
        return status

    for eff in fn.effects:
        entity = f"{fn.id}.{eff.id}"
        for pre in eff.pre:
            status = guaranteed.get(pre.param)
            if status is None:
                continue
            if not status_at_least(status, pre.required):
                out.append(
                    Diagnostic("E004", f"{entity}.{pre.param}",
                               f"requires {pre.required.keyword} but only "
                               f"{status.keyword} is guaranteed", pre.loc)
                )
                guaranteed[pre.param] = pre.required  # assume met, continue
        for stmt in eff.body or ():
            if isinstance(stmt, Assign):
                statuses = [read(name, stmt.loc, entity) for name in expr_refs(stmt.expr)]
                if stmt.target in guaranteed:
                    all_known = all(s == Status.KNOWN for s in statuses)
                    guaranteed[stmt.target] = Status.KNOWN if all_known else Status.DEFINED
            else:
                for name in expr_refs(stmt.left) + expr_refs(stmt.right):
                    read(name, stmt.loc, entity)
        for post in eff.post:
            if post.param in guaranteed:
                guaranteed[post.param] = post.resulting
    return out
