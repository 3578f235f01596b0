"""Check-gated piecewise editing: every change is validated before commit.

A session holds a consistent base Specification. Proposals carry the full
check report of the hypothetical post-change spec; only consistent proposals
can commit, and a commit invalidates every other pending proposal.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .checker import CheckReport, check_spec
from .dsl import parse_declaration
from .model import (
    DataElement,
    DataType,
    Diagnostic,
    FunctionSpec,
    Specification,
)

Entity = Union[DataType, DataElement, FunctionSpec]

_KIND_FIELD = {"type": "types", "element": "elements", "function": "functions"}
_ENTITY_KIND = {DataType: "type", DataElement: "element", FunctionSpec: "function"}


class EditorError(Exception):
    pass


class InconsistentBase(EditorError):
    """Edit sessions require a consistent starting specification."""


class NotConsistent(EditorError):
    pass


class StaleProposal(EditorError):
    pass


class UnknownProposal(EditorError):
    pass


class ProposalStatus(Enum):
    PENDING = "pending"
    COMMITTED = "committed"
    ABANDONED = "abandoned"


@dataclass(frozen=True)
class Change:
    op: str  # add | replace | delete
    kind: str  # type | element | function
    target: Optional[str] = None  # replace/delete id
    entity: Optional[Entity] = None  # add/replace payload

    def describe(self) -> str:
        name = self.target or (self.entity.id if self.entity else "?")
        return f"{self.op} {self.kind} {name}"


@dataclass
class Proposal:
    id: str
    change: Change
    report: CheckReport
    status: ProposalStatus
    base_version: int
    new_spec: Specification


def change_from_json(obj: dict) -> tuple[Optional[Change], list[Diagnostic]]:
    """Decode the wire form {"op","kind","id","decl"}; decl reuses the DSL."""
    op = obj.get("op")
    kind = obj.get("kind")
    if op not in ("add", "replace", "delete"):
        return None, [Diagnostic("E000", "-", f"unknown op {op!r}")]
    if kind not in _KIND_FIELD:
        return None, [Diagnostic("E000", "-", f"unknown kind {kind!r}")]
    if op == "delete":
        target = obj.get("id")
        if not isinstance(target, str) or not target:
            return None, [Diagnostic("E000", "-", "delete requires an id")]
        return Change("delete", kind, target=target), []
    decl = obj.get("decl")
    if not isinstance(decl, str):
        return None, [Diagnostic("E000", "-", f"{op} requires a decl string")]
    entity, diags = parse_declaration(decl)
    if entity is None:
        return None, diags
    actual = _ENTITY_KIND[type(entity)]
    if actual != kind:
        return None, [
            Diagnostic("E000", "-", f"decl declares a {actual}, change says {kind}")
        ]
    target = obj.get("id") if op == "replace" else None
    if op == "replace" and not isinstance(target, str):
        return None, [Diagnostic("E000", "-", "replace requires an id")]
    return Change(op, kind, target=target, entity=entity), []


def apply_change(spec: Specification, change: Change) -> tuple[Specification, Optional[Diagnostic]]:
    """The hypothetical spec after `change`; unknown targets yield an E002."""
    attr = _KIND_FIELD[change.kind]
    entities = list(getattr(spec, attr))
    if change.op == "add":
        entities.append(change.entity)
        return dataclasses.replace(spec, **{attr: tuple(entities)}), None
    target = change.target
    if all(e.id != target for e in entities):
        return spec, Diagnostic(
            "E002", target or "-", f"no {change.kind} named '{target}' to {change.op}"
        )
    if change.op == "replace":
        entities = [change.entity if e.id == target else e for e in entities]
    else:
        entities = [e for e in entities if e.id != target]
    return dataclasses.replace(spec, **{attr: tuple(entities)}), None


class EditSession:
    """Single-writer editing workspace over one specification."""

    def __init__(self, spec: Specification):
        report = check_spec(spec)
        if not report.consistent:
            raise InconsistentBase("base specification has check errors")
        self._spec = spec
        self._version = 0
        self._counter = 0
        self._proposals: dict[str, Proposal] = {}

    @property
    def spec(self) -> Specification:
        return self._spec

    @property
    def version(self) -> int:
        return self._version

    def proposal(self, proposal_id: str) -> Optional[Proposal]:
        return self._proposals.get(proposal_id)

    def propose(self, change: Change) -> Proposal:
        """Check the hypothetical spec; the base is never touched here."""
        hypothetical, problem = apply_change(self._spec, change)
        if problem is not None:
            report = CheckReport((problem,))
        else:
            report = check_spec(hypothetical)
        self._counter += 1
        proposal = Proposal(
            id=f"p{self._counter}",
            change=change,
            report=report,
            status=ProposalStatus.PENDING,
            base_version=self._version,
            new_spec=hypothetical,
        )
        self._proposals[proposal.id] = proposal
        return proposal

    def commit(self, proposal_id: str) -> Specification:
        proposal = self._proposals.get(proposal_id)
        if proposal is None or proposal.status != ProposalStatus.PENDING:
            raise UnknownProposal(proposal_id)
        if proposal.base_version != self._version:
            raise StaleProposal(
                f"{proposal_id} was checked against version {proposal.base_version}, "
                f"base is now {self._version}; re-propose"
            )
        if not proposal.report.consistent:
            raise NotConsistent(
                f"{proposal_id} has {len(proposal.report.diagnostics)} findings "
                "including errors"
            )
        self._spec = proposal.new_spec
        self._version += 1
        proposal.status = ProposalStatus.COMMITTED
        return self._spec

    def abandon(self, proposal_id: str) -> None:
        proposal = self._proposals.get(proposal_id)
        if proposal is None or proposal.status != ProposalStatus.PENDING:
            raise UnknownProposal(proposal_id)
        proposal.status = ProposalStatus.ABANDONED
