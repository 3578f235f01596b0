"""svsp: parse, check, query, edit and simulate software-package specifications."""

from .checker import CheckReport, check_restriction_agreement, check_spec, check_status_flow, check_transform_types
from .dsl import ParseOutcome, format_spec, parse_spec
from .editor import Change, EditSession, NotConsistent, Proposal, StaleProposal, UnknownProposal
from .model import (
    Classification,
    DataElement,
    DataType,
    Diagnostic,
    Effect,
    FunctionSpec,
    NumericRange,
    Restriction,
    Severity,
    Specification,
    Status,
    StringLength,
    Unrestricted,
    restriction_admits,
    restriction_contains,
    status_at_least,
)
from .query import Query, Table, evaluate, parse_query, xref
from .scenario import DEFINED, Session, TraceRecord, new_session, run_script

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "Change",
    "Classification",
    "DataElement",
    "DataType",
    "DEFINED",
    "Diagnostic",
    "EditSession",
    "Effect",
    "FunctionSpec",
    "NotConsistent",
    "NumericRange",
    "ParseOutcome",
    "Proposal",
    "Query",
    "Restriction",
    "Session",
    "Severity",
    "Specification",
    "StaleProposal",
    "Status",
    "StringLength",
    "Table",
    "TraceRecord",
    "UnknownProposal",
    "Unrestricted",
    "check_restriction_agreement",
    "check_spec",
    "check_status_flow",
    "check_transform_types",
    "evaluate",
    "format_spec",
    "new_session",
    "parse_query",
    "parse_spec",
    "restriction_admits",
    "restriction_contains",
    "run_script",
    "status_at_least",
    "xref",
]
