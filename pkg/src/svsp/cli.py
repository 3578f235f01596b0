"""Command-line entry point: check, fmt, query, run, edit, serve.

Exit codes are the machine contract: 0 success/consistent, 1 findings
(check errors, failed script directives), 2 usage or syntax error,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .checker import check_spec
from .dsl import format_spec, parse_spec
from .editor import EditSession, InconsistentBase, NotConsistent, change_from_json
from .query import InvalidQuery, parse_query, evaluate
from .scenario import (
    InconsistentSpec,
    ScriptSyntaxError,
    run_script,
    trace_json,
)

OK, FINDINGS, USAGE, IO_ERROR = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svsp",
        description="Validate, query, edit and simulate software-package specifications.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the consistency checker")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--strict", action="store_true", help="warnings also fail")

    p = sub.add_parser("fmt", help="print or rewrite canonical form")
    p.add_argument("file")
    p.add_argument("--write", action="store_true", help="rewrite the file in place")

    p = sub.add_parser("query", help="evaluate a query string")
    p.add_argument("file")
    p.add_argument("query")
    p.add_argument("--select", help="comma-separated projection fields")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("run", help="execute a scenario script")
    p.add_argument("file")
    p.add_argument("script")
    p.add_argument("--trace", help="write the call trace as JSON")

    p = sub.add_parser("edit", help="apply a JSON change list through the editor gate")
    p.add_argument("file")
    p.add_argument("--apply", required=True, metavar="CHANGES.json")
    p.add_argument("--out", help="write the resulting spec here (default: stdout)")

    p = sub.add_parser("serve", help="serve the HTTP API and workbench")
    p.add_argument("file")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--no-ui", action="store_true", help="do not serve workbench assets")
    return parser


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8", errors="replace") as handle:
        return handle.read()


def _load_spec(path: str, fmt: str = "text"):
    """Returns (spec, exit_code); on failure prints diagnostics and spec is None."""
    try:
        text = _read(path)
    except OSError as err:
        print(f"svsp: {err}", file=sys.stderr)
        return None, IO_ERROR
    outcome = parse_spec(text)
    if not outcome.ok:
        if fmt == "json":
            print(json.dumps([d.to_json() for d in outcome.diagnostics], indent=2))
        else:
            for d in outcome.diagnostics:
                print(d.render())
        return None, USAGE
    return outcome.spec, OK


def cmd_check(args) -> int:
    spec, code = _load_spec(args.file, args.format)
    if spec is None:
        return code
    report = check_spec(spec)
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        for d in report.diagnostics:
            print(d.render())
    if not report.consistent:
        return FINDINGS
    if args.strict and report.warnings:
        return FINDINGS
    return OK


def cmd_fmt(args) -> int:
    spec, code = _load_spec(args.file)
    if spec is None:
        return code
    text = format_spec(spec)
    if args.write:
        try:
            with open(args.file, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as err:
            print(f"svsp: {err}", file=sys.stderr)
            return IO_ERROR
    else:
        sys.stdout.write(text)
    return OK


def _render_table(table) -> str:
    def cell(value) -> str:
        if isinstance(value, list):
            return ",".join(str(v) for v in value)
        return str(value)

    rows = [[cell(row.get(f, "")) for f in table.fields] for row in table.rows]
    if not rows:
        return ""
    widths = [max(len(r[i]) for r in rows) for i in range(len(table.fields))]
    lines = ["  ".join(r[i].ljust(widths[i]) for i in range(len(r))).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def cmd_query(args) -> int:
    spec, code = _load_spec(args.file)
    if spec is None:
        return code
    try:
        q = parse_query(args.query)
        if args.select:
            import dataclasses

            fields = tuple(s.strip() for s in args.select.split(",") if s.strip())
            q = dataclasses.replace(q, select=fields).validated()
    except InvalidQuery as err:
        print(f"svsp: invalid query: {err}", file=sys.stderr)
        return USAGE
    table = evaluate(spec, q)
    if args.format == "json":
        print(json.dumps(table.rows, indent=2))
    else:
        sys.stdout.write(_render_table(table))
    return OK


def cmd_run(args) -> int:
    spec, code = _load_spec(args.file)
    if spec is None:
        return code
    try:
        script_text = _read(args.script)
    except OSError as err:
        print(f"svsp: {err}", file=sys.stderr)
        return IO_ERROR
    try:
        result = run_script(spec, script_text)
    except ScriptSyntaxError as err:
        for d in err.diagnostics:
            print(d.render())
        return USAGE
    except InconsistentSpec as err:
        print(f"svsp: {err}", file=sys.stderr)
        return FINDINGS
    for r in result.results:
        mark = "PASS" if r.passed else "FAIL"
        detail = f"  ({r.detail})" if r.detail else ""
        print(f"{mark} {r.directive.text}{detail}")
    print(f"{result.passed} passed, {result.failed} failed")
    if args.trace:
        try:
            with open(args.trace, "w", encoding="utf-8") as handle:
                handle.write(trace_json(result.trace))
        except OSError as err:
            print(f"svsp: {err}", file=sys.stderr)
            return IO_ERROR
    return OK if result.ok else FINDINGS


def cmd_edit(args) -> int:
    spec, code = _load_spec(args.file)
    if spec is None:
        return code
    try:
        raw = _read(args.apply)
    except OSError as err:
        print(f"svsp: {err}", file=sys.stderr)
        return IO_ERROR
    try:
        changes = json.loads(raw)
    except ValueError as err:
        print(f"svsp: {args.apply}: not valid JSON: {err}", file=sys.stderr)
        return USAGE
    if not isinstance(changes, list):
        print(f"svsp: {args.apply}: expected a JSON array of changes", file=sys.stderr)
        return USAGE
    try:
        session = EditSession(spec)
    except InconsistentBase as err:
        print(f"svsp: {err}", file=sys.stderr)
        return FINDINGS
    for i, obj in enumerate(changes):
        change, diags = change_from_json(obj if isinstance(obj, dict) else {})
        if change is None:
            for d in diags:
                print(d.render())
            return USAGE
        proposal = session.propose(change)
        try:
            session.commit(proposal.id)
        except NotConsistent:
            print(f"change {i + 1} ({change.describe()}) rejected:")
            for d in proposal.report.diagnostics:
                print(d.render())
            return FINDINGS
    text = format_spec(session.spec)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as err:
            print(f"svsp: {err}", file=sys.stderr)
            return IO_ERROR
    else:
        sys.stdout.write(text)
    return OK


def cmd_serve(args) -> int:
    spec, code = _load_spec(args.file)
    if spec is None:
        return code
    port = args.port
    if port is None:
        port = int(os.environ.get("SVSP_PORT", "8472"))
    from .api import serve

    serve(spec, port=port, ui=not args.no_ui)
    return OK


COMMANDS = {
    "check": cmd_check,
    "fmt": cmd_fmt,
    "query": cmd_query,
    "run": cmd_run,
    "edit": cmd_edit,
    "serve": cmd_serve,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return USAGE if exit_.code not in (0, None) else OK
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
