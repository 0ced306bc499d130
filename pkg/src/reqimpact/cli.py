"""Command line front end.

Subcommands cover model validation, rule inspection, scripted propagation
sessions, impact reports, architecture import and the HTTP server. There is
deliberately no interactive prompting: choices arrive as flags or scripts so
every run is reproducible. Identical inputs always produce byte-identical
output files.

Exit codes: 0 on success, 1 when validation or analysis finds errors, 2 for
usage problems and unreadable inputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Any

from . import aadl
from .changes import change_from_dict
from .impact import ImpactError, impact_report, render_report_text, session_impact
from .jsonio import canonical_dumps, read_json, write_json
from .model import (
    ERROR,
    ModelError,
    Violation,
    architecture_model_from_dict,
    architecture_model_to_dict,
    requirements_model_from_dict,
    trace_model_from_dict,
    validate_architecture_model,
    validate_requirements_model,
    validate_trace_model,
)
from .propagation import (
    SessionError,
    Session,
    choose,
    is_complete,
    pending_decisions,
    replay,
    session_from_dict,
    session_to_dict,
    start_session,
)
from .rules import RuleError, RuleSet, default_rules, load_rules, rules_to_dict, validate_rules

OK, FOUND_ERRORS, USAGE = 0, 1, 2


class InputError(Exception):
    """A file argument could not be read or parsed as JSON."""


def _read_json_arg(path: str) -> Any:
    try:
        return read_json(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from exc


def _read_text_arg(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc


def _load_rules_arg(rules_path: str | None) -> RuleSet:
    path = rules_path or os.environ.get("IMPACT_RULES")
    if not path:
        return default_rules()
    return load_rules(_read_json_arg(path))


def _print_violations(violations: list[Violation], prefix: str = "") -> None:
    for v in violations:
        print(f"{prefix}{v.severity} {v.code} at {v.location}: {v.message}")


def session_id(session: Session) -> str:
    """Short content-derived id; identical sessions share it."""
    digest = hashlib.sha256(canonical_dumps(session_to_dict(session)).encode("utf-8")).hexdigest()
    return f"ses-{digest[:12]}"


def _print_session_summary(session: Session) -> None:
    print(f"session {session_id(session)}")
    statuses = ", ".join(f"{n.requirement}={n.status.value}" for n in session.nodes.values())
    print(f"visited: {statuses}")
    if is_complete(session):
        print("complete: all decisions made")
    else:
        print(f"pending: {', '.join(d.id for d in pending_decisions(session))}")


def _load_session_file(path: str) -> Session:
    return session_from_dict(_read_json_arg(path))


# ---------------------------------------------------------------------------
# Subcommands


def cmd_validate(args: argparse.Namespace) -> int:
    reqs = arch = None
    traces: list[tuple[str, Any]] = []
    failed = False
    for path in args.models:
        data = _read_json_arg(path)
        if not isinstance(data, dict):
            print(f"{path}: not a model document", file=sys.stderr)
            failed = True
            continue
        try:
            if "requirements" in data or "relations" in data:
                model, notices = requirements_model_from_dict(data)
                found = notices + validate_requirements_model(model)
                reqs = model
            elif "elements" in data:
                arch = architecture_model_from_dict(data)
                found = validate_architecture_model(arch)
            elif "traces" in data:
                traces.append((path, data))
                continue
            else:
                print(f"{path}: unrecognized model document", file=sys.stderr)
                failed = True
                continue
        except ModelError as exc:
            print(f"{path}: error {exc}")
            failed = True
            continue
        _print_violations(found, prefix=f"{path}: ")
        failed = failed or any(v.severity == ERROR for v in found)
    for path, data in traces:
        try:
            trace_model = trace_model_from_dict(data)
        except ModelError as exc:
            print(f"{path}: error {exc}")
            failed = True
            continue
        found = validate_trace_model(trace_model, reqs, arch)
        if reqs is None or arch is None:
            print(f"{path}: note: endpoint existence not checked (model files not given)")
        _print_violations(found, prefix=f"{path}: ")
        failed = failed or any(v.severity == ERROR for v in found)
    return FOUND_ERRORS if failed else OK


def cmd_rules_show(args: argparse.Namespace) -> int:
    rules = _load_rules_arg(args.rules)
    sys.stdout.write(canonical_dumps(rules_to_dict(rules)))
    return OK


def cmd_rules_check(args: argparse.Namespace) -> int:
    rules = _load_rules_arg(args.rules)
    found = validate_rules(rules)
    _print_violations(found)
    if args.rules or os.environ.get("IMPACT_RULES"):
        extra = ", ".join(sorted(rules.user_cells)) or "none (defaults only)"
        print(f"user-defined cells: {extra}")
    return FOUND_ERRORS if any(v.severity == ERROR for v in found) else OK


def _load_models_for_session(args: argparse.Namespace):
    model, notices = requirements_model_from_dict(_read_json_arg(args.model))
    problems = notices + validate_requirements_model(model)
    _print_violations(problems, prefix=f"{args.model}: ")
    if any(v.severity == ERROR for v in problems):
        raise SessionError("requirements model has errors; fix them before starting a session")
    traces = trace_model_from_dict(_read_json_arg(args.traces))
    return model, traces


def cmd_session_start(args: argparse.Namespace) -> int:
    model, traces = _load_models_for_session(args)
    rules = _load_rules_arg(args.rules)
    change = change_from_dict(_read_json_arg(args.change))
    session = start_session(model, traces, rules, change)
    write_json(args.output, session_to_dict(session))
    _print_session_summary(session)
    print(f"wrote {args.output}")
    return OK


def cmd_session_choices(args: argparse.Namespace) -> int:
    session = _load_session_file(args.session)
    decisions = pending_decisions(session)
    if not decisions:
        print("session complete: no pending decisions")
        return OK
    for d in decisions:
        rel = d.relation
        print(f"{d.id}: {d.from_requirement} -> {d.to_requirement} ({rel.kind.value}, {d.direction.value})")
        print(f"  change at {d.from_requirement}: {d.change_type.value}")
        note = "  (no rule covers this cell; justification required)" if d.unspecified_cell else ""
        print(f"  alternatives: {', '.join(a.spec for a in d.alternatives)}{note}")
    return OK


def cmd_session_choose(args: argparse.Namespace) -> int:
    session = _load_session_file(args.session)
    choose(session, args.decision, args.pick, args.justification)
    out = args.output or args.session
    write_json(out, session_to_dict(session))
    _print_session_summary(session)
    print(f"wrote {out}")
    return OK


def cmd_session_replay(args: argparse.Namespace) -> int:
    data = _read_json_arg(args.session)
    script = _read_json_arg(args.script)
    if not isinstance(script, list):
        raise InputError(f"{args.script}: a choice script is a JSON list")
    model, _ = requirements_model_from_dict(data["model"])
    traces = trace_model_from_dict(data.get("traces", {}))
    rules = load_rules(data.get("rules", {}))
    change = change_from_dict(data["change"])
    session = replay(model, traces, rules, change, script)
    out = args.output or args.session
    write_json(out, session_to_dict(session))
    _print_session_summary(session)
    print(f"wrote {out}")
    return OK


def cmd_impact(args: argparse.Namespace) -> int:
    session = _load_session_file(args.session)
    result = session_impact(session, args.select)
    report = impact_report(result, session)
    if args.output:
        write_json(args.output, report)
        print(f"wrote {args.output}")
    if args.text:
        sys.stdout.write(render_report_text(report))
    elif not args.output:
        sys.stdout.write(canonical_dumps(report))
    return OK


def cmd_import_aadl(args: argparse.Namespace) -> int:
    text = _read_text_arg(args.source)
    model, diagnostics = aadl.import_architecture(text)
    for diag in diagnostics:
        print(f"{args.source}:{diag.line}:{diag.column}: {diag.severity}: {diag.message}")
    write_json(args.output, architecture_model_to_dict(model))
    print(f"wrote {args.output} ({len(model.elements)} elements)")
    return FOUND_ERRORS if any(d.severity == ERROR for d in diagnostics) else OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.addr.rpartition(":")
    if not host or not port.isdigit():
        raise InputError(f"--addr must look like HOST:PORT, got {args.addr!r}")
    model, traces = _load_models_for_session(args)
    architecture = architecture_model_from_dict(_read_json_arg(args.architecture))
    rules = _load_rules_arg(args.rules)
    app = create_app(
        model,
        traces,
        architecture,
        rules,
        journal_dir=args.journal,
        allow_origins=tuple(args.allow_origin or ()),
        ui_dir=args.ui,
    )
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return OK


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reqimpact",
        description="Propagate requirement changes and find candidate architectural elements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check model files for structural violations")
    p.add_argument("models", nargs="+", help="requirements/architecture/traces JSON files")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("rules", help="inspect the active rule tables")
    rules_sub = p.add_subparsers(dest="rules_command", required=True)
    q = rules_sub.add_parser("show", help="print the merged rule tables as JSON")
    q.add_argument("--rules", help="user rule file merged over the defaults")
    q.set_defaults(func=cmd_rules_show)
    q = rules_sub.add_parser("check", help="report rule coverage gaps and empty cells")
    q.add_argument("--rules", help="user rule file merged over the defaults")
    q.set_defaults(func=cmd_rules_check)

    p = sub.add_parser("session", help="run a propagation session from files")
    ses_sub = p.add_subparsers(dest="session_command", required=True)
    q = ses_sub.add_parser("start", help="open a session for a proposed change")
    q.add_argument("--model", required=True, help="requirements model JSON")
    q.add_argument("--traces", required=True, help="trace model JSON")
    q.add_argument("--change", required=True, help="proposed change JSON")
    q.add_argument("--rules", help="user rule file merged over the defaults")
    q.add_argument("-o", "--output", required=True, help="session file to write")
    q.set_defaults(func=cmd_session_start)
    q = ses_sub.add_parser("choices", help="list pending decisions of a session")
    q.add_argument("session", help="session file")
    q.set_defaults(func=cmd_session_choices)
    q = ses_sub.add_parser("choose", help="resolve one pending decision")
    q.add_argument("session", help="session file")
    q.add_argument("--decision", required=True, help="pending decision id (the relation id)")
    q.add_argument("--pick", required=True, help="alternative to apply, e.g. no-impact")
    q.add_argument("--justification", help="required when no rule covers the cell")
    q.add_argument("-o", "--output", help="write here instead of back to the session file")
    q.set_defaults(func=cmd_session_choose)
    q = ses_sub.add_parser("replay", help="rebuild a session from a choice script")
    q.add_argument("session", help="session file providing model, rules and change")
    q.add_argument("--script", required=True, help="JSON list of {decision, pick, justification?}")
    q.add_argument("-o", "--output", help="write here instead of back to the session file")
    q.set_defaults(func=cmd_session_replay)

    p = sub.add_parser("impact", help="compute candidate architectural elements")
    p.add_argument("session", help="completed session file")
    p.add_argument("--select", help="impacted requirement to traverse from")
    p.add_argument("-o", "--output", help="report JSON file")
    p.add_argument("--text", action="store_true", help="print a readable report")
    p.set_defaults(func=cmd_impact)

    p = sub.add_parser("import-aadl", help="parse architecture text into architecture JSON")
    p.add_argument("source", help=".aadl file in the documented subset")
    p.add_argument("-o", "--output", required=True, help="architecture JSON file to write")
    p.set_defaults(func=cmd_import_aadl)

    p = sub.add_parser("serve", help="serve the HTTP API (and optionally the web UI)")
    p.add_argument("--addr", required=True, help="HOST:PORT to bind")
    p.add_argument("--model", required=True, help="requirements model JSON")
    p.add_argument("--traces", required=True, help="trace model JSON")
    p.add_argument("--architecture", required=True, help="architecture model JSON")
    p.add_argument("--rules", help="user rule file merged over the defaults")
    p.add_argument("--journal", help="directory for per-session journal files")
    p.add_argument("--allow-origin", action="append", help="CORS origin to allow (repeatable)")
    p.add_argument("--ui", help="directory of built web UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (ModelError, RuleError, SessionError, ImpactError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FOUND_ERRORS


if __name__ == "__main__":
    raise SystemExit(main())
