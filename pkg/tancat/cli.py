"""
Command-line front end: read a script, run its command, print the report.

    tancat SCRIPT [--format text|json] [--no-timing]

SCRIPT is a file path or '-' for stdin. Exit codes: 0 ok, 1 axiom failure,
2 input error, 3 Groebner budget exceeded.
"""

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from tancat.config import DEFAULT_FORMAT, DEFAULT_SIDE, LOG_FORMAT, LOG_LEVEL
from tancat.engine.bundles import Side
from tancat.engine.errors import ScriptError, TancatError
from tancat.engine.modules import FPModule
from tancat.engine.rings import FPRing, Point
from tancat.script import MorphismDecl, Script, parse
from tancat.tools import (
    axioms_tool,
    bundle_check_tool,
    bundle_derive_sum_tool,
    bundle_from_module_tool,
    bundle_to_module_tool,
    tangent_space_tool,
    tangent_tool,
    transpose_flat_tool,
    transpose_sharp_tool,
    vf_bracket_tool,
    vf_from_derivation_tool,
    vf_to_derivation_tool,
)
from tancat.tools.payloads import failure

logger = logging.getLogger(__name__)

FORMATS = ("text", "json")
EXIT_CODES = {"ok": 0, "axiom-failure": 1}


@dataclass
class Report:
    status: str
    result: Dict[str, Any] = field(default_factory=dict)
    ms: int = 0
    message: str = ""
    error_kind: Optional[str] = None

    @classmethod
    def from_status(cls, payload: Dict[str, Any], ms: int = 0) -> "Report":
        return cls(
            status=payload["status"],
            result=payload.get("result", {}),
            ms=ms,
            message=payload.get("message", ""),
            error_kind=payload.get("error_kind"),
        )

    @property
    def exit_code(self) -> int:
        if self.status in EXIT_CODES:
            return EXIT_CODES[self.status]
        return 3 if self.error_kind == "budget" else 2


# Run line


class _RunParser(argparse.ArgumentParser):
    """argparse for the run line; errors become script errors instead of exits."""

    def error(self, message: str):
        raise ScriptError(f"run line: {message}")


def _leaf(group, name: str, *positionals: str, side: bool = True, **options) -> argparse.ArgumentParser:
    """A run-line command taking the given names; --format may also follow the command."""
    sub = group.add_parser(name, add_help=False)
    for positional in positionals:
        sub.add_argument(positional, **options)
    if side:
        sub.add_argument("--side", choices=[s.value for s in Side], default=DEFAULT_SIDE)
    sub.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS)
    return sub


def build_run_parser() -> argparse.ArgumentParser:
    parser = _RunParser(prog="run", add_help=False)
    parser.add_argument("--format", choices=FORMATS, default=None)
    commands = parser.add_subparsers(dest="command", required=True)

    _leaf(commands, "tangent", "ring")
    _leaf(commands, "tangent-space", "names", side=False, nargs="+")
    _leaf(commands, "axioms", "ring")

    actions = commands.add_parser("bundle", add_help=False).add_subparsers(dest="action", required=True)
    for action in ("from-module", "check", "to-module", "derive-sum"):
        _leaf(actions, action, "name")

    actions = commands.add_parser("vf", add_help=False).add_subparsers(dest="action", required=True)
    _leaf(actions, "to-derivation", "name")
    _leaf(actions, "from-derivation", "name")
    _leaf(actions, "bracket", "first", "second", side=False)

    actions = commands.add_parser("transpose", add_help=False).add_subparsers(dest="action", required=True)
    _leaf(actions, "sharp", "name", side=False)
    _leaf(actions, "flat", "name", side=False)
    return parser


# Dispatch


def _bundle_source(script: Script, name: str):
    kind = script.kind_of(name)
    if kind not in ("ring", "module"):
        raise ScriptError(f"{name!r} is a {kind}; bundles are named by a module or a ring")
    return script.declarations[name]


def _tangent_space(script: Script, names: Sequence[str]) -> Dict[str, Any]:
    if len(names) > 2:
        raise ScriptError("tangent-space takes a point, optionally preceded by its ring")
    point = script.lookup(names[-1], Point)
    ring = script.lookup(names[0], FPRing) if len(names) == 2 else point.ring
    return tangent_space_tool(ring, point)


def _dispatch(script: Script, args: argparse.Namespace) -> Dict[str, Any]:
    command = args.command
    if command == "tangent":
        return tangent_tool(script.lookup(args.ring, FPRing), Side(args.side))
    if command == "tangent-space":
        return _tangent_space(script, args.names)
    if command == "axioms":
        return axioms_tool(script.lookup(args.ring, FPRing), Side(args.side))

    if command == "bundle":
        side = Side(args.side)
        if args.action == "from-module":
            return bundle_from_module_tool(script.lookup(args.name, FPModule), side)
        tools: Dict[str, Callable[..., Dict[str, Any]]] = {
            "check": bundle_check_tool,
            "to-module": bundle_to_module_tool,
            "derive-sum": bundle_derive_sum_tool,
        }
        return tools[args.action](_bundle_source(script, args.name), side)

    if command == "vf":
        if args.action == "bracket":
            return vf_bracket_tool(script.lookup(args.first, MorphismDecl), script.lookup(args.second, MorphismDecl))
        decl = script.lookup(args.name, MorphismDecl)
        if args.action == "to-derivation":
            return vf_to_derivation_tool(decl, Side(args.side))
        return vf_from_derivation_tool(decl, Side(args.side))

    decl = script.lookup(args.name, MorphismDecl)
    if args.action == "sharp":
        return transpose_sharp_tool(decl)
    return transpose_flat_tool(decl)


def _parse_run(script: Script) -> argparse.Namespace:
    return build_run_parser().parse_args([script.command.name, *script.command.args])


def execute(script: Script, timing: bool = True) -> Report:
    """Runs the script's command; input problems come back as an error report."""
    start = time.perf_counter()
    try:
        if script.command is None:
            raise ScriptError("the script has no run line")
        args = _parse_run(script)
        payload = _dispatch(script, args)
    except TancatError as e:
        payload = failure(e, "Invalid command")
    ms = int(round((time.perf_counter() - start) * 1000)) if timing else 0
    logger.debug("%s finished with %s in %d ms", script.command and script.command.name, payload["status"], ms)
    return Report.from_status(payload, ms)


def requested_format(script: Script) -> Optional[str]:
    """The --format given on the run line, if any."""
    if script.command is None:
        return None
    try:
        return getattr(_parse_run(script), "format", None)
    except ScriptError:
        return None


# Rendering


def render(report: Report, fmt: str = DEFAULT_FORMAT) -> str:
    if fmt == "json":
        return json.dumps({"status": report.status, "result": report.result, "ms": report.ms}, indent=2, sort_keys=True)
    lines = [f"status: {report.status}"]
    if report.message:
        lines.append(f"message: {report.message}")
    lines.extend(_text_lines(report.result, ""))
    lines.append(f"time: {report.ms} ms")
    return "\n".join(lines)


def _text_lines(result: Dict[str, Any], indent: str) -> List[str]:
    lines = []
    for key, value in result.items():
        if key == "axioms":
            failed = [e for e in value if not e["pass"]]
            lines.append(f"{indent}axioms: {len(value) - len(failed)} passed, {len(failed)} failed")
            for entry in value:
                mark = "PASS" if entry["pass"] else "FAIL"
                witness = f"  {entry['witness']}" if "witness" in entry else ""
                lines.append(f"{indent}  {mark} {entry['id']}{witness}")
        elif key == "images":
            lines.append(f"{indent}images:")
            lines.extend(f"{indent}  {v} |-> {p}" for v, p in value.items())
        elif key == "relations" and not value:
            lines.append(f"{indent}relations: (none)")
        elif key == "relations":
            lines.append(f"{indent}relations:")
            for row in value:
                lines.append(f"{indent}  {'[' + ', '.join(row) + ']' if isinstance(row, list) else row}")
        elif isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_text_lines(value, indent + "  "))
        elif isinstance(value, list):
            lines.append(f"{indent}{key}: {', '.join(str(v) for v in value)}")
        else:
            lines.append(f"{indent}{key}: {str(value).lower() if isinstance(value, bool) else value}")
    return lines


# Entry point


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="tancat", description="Exact computations in tangent categories of rings.")
    parser.add_argument("script", help="Script file, or '-' to read standard input.")
    parser.add_argument("--format", choices=FORMATS, default=None, help=f"Report format (default: {DEFAULT_FORMAT}).")
    parser.add_argument("--no-timing", action="store_true", help="Report 0 ms so output is byte-stable.")
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=getattr(logging, LOG_LEVEL.upper(), logging.WARNING), format=LOG_FORMAT)

    try:
        text = sys.stdin.read() if args.script == "-" else Path(args.script).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        print(f"tancat: cannot read {args.script}: {e}", file=sys.stderr)
        return 2

    fmt = args.format
    try:
        script = parse(text)
    except TancatError as e:
        report = Report.from_status(failure(e, "Invalid script"))
    else:
        fmt = fmt or requested_format(script)
        report = execute(script, timing=not args.no_timing)

    print(render(report, fmt or DEFAULT_FORMAT))
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
