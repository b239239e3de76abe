"""``opp`` command line.

Exit codes: 0 success, 1 findings present under ``--strict``, 2 input or
schema errors, 3 usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from opp import formats
from opp.adequacy import Mode, assess_adequacy, rank_methods
from opp.formats import BUILTIN_METHODS, FormatError
from opp.indicators import AssessmentMode, Policy, apply_comparisons, assess, build_hierarchy
from opp.model import (
    FrameworkModel,
    MethodDefinition,
    OPPError,
    check_consistency,
    explain_objective,
    validate_framework,
    validate_method,
)

EXIT_OK, EXIT_FINDINGS, EXIT_INPUT, EXIT_USAGE = 0, 1, 2, 3

log = logging.getLogger("opp")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--framework", type=Path, help="framework.json (default: embedded reference framework)")
    p.add_argument("--format", choices=formats.FORMATS, default="table", help="output format (default: table)")
    p.add_argument("--output", type=Path, help="write the report here instead of stdout")
    p.add_argument("--strict", action="store_true", help="exit 1 when findings are present")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opp", description="Adequacy, capability and effectiveness assessment of agile methods.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="validate a framework and, optionally, method files")
    _common(p)
    p.add_argument("--method", action="append", default=[], help="built-in name or method.json")

    p = sub.add_parser("adequacy", help="top-down adequacy report for one method")
    _common(p)
    p.add_argument("--method", action="append", default=[], required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode])

    for name in ("capability", "effectiveness"):
        p = sub.add_parser(name, help=f"bottom-up {name} scores from measurements")
        _common(p)
        p.add_argument("--method", action="append", default=[], required=True)
        p.add_argument("--measurements", type=Path, required=True)
        p.add_argument("--policy", choices=[x.value for x in Policy], default=Policy.RENORMALIZE.value)

    p = sub.add_parser("rank", help="rank two or more methods by adequacy")
    _common(p)
    p.add_argument("methods", nargs="*", help="built-in names or method.json paths")
    p.add_argument("--method", action="append", default=[])
    p.add_argument("--mode", choices=[m.value for m in Mode])

    p = sub.add_parser("consistency", help="compare asserted override numerators with derived ones")
    _common(p)
    p.add_argument("--method", action="append", default=[], required=True)

    p = sub.add_parser("explain", help="show the linkage trace below one objective")
    _common(p)
    p.add_argument("objective")
    p.add_argument("--method", action="append", default=[])
    return parser


def _framework(args: argparse.Namespace, check: bool = True) -> FrameworkModel:
    if args.framework is None:
        return formats.embedded_framework()
    return formats.load_framework(args.framework.read_bytes(), check=check)


def _method(ref: str, framework: FrameworkModel) -> tuple[MethodDefinition, bool]:
    """Resolve a method reference; the flag tells whether it is a built-in."""
    if ref in BUILTIN_METHODS:
        method = formats.builtin_method(ref)
        if framework is not formats.embedded_framework():
            report = validate_method(framework, method)
            if not report.accepted:
                raise formats.ModelValidationError(report)
        return method, True
    path = Path(ref)
    if not path.is_file():
        raise FormatError(f"{ref!r} is neither a built-in method ({', '.join(BUILTIN_METHODS)}) nor a file")
    return formats.load_method(path.read_bytes(), framework), False


def _one_method(args: argparse.Namespace) -> str:
    if len(args.method) != 1:
        raise UsageError(f"{args.command} takes exactly one --method")
    return args.method[0]


def _mode(args: argparse.Namespace, builtin: bool) -> Mode:
    if args.mode:
        return Mode(args.mode)
    return Mode.OVERRIDE if builtin else Mode.DERIVED


def _run(args: argparse.Namespace) -> tuple[object, bool, FrameworkModel]:
    """Execute the command; returns (report, findings_present, framework)."""
    if args.command == "validate":
        framework = _framework(args, check=False)
        report = validate_framework(framework)
        if report.accepted:
            errors, warnings = list(report.errors), list(report.warnings)
            for ref in args.method:
                method, _ = _method_unchecked(ref, framework)
                sub = validate_method(framework, method)
                errors += sub.errors
                warnings += sub.warnings
            report = type(report)(tuple(errors), tuple(warnings))
        return report, bool(report.errors or report.warnings), framework

    framework = _framework(args)
    if args.command == "adequacy":
        method, builtin = _method(_one_method(args), framework)
        report = assess_adequacy(framework, method, _mode(args, builtin))
        return report, bool(report.discrepancies), framework

    if args.command in ("capability", "effectiveness"):
        method, _ = _method(_one_method(args), framework)
        measurements = formats.load_measurements(args.measurements.read_bytes())
        hierarchy = build_hierarchy(framework, method, AssessmentMode(args.command))
        hierarchy, checks = apply_comparisons(hierarchy, measurements.comparisons)
        report = assess(hierarchy, measurements, Policy(args.policy))
        inconsistent = [c for c in checks if not c.acceptable]
        for c in inconsistent:
            print(f"warning: pairwise matrix consistency ratio {float(c.ratio):.3f} exceeds 0.1", file=sys.stderr)
        return report, bool(report.warnings or report.missing or inconsistent), framework

    if args.command == "rank":
        refs = list(args.methods) + list(args.method)
        if len(refs) < 2:
            raise UsageError("rank needs at least two methods")
        methods, modes = [], {}
        for ref in refs:
            method, builtin = _method(ref, framework)
            if method.id in modes:
                raise UsageError(f"method {method.id!r} given twice")
            methods.append(method)
            modes[method.id] = _mode(args, builtin)
        return rank_methods(framework, methods, modes), False, framework

    if args.command == "consistency":
        method, _ = _method(_one_method(args), framework)
        found = check_consistency(framework, method)
        return found, bool(found), framework

    if args.command == "explain":
        if len(args.method) > 1:
            raise UsageError("explain takes at most one --method")
        method = _method(args.method[0], framework)[0] if args.method else None
        return explain_objective(framework, args.objective, method), False, framework
    raise UsageError(f"unknown command {args.command!r}")


def _method_unchecked(ref: str, framework: FrameworkModel) -> tuple[MethodDefinition, bool]:
    if ref in BUILTIN_METHODS:
        return formats.builtin_method(ref), True
    path = Path(ref)
    if not path.is_file():
        raise FormatError(f"{ref!r} is neither a built-in method nor a file")
    return formats.load_method(path.read_bytes()), False


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, findings, framework = _run(args)
        rendered = formats.serialize(report, args.format, framework)
    except UsageError as exc:
        print(f"opp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OPPError, OSError, ValueError) as exc:
        print(f"opp: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output is not None:
        args.output.write_bytes(rendered)
    else:
        sys.stdout.buffer.write(rendered)
        sys.stdout.flush()
    if args.command == "validate" and not report.accepted:
        return EXIT_INPUT
    return EXIT_FINDINGS if findings and args.strict else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
