"""Command-line entry point.

Exit codes: 0 success, 1 a check or domain condition failed, 2 bad input.
"""

import argparse
import json
import sys
from pathlib import Path

from .construction import default_script, run_script, validate_script
from .errors import CapsInsufficient, InvalidConfig, NotKodairaDimOne, ParseError, WorkbenchError
from .solver import Caps, FibrationConfig, RuleSet, global_bound, min_m


def _cmd_verify(args):
    if args.script:
        try:
            data = json.loads(Path(args.script).read_text())
            validate_script(data)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        report = run_script(data, base_dir=Path(args.script).parent)
    else:
        report = run_script(default_script())
    print(report.dumps() if args.json else report.text())
    return 0 if report.passed else 1


def _cmd_solve(args):
    try:
        caps = Caps.parse(args.caps) if args.caps else Caps()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rules = RuleSet(iii2_exclusion=not args.no_iii2_exclusion)
    try:
        report = global_bound(args.p, rules, caps)
        code = 0
    except CapsInsufficient as exc:
        report = exc.report
        print(f"cap-limited: {exc}", file=sys.stderr)
        code = 1
    print(report.dumps() if args.json else report.table())
    return code


def _cmd_min_m(args):
    try:
        data = json.loads(Path(args.config).read_text())
        config = FibrationConfig.from_json(data)
    except (OSError, ValueError, ParseError, InvalidConfig) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        print(min_m(config))
    except NotKodairaDimOne as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="qesurf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify-construction", help="replay the construction script")
    v.add_argument("--script", help="script file (default: the bundled construction)")
    v.add_argument("--json", action="store_true", help="emit the report as JSON")
    v.set_defaults(func=_cmd_verify)

    s = sub.add_parser("solve", help="search configurations for the global bound M")
    s.add_argument("--p", type=int, choices=(2, 3), required=True)
    s.add_argument("--no-iii2-exclusion", action="store_true",
                   help="admit g=0, chi+t=2 with a single wild fiber and no tame fibers")
    s.add_argument("--caps", help="search caps, e.g. g=3,chit=5,fibers=6")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_solve)

    m = sub.add_parser("min-m", help="threshold m for one configuration")
    m.add_argument("--config", required=True, help="configuration JSON file")
    m.set_defaults(func=_cmd_min_m)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
