"""``credal-chain`` command-line entry point.

Exit codes: 0 success, 1 reproduction mismatch, 2 parse error,
3 validation error, 4 unsupported size or model, 5 invalid arguments.
"""

from __future__ import annotations

import argparse
import math
import sys

from .commands import cmd_analyze, cmd_compare, cmd_contaminate, cmd_reproduce, reproduction_failures
from .core import CredalError, UnsupportedError
from .reports import write_outputs
from .specfile import SpecParseError, SpecValidationError

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_UNSUPPORTED = 4
EXIT_ARGS = 5


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def parse_steps(text: str) -> list:
    """Parse ``"1,2,3,inf"`` into ``[1, 2, 3, inf]``."""
    steps = []
    for part in text.split(","):
        part = part.strip().lower()
        if part in ("inf", "∞"):
            steps.append(math.inf)
            continue
        try:
            n = int(part)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid step {part!r}") from None
        if n < 0:
            raise argparse.ArgumentTypeError(f"steps must be non-negative, got {n}")
        steps.append(n)
    if not steps:
        raise argparse.ArgumentTypeError("no steps given")
    return steps


def _eps(text: str) -> float:
    try:
        eps = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid eps {text!r}") from None
    if not 0.0 < eps < 1.0:
        raise argparse.ArgumentTypeError(f"eps must lie in (0, 1), got {eps}")
    return eps


def _unit(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"value must lie in [0, 1], got {v}")
    return v


def _profile(text: str) -> str:
    if text in ("self", "perturbed"):
        return text
    try:
        parts = dict(p.split("=", 1) for p in text.split(":"))
        r, rho = int(parts["r"]), float(parts["rho"])
    except (KeyError, ValueError):
        raise argparse.ArgumentTypeError(f"profile must be self, perturbed or r=K:rho=V, got {text!r}") from None
    if r < 1 or not 0.0 <= rho <= 1.0:
        raise argparse.ArgumentTypeError(f"need r >= 1 and rho in [0, 1], got {text!r}")
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="credal-chain", description="Imprecise Markov chain analysis and perturbation bounds.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def outputs(p):
        p.add_argument("--csv", metavar="PATH", help="write the report as CSV")
        p.add_argument("--json", metavar="PATH", help="write the annotated report as JSON")

    default_steps = "1,2,3,inf"
    p = sub.add_parser("analyze", help="mass bounds, imprecision and ergodicity of one chain")
    p.add_argument("file")
    p.add_argument("--steps", type=parse_steps, default=parse_steps(default_steps))
    outputs(p)

    p = sub.add_parser("compare", help="measured distances and perturbation bounds between two chains")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--steps", type=parse_steps, default=parse_steps(default_steps))
    p.add_argument("--profile", type=_profile, default="perturbed",
                   help="ergodicity profile for the bounds: self, perturbed or r=K:rho=V")
    p.add_argument("--e0", type=_unit, default=None, help="override the initial distance used by the bounds")
    outputs(p)

    p = sub.add_parser("contaminate", help="epsilon-contamination identities and bounds")
    p.add_argument("file")
    p.add_argument("--eps", type=_eps, required=True)
    p.add_argument("--steps", type=parse_steps, default=parse_steps(default_steps))
    p.add_argument("--other", metavar="FILE", help="second chain for the scaling identities")
    outputs(p)

    p = sub.add_parser("reproduce", help="recompute the bundled worked examples")
    p.add_argument("which", choices=("example1", "example52"))
    outputs(p)
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ArgumentError as exc:
        print(f"credal-chain: error: {exc}", file=sys.stderr)
        return EXIT_ARGS

    try:
        if args.command == "analyze":
            table = cmd_analyze(args.file, args.steps)
        elif args.command == "compare":
            table = cmd_compare(args.file_a, args.file_b, args.steps, args.profile, args.e0)
        elif args.command == "contaminate":
            table = cmd_contaminate(args.file, args.eps, args.steps, args.other)
        else:
            table = cmd_reproduce(args.which)
    except SpecParseError as exc:
        print(f"credal-chain: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SpecValidationError as exc:
        print(f"credal-chain: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except UnsupportedError as exc:
        print(f"credal-chain: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except CredalError as exc:
        print(f"credal-chain: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"credal-chain: error: {exc}", file=sys.stderr)
        return EXIT_ARGS

    sys.stdout.write(table.render())
    try:
        write_outputs([table], args.csv, args.json)
    except OSError as exc:
        print(f"credal-chain: cannot write output: {exc}", file=sys.stderr)
        return EXIT_ARGS
    if args.command == "reproduce" and reproduction_failures(table):
        return EXIT_MISMATCH
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
