"""Command-line interface.

Exit codes: 0 when every check is ConsistentWith, 1 when any is Violated,
2 when any is Inconclusive (or a usage/config error occurred) and none is
Violated.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .config import FORMATS, ConfigError, parse_config, print_config
from .convergence import THEOREMS
from .runner import emit_report, markdown_text, run_suite
from .verdict import UsageError

COUNTEREXAMPLE = """\
[experiment]
name = counterexample
seed = 0

[space]
kind = euclidean
dim = 1

[family alternating]
family = oscillating
low = 0
high = 1

[suite]
limit_mode_check family=alternating mode=prox
limit_mode_check family=alternating mode=envelope
mosco_check family=alternating candidate=zero
"""


def _global_flags(p: argparse.ArgumentParser, top: bool) -> None:
    # Flags are accepted before or after the subcommand; SUPPRESS keeps the
    # subparser from clobbering a value given at the top level.
    d = None if top else argparse.SUPPRESS
    p.add_argument("--config", default=d, help="experiment config file")
    p.add_argument("--out", default=d, help="output directory for reports")
    p.add_argument("--seed", type=int, default=d, help="override the config seed")
    p.add_argument("--tol-seq", type=float, default=d, help="tail tolerance for limits")
    p.add_argument("--format", default=d,
                   help=f"comma-separated subset of {','.join(FORMATS)}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hadprox",
        description="Proximal maps, Moreau envelopes and convergence checks on Hadamard "
                    "model spaces.",
        epilog="exit status: 0 all consistent, 1 something violated, 2 inconclusive or error")
    p.add_argument("--version", action="version", version=f"hadprox {__version__}")
    _global_flags(p, top=True)
    sub = p.add_subparsers(dest="command", required=True)

    for name, what in (("prox", "proximal point"), ("envelope", "Moreau envelope value"),
                       ("slope", "local slope")):
        q = sub.add_parser(name, help=f"compute a {what}")
        _global_flags(q, top=False)
        q.add_argument("--space", default="kind=euclidean,dim=1", help="space descriptor")
        q.add_argument("--f", required=True, help="functional descriptor")
        q.add_argument("--x", required=True, help="point")
        if name != "slope":
            q.add_argument("--lambda", dest="lam", default="1",
                           help="step size (';'-separated list allowed)")

    q = sub.add_parser("verify", help="check one theorem on a family")
    _global_flags(q, top=False)
    q.add_argument("theorem_id", choices=THEOREMS)
    q.add_argument("--space", default="kind=euclidean,dim=1", help="space descriptor")
    q.add_argument("--family", default="shifted_abs", help="family name or descriptor")
    q.add_argument("--limit", help="limit functional (defaults to the family's own)")
    q.add_argument("--points", help="';'-separated point grid")
    q.add_argument("--lambdas", help="';'-separated step sizes")

    q = sub.add_parser("run", help="run an experiment config")
    _global_flags(q, top=False)
    q.add_argument("config_file", nargs="?", help="config path (or use --config)")
    q.add_argument("--print-config", action="store_true",
                   help="print the canonical config and exit")

    q = sub.add_parser("demo", help="built-in demonstrations")
    _global_flags(q, top=False)
    q.add_argument("name", choices=("counterexample",))
    return p


def _entry_config(args, entry: str) -> str:
    return (f"[space]\n{_section_lines(args.space)}\n\n[suite]\n{entry}\n")


def _section_lines(descriptor: str) -> str:
    from .descriptors import parse_descriptor
    return "\n".join(f"{k} = {v}" for k, v in parse_descriptor(descriptor).items())


def _bracket(v: str) -> str:
    return f"[{v}]"


def _config_text(args) -> str:
    cmd = args.command
    if cmd in ("prox", "envelope"):
        return _entry_config(args, f"{cmd} f={_bracket(args.f)} x={_bracket(args.x)} "
                                   f"lambda={_bracket(args.lam)}")
    if cmd == "slope":
        return _entry_config(args, f"slope f={_bracket(args.f)} x={_bracket(args.x)}")
    if cmd == "verify":
        parts = [f"theorem_verify {args.theorem_id}", f"family={_bracket(args.family)}"]
        for k in ("limit", "points", "lambdas"):
            if getattr(args, k):
                parts.append(f"{k}={_bracket(getattr(args, k))}")
        return _entry_config(args, " ".join(parts))
    if cmd == "demo":
        return COUNTEREXAMPLE
    path = args.config_file or args.config
    if not path:
        raise UsageError("run needs a config file")
    return Path(path).read_text()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = _config_text(args)
        cfg = parse_config(text)
    except ConfigError as e:
        for ln, msg in e.errors:
            print(f"config error: line {ln}: {msg}", file=sys.stderr)
        return 2
    except (UsageError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    cfg = cfg.with_overrides(seed=args.seed, tol_seq=args.tol_seq, formats=args.format)
    if getattr(args, "print_config", False):
        print(print_config(cfg), end="")
        return 0
    report = run_suite(cfg, text)
    print(markdown_text(report))
    out = args.out or (cfg.output if args.command == "run" else None)
    if out:
        try:
            emit_report(report, out, cfg.formats, text)
        except OSError as e:
            print(f"error: cannot write report to {out}: {e}", file=sys.stderr)
            return 2
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
