"""Command-line entry point.

Exit status: 0 when the checked claim holds, 1 when it is refuted, 2 on an
operational error (bad flags, resource cap, corrupt checkpoint, ...).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__, analytic, conjecture, kernels
from .checkpoint import CheckpointError
from .constants import (
    DEFAULT_BLOCK_SIZE,
    DEFAULT_CHECKPOINT_EVERY,
    DEFAULT_SCALE_BITS,
    DEFAULT_SIEVE_CAP,
    DUSART_UPPER_MIN_INDEX,
    FOLDED_CONSTANT,
    HARMONIC_PREFIX_BOUND,
    HARMONIC_SPLIT,
    LOGSUM_PREFIX_BOUND,
    LOGSUM_START,
    TAIL_CROSSOVER,
    TAIL_RESIDUAL,
    TAIL_SEARCH_RANGE,
)
from .enclosure import DomainError, Enclosure
from .exact_sums import InequalityId, Kind, ParameterDomainError, SumState
from .primes import ResourceLimitError, primes_list
from .thresholds import resume, scan

EXIT_OK, EXIT_REFUTED, EXIT_ERROR = 0, 1, 2

INEQUALITY_CHOICES = [k.value for k in Kind if k is not Kind.GENERAL_SECOND]
CONSTANT_NAMES = ("sum-pk-over-k", "logsum-164", "folded-constant", "tail-residual")


class UsageError(Exception):
    """A flag combination that cannot run."""


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="primeineq",
        description="Check inequalities for sums of primes with exact or certified arithmetic.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--sieve-cap", type=_positive, default=DEFAULT_SIEVE_CAP,
                        help="largest integer the prime sieve may reach")

    for name in ("verify", "threshold"):
        p = sub.add_parser(name, parents=[common],
                           help="scan an inequality and certify its threshold")
        p.add_argument("--ineq", required=True, choices=INEQUALITY_CHOICES)
        p.add_argument("--a", type=int)
        p.add_argument("--b", type=int)
        p.add_argument("--allow-outside-hypothesis", action="store_true",
                       help="permit general (a, b) with a + b < 1")
        p.add_argument("--to", type=_positive, required=True, dest="n_max")
        p.add_argument("--assert-threshold", type=_positive)
        p.add_argument("--checkpoint")
        p.add_argument("--checkpoint-every", type=_positive, default=DEFAULT_CHECKPOINT_EVERY)
        p.add_argument("--resume", action="store_true")
        p.add_argument("--blocks", type=_positive, default=os.cpu_count() or 1,
                       help="worker processes (default: available processors)")
        p.add_argument("--block-size", type=_positive, default=DEFAULT_BLOCK_SIZE)
        p.add_argument("--scale-bits", type=_positive, default=DEFAULT_SCALE_BITS)
        p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("constants", parents=[common],
                       help="confirm the numeric constants of the harmonic tail argument")
    p.add_argument("--only", choices=CONSTANT_NAMES)
    p.set_defaults(handler=cmd_constants)

    p = sub.add_parser("tail", parents=[common], help="evaluate the tail-margin expression")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--at", type=int)
    mode.add_argument("--find", action="store_true")
    p.set_defaults(handler=cmd_tail)

    p = sub.add_parser("bounds", parents=[common],
                       help="check the Dusart bounds against every p_k")
    p.add_argument("--check", choices=["lower", "upper", "both"], default="both")
    p.add_argument("--to", type=_positive, required=True, dest="k_max")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("conjecture", parents=[common],
                       help="check sum q_k < n q_n / log n on a special-prime list")
    p.add_argument("--list", choices=list(conjecture.LABELS), required=True, dest="label")
    p.add_argument("--file", help="list file to use instead of the bundled one")
    p.set_defaults(handler=cmd_conjecture)
    return parser


def _inequality(args) -> InequalityId:
    if args.ineq != Kind.GENERAL_FIRST.value and (args.a is not None or args.b is not None):
        raise UsageError(f"--a/--b only apply to --ineq general, not {args.ineq}")
    if args.ineq == Kind.GENERAL_FIRST.value and args.b is None:
        raise UsageError("--ineq general needs --b (and --a for the first form)")
    try:
        return InequalityId.parse(args.ineq, args.a, args.b, args.allow_outside_hypothesis)
    except ParameterDomainError as exc:
        raise UsageError(f"--a/--b: {exc}") from None


def cmd_verify(args) -> tuple[int, dict]:
    ineq = _inequality(args)
    if args.resume and not args.checkpoint:
        raise UsageError("--resume needs --checkpoint")
    common = dict(block_size=args.block_size, workers=args.blocks, max_bound=args.sieve_cap)
    if args.resume:
        if args.scale_bits != DEFAULT_SCALE_BITS:
            raise UsageError("--scale-bits is taken from the checkpoint when resuming")
        cert = resume(args.checkpoint, ineq, args.n_max, args.checkpoint_every, **common)
    else:
        cert = scan(ineq, args.n_max, args.checkpoint_every, args.checkpoint,
                    scale_bits=args.scale_bits, **common)
    report = cert.to_dict()
    report["elapsed_ms"] = cert.elapsed_ms
    if args.assert_threshold is not None:
        verified = cert.complete and cert.threshold == args.assert_threshold
        report["assertion"] = {"threshold": args.assert_threshold, "verified": verified}
        return (EXIT_OK if verified else EXIT_REFUTED), report
    # without an explicit assertion the built-in claimed threshold (if any) is checked
    ok = cert.complete and cert.claim_status in (None, "match", "claim-not-minimal")
    return (EXIT_OK if ok else EXIT_REFUTED), report


def _enc(e: Enclosure) -> dict:
    return {"lo": e.lo, "hi": e.hi, "width": e.width}


def _enc_rel(e: Enclosure) -> dict:
    out = _enc(e)
    out["relative_width"] = e.width / min(abs(e.lo), abs(e.hi))
    return out


def _constant_sum_pk_over_k(cap: int) -> dict:
    primes = primes_list(HARMONIC_SPLIT - 1, max_bound=cap)
    state = SumState().extend(primes)
    den = 1 << state.scale_bits
    value = Enclosure(Enclosure.from_fraction(Fraction(state.h_lo, den)).lo,
                      Enclosure.from_fraction(Fraction(state.h_hi, den)).hi)
    bound = Enclosure.from_decimal(HARMONIC_PREFIX_BOUND)
    return {"claim": f"sum_{{k<{HARMONIC_SPLIT}}} p_k/k < {HARMONIC_PREFIX_BOUND}",
            "enclosure": _enc_rel(value), "holds": value.hi < bound.lo}


def _constant_logsum() -> dict:
    value = analytic.exact_logsum(LOGSUM_START, HARMONIC_SPLIT - 1)
    bound = Enclosure.from_decimal(LOGSUM_PREFIX_BOUND)
    return {"claim": f"sum_{{k={LOGSUM_START}}}^{{{HARMONIC_SPLIT - 1}}} 1/log k > {LOGSUM_PREFIX_BOUND}",
            "enclosure": _enc_rel(value), "holds": value.lo > bound.hi}


def _constant_folded() -> dict:
    value = analytic.folded_constant_value()
    margin = analytic.folded_constant_margin()
    return {"claim": f"326/log^2 164 + {LOGSUM_PREFIX_BOUND} >= {FOLDED_CONSTANT}",
            "enclosure": _enc_rel(value), "margin": _enc(margin), "holds": margin.lo >= 0.0}


def _constant_residual() -> dict:
    value = analytic.tail_residual_value()
    margin = analytic.tail_residual_margin()
    return {"claim": f"n-independent residual < {TAIL_RESIDUAL}",
            "enclosure": _enc_rel(value), "margin": _enc(margin), "holds": margin.lo > 0.0}


def cmd_constants(args) -> tuple[int, dict]:
    checks = {
        "sum-pk-over-k": lambda: _constant_sum_pk_over_k(args.sieve_cap),
        "logsum-164": _constant_logsum,
        "folded-constant": _constant_folded,
        "tail-residual": _constant_residual,
    }
    names = [args.only] if args.only else list(CONSTANT_NAMES)
    results = {name: checks[name]() for name in names}
    ok = all(r["holds"] for r in results.values())
    return (EXIT_OK if ok else EXIT_REFUTED), {"constants": results, "all_hold": ok}


def cmd_tail(args) -> tuple[int, dict]:
    if args.find:
        lo, hi = TAIL_SEARCH_RANGE
        n = analytic.find_crossover(analytic.tail_margin, lo, hi)
        value = analytic.tail_margin(n)
        before = analytic.tail_margin(n - 1, prec=128)
        report = {
            "search_range": [lo, hi],
            "crossover": n,
            "value_at_crossover": _enc(value),
            "value_before_crossover": _enc(before),
            "claimed_crossover": TAIL_CROSSOVER,
            "matches_claim": n == TAIL_CROSSOVER,
            "note": "first n in the range with a certified positive margin; "
                    "positivity beyond it is not established by this search",
        }
        return (EXIT_OK if n <= TAIL_CROSSOVER else EXIT_REFUTED), report
    value = analytic.tail_margin(args.at)
    positive = analytic.certified_positive(analytic.tail_margin, args.at)
    report = {"n": args.at, "enclosure": _enc_rel(value), "positive": positive,
              "negative": value.hi < 0.0}
    return (EXIT_OK if positive else EXIT_REFUTED), report


def cmd_bounds(args) -> tuple[int, dict]:
    kinds = ["lower", "upper"] if args.check == "both" else [args.check]
    results = {}
    ok = True
    for kind in kinds:
        upper = kind == "upper"
        r = analytic.dusart_check(upper, args.k_max, max_bound=args.sieve_cap)
        if upper and args.k_max < DUSART_UPPER_MIN_INDEX:
            r["note"] = f"empty range: the upper bound applies from k = {DUSART_UPPER_MIN_INDEX}"
        r["violation_count"] = len(r["violations"])
        r["violations"] = r["violations"][:100]
        ok = ok and r["violation_count"] == 0
        results[kind] = r
    return (EXIT_OK if ok else EXIT_REFUTED), {"bounds": results, "k_max": args.k_max}


def cmd_conjecture(args) -> tuple[int, dict]:
    path = args.file or conjecture.bundled_path(args.label)
    lst = conjecture.load_list(path, args.label)
    report = conjecture.check_conjecture_all(lst).to_dict()
    ok = not report["failures"] and not report["indeterminates"]
    return (EXIT_OK if ok else EXIT_REFUTED), report


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for key, value in obj.items():
            yield from _flatten(value, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, value in enumerate(obj):
            yield from _flatten(value, f"{prefix}.{i}")
    else:
        yield prefix, obj


def _scalar(value) -> str:
    if isinstance(value, list):
        return " ".join(str(v) for v in value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render(report: dict, fmt: str) -> str:
    """JSON is canonical; CSV and text are flat key/value projections of it."""
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    rows = sorted(_flatten(report))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        writer.writerows((k, _scalar(v)) for k, v in rows)
        return buf.getvalue()
    return "".join(f"{k}: {_scalar(v)}\n" for k, v in rows)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    t0 = time.perf_counter()
    try:
        status, report = args.handler(args)
    except UsageError as exc:
        print(f"primeineq {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ResourceLimitError, CheckpointError, conjecture.ListFormatError,
            DomainError, analytic.PreconditionError, analytic.IndeterminateError,
            OSError, ValueError) as exc:
        print(f"primeineq {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    elapsed = report.pop("elapsed_ms", (time.perf_counter() - t0) * 1000.0)
    report["command"] = args.command
    report["exit_status"] = status
    report["meta"] = {
        "elapsed_ms": elapsed,
        "version": __version__,
        "command_line": ["primeineq", *argv],
        "kernel_backend": kernels.BACKEND,
    }
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
