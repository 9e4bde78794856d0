"""Check sum_{k<=n} q_k < n q_n / log n over lists of special primes.

The lists are the exponents of Mersenne primes and the prime indices of
Fibonacci primes. n starts at 2, since log 1 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .enclosure import FLOAT_PREC, Enclosure, context
from .exact_sums import CheckOutcome, Verdict

LABELS = ("mersenne", "fibonacci")
PROVEN = "proven"
PROBABLE = "probable"
PRECISIONS = (FLOAT_PREC, 128, 256)

# Spot checks run at load: for q up to these limits the special number is
# tested for primality directly.
MERSENNE_SPOT_LIMIT = 61
FIBONACCI_SPOT_LIMIT = 47


class ListFormatError(ValueError):
    pass


class ListParseError(ListFormatError):
    def __init__(self, path, line: int, col: int, msg: str):
        super().__init__(f"{path}:{line}:{col}: {msg}")
        self.line = line
        self.col = col


class OrderingError(ListFormatError):
    pass


class CompositeEntryError(ListFormatError):
    pass


class SpotCheckError(ListFormatError):
    pass


def _isprime(n: int) -> bool:
    from sympy import isprime  # deterministic below 2^64

    return bool(isprime(n))


def fibonacci(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


@dataclass
class SpecialPrimeList:
    label: str
    values: list[int]
    provenance: list[str]
    source_path: str = ""

    def __len__(self) -> int:
        return len(self.values)


def bundled_path(label: str) -> Path:
    if label not in LABELS:
        raise ValueError(f"unknown list {label!r}; expected one of {LABELS}")
    return Path(str(resources.files("primeineq").joinpath("data", f"{label}.txt")))


def load_list(path, label: str) -> SpecialPrimeList:
    """Parse and validate a list file.

    One positive integer per line, optionally followed by the token
    ``probable``; lines starting with ``#`` and blank lines are skipped.
    """
    if label not in LABELS:
        raise ValueError(f"unknown list {label!r}; expected one of {LABELS}")
    values: list[int] = []
    provenance: list[str] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        col = raw.index(stripped[0]) + 1
        tokens = stripped.split()
        if len(tokens) > 2 or (len(tokens) == 2 and tokens[1] != PROBABLE):
            bad = raw.index(tokens[1]) + 1 if len(tokens) > 1 else col
            raise ListParseError(path, lineno, bad, f"unexpected token in {stripped!r}")
        if not tokens[0].isdigit():
            raise ListParseError(path, lineno, col, f"not a positive integer: {tokens[0]!r}")
        q = int(tokens[0])
        if q < 1:
            raise ListParseError(path, lineno, col, "entries must be positive")
        if values and q <= values[-1]:
            raise OrderingError(
                f"{path}:{lineno}: {q} does not exceed the previous entry {values[-1]}"
            )
        if q >= 1 << 64 or not _isprime(q):
            raise CompositeEntryError(f"{path}:{lineno}: {q} is not prime")
        values.append(q)
        provenance.append(PROBABLE if len(tokens) == 2 else PROVEN)

    for q in values:
        if label == "mersenne" and q <= MERSENNE_SPOT_LIMIT and not _isprime(2**q - 1):
            raise SpotCheckError(f"2^{q} - 1 is not prime")
        if label == "fibonacci" and q <= FIBONACCI_SPOT_LIMIT and not _isprime(fibonacci(q)):
            raise SpotCheckError(f"F_{q} is not prime")
    return SpecialPrimeList(label, values, provenance, str(path))


def load_bundled(label: str) -> SpecialPrimeList:
    return load_list(bundled_path(label), label)


def _ratio(total: int, n: int, top: int, prec: int) -> Enclosure:
    """Enclosure of total * log(n) / (n * top)."""
    ctx = context(prec)
    return ctx.result(ctx.num(total) * ctx.log(ctx.num(n)) / ctx.num(n * top))


def check_conjecture(lst: SpecialPrimeList, n: int) -> CheckOutcome:
    """Decide sum_{k<=n} q_k < n q_n / log n, i.e. (sum) log n < n q_n."""
    if not 2 <= n <= len(lst):
        raise IndexError(f"n must lie in [2, {len(lst)}], got {n}")
    total = sum(lst.values[:n])
    target = n * lst.values[n - 1]
    for prec in PRECISIONS:
        ctx = context(prec)
        lhs = ctx.result(ctx.num(total) * ctx.log(ctx.num(n)))
        if lhs.hi < target:
            return CheckOutcome(n, Verdict.HOLDS)
        if lhs.lo >= target:
            return CheckOutcome(n, Verdict.FAILS)
    return CheckOutcome(n, Verdict.INDETERMINATE)


@dataclass
class VerificationReport:
    label: str
    source_path: str
    length: int
    failures: list[int] = field(default_factory=list)
    indeterminates: list[int] = field(default_factory=list)
    min_margin: Enclosure | None = None
    min_margin_at: int | None = None
    checked_by_provenance: dict = field(default_factory=lambda: {PROVEN: 0, PROBABLE: 0})
    failures_by_provenance: dict = field(default_factory=lambda: {PROVEN: 0, PROBABLE: 0})

    @property
    def ok(self) -> bool:
        return not self.failures and not self.indeterminates

    def to_dict(self) -> dict:
        return {
            "list": self.label,
            "length": self.length,
            "n_range": [2, self.length],
            "failures": self.failures,
            "indeterminates": self.indeterminates,
            "min_relative_margin": None if self.min_margin is None else self.min_margin.to_dict(),
            "min_relative_margin_at": self.min_margin_at,
            "checked_by_provenance": self.checked_by_provenance,
            "failures_by_provenance": self.failures_by_provenance,
        }


def check_conjecture_all(lst: SpecialPrimeList) -> VerificationReport:
    """Check every n in [2, len(lst)].

    The relative margin at n is 1 - (sum) log n / (n q_n); the report keeps
    the smallest one. An n counts as ``probable`` when any of q_1..q_n is.
    """
    if len(lst) < 2:
        raise ValueError("need at least two entries")
    report = VerificationReport(lst.label, lst.source_path, len(lst))
    total = lst.values[0]
    tainted = lst.provenance[0] == PROBABLE
    best_hi = math.inf
    for n in range(2, len(lst) + 1):
        total += lst.values[n - 1]
        tainted = tainted or lst.provenance[n - 1] == PROBABLE
        tag = PROBABLE if tainted else PROVEN
        report.checked_by_provenance[tag] += 1
        outcome = check_conjecture(lst, n)
        if outcome.verdict is Verdict.FAILS:
            report.failures.append(n)
            report.failures_by_provenance[tag] += 1
        elif outcome.verdict is Verdict.INDETERMINATE:
            report.indeterminates.append(n)
        margin = 1 - _ratio(total, n, lst.values[n - 1], FLOAT_PREC)
        if margin.hi < best_hi:
            best_hi = margin.hi
            report.min_margin = margin
            report.min_margin_at = n
    return report
