"""Running prefix sums of weighted primes and the per-n inequality decisions.

Inequalities with integer reformulations are decided in exact integer
arithmetic. Sums with rational terms (sum p_k/k and the general weighted
sums with negative powers of k) are kept as a pair of integers ``lo <= S *
2^scale_bits <= hi`` built from per-term floor and ceiling, so the pair
brackets the exact sum with a width of at most one unit per term. Every
inequality is strict: equality counts as a failure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .constants import (
    CLAIMED_GENERAL_THRESHOLDS,
    CLAIMED_THRESHOLDS,
    DEFAULT_SCALE_BITS,
)


class IndexGapError(ValueError):
    """A prime was fed out of order."""


class UnsupportedKindError(ValueError):
    pass


class ParameterDomainError(ValueError):
    pass


class Kind(enum.Enum):
    MANDL = "mandl"
    HASSANI = "hassani"
    SUN_HARMONIC = "sun-harmonic"
    SUN_WEIGHTED = "sun-weighted"
    SUN_HALF = "sun-half"
    ABSTRACT_WEIGHTED = "abstract-weighted"
    GENERAL_FIRST = "general"
    GENERAL_SECOND = "general-second"


KERNEL_CODES = {
    Kind.MANDL: kernels.MANDL,
    Kind.HASSANI: kernels.HASSANI,
    Kind.SUN_HARMONIC: kernels.SUN_HARMONIC,
    Kind.SUN_WEIGHTED: kernels.SUN_WEIGHTED,
    Kind.SUN_HALF: kernels.SUN_HALF,
    Kind.ABSTRACT_WEIGHTED: kernels.ABSTRACT_WEIGHTED,
}

_GENERAL_KINDS = (Kind.GENERAL_FIRST, Kind.GENERAL_SECOND)


@dataclass(frozen=True)
class InequalityId:
    """Which inequality to check.

    ``GENERAL_FIRST`` is sum_{k<=n} k^(a-1) p_k^b < n^a p_n^b/(a+b)
    - b n^(a+1) p_n^(b-1)/(a+b)^2 and needs integers ``a`` and ``b >= 1``
    with ``a + b >= 1``. Pairs with ``a + b < 0`` are accepted only with
    ``allow_outside_hypothesis=True`` and are then marked in every report.
    ``GENERAL_SECOND`` is sum_{k<=n} p_k^b/k^(b+1) < (p_n^(b+1) - n p_n^b) /
    ((b+1) n^(b+1)) and needs ``b >= 1``.
    """

    kind: Kind
    a: int | None = None
    b: int | None = None
    allow_outside_hypothesis: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.kind not in _GENERAL_KINDS:
            if self.a is not None or self.b is not None:
                raise ParameterDomainError(f"{self.kind.value} takes no parameters")
            return
        if self.b is None or self.b < 1:
            raise ParameterDomainError(f"b must be a positive integer, got {self.b}")
        if self.kind is Kind.GENERAL_SECOND:
            if self.a is not None:
                raise ParameterDomainError("general-second takes no a")
            return
        if self.a is None:
            raise ParameterDomainError("general needs a")
        if self.a + self.b == 0:
            raise ParameterDomainError("a + b = 0 makes the right side undefined")
        if self.a + self.b < 1 and not self.allow_outside_hypothesis:
            raise ParameterDomainError(
                f"a + b must be >= 1 (a={self.a}, b={self.b}); "
                "pass allow_outside_hypothesis to scan anyway"
            )

    @classmethod
    def parse(cls, name: str, a: int | None = None, b: int | None = None,
              allow_outside_hypothesis: bool = False) -> "InequalityId":
        """Build from a command-line name. ``general`` without ``a`` means
        the second general inequality."""
        try:
            kind = Kind(name)
        except ValueError:
            raise ParameterDomainError(f"unknown inequality {name!r}") from None
        if kind is Kind.GENERAL_FIRST and a is None:
            kind = Kind.GENERAL_SECOND
        return cls(kind, a, b, allow_outside_hypothesis)

    @property
    def is_general(self) -> bool:
        return self.kind in _GENERAL_KINDS

    @property
    def slug(self) -> str:
        return self.kind.value

    @property
    def params(self) -> dict:
        if self.kind is Kind.GENERAL_FIRST:
            return {"a": self.a, "b": self.b}
        if self.kind is Kind.GENERAL_SECOND:
            return {"b": self.b}
        return {}

    @property
    def outside_hypothesis(self) -> bool:
        return self.kind is Kind.GENERAL_FIRST and self.a + self.b < 1

    @property
    def exact(self) -> bool:
        """Decided in pure integer arithmetic (never indeterminate)."""
        if self.kind is Kind.GENERAL_FIRST:
            return self.a >= 1
        return self.kind not in (Kind.SUN_HARMONIC, Kind.GENERAL_SECOND)

    @property
    def claimed_threshold(self) -> int | None:
        if self.kind is Kind.GENERAL_FIRST:
            return CLAIMED_GENERAL_THRESHOLDS.get((self.a, self.b))
        return CLAIMED_THRESHOLDS.get(self.kind.value)

    def __str__(self) -> str:
        if self.params:
            inner = ",".join(f"{k}={v}" for k, v in self.params.items())
            return f"{self.slug}({inner})"
        return self.slug


class Verdict(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class CheckOutcome:
    n: int
    verdict: Verdict
    margin: int | None = None  # right side minus left side, exact kinds only

    @property
    def holds(self) -> bool | None:
        if self.verdict is Verdict.INDETERMINATE:
            return None
        return self.verdict is Verdict.HOLDS


def _scaled_term(num: int, den: int, scale_bits: int) -> tuple[int, int]:
    q, r = divmod(num << scale_bits, den)
    return q, q + (r != 0)


@dataclass(slots=True)
class SumState:
    """Prefix sums up to index ``n``; ``n = 0`` is the empty prefix."""

    n: int = 0
    p_n: int = 0
    s1: int = 0
    skp: int = 0
    h_lo: int = 0
    h_hi: int = 0
    scale_bits: int = DEFAULT_SCALE_BITS

    def advance(self, k: int, p_k: int) -> "SumState":
        """Add term k in place and return self."""
        if k != self.n + 1:
            raise IndexGapError(f"expected index {self.n + 1}, got {k}")
        if p_k <= self.p_n:
            raise ValueError(f"p_{k} = {p_k} does not exceed p_{self.n} = {self.p_n}")
        self.s1 += p_k
        self.skp += k * p_k
        lo, hi = _scaled_term(p_k, k, self.scale_bits)
        self.h_lo += lo
        self.h_hi += hi
        self.n = k
        self.p_n = p_k
        return self

    def extend(self, primes: list[int]) -> "SumState":
        """Add ``primes[i]`` as term ``n + 1 + i`` for every i."""
        if not primes:
            return self
        if primes[0] <= self.p_n:
            raise ValueError("primes must continue the sequence")
        s1, skp, h_lo, h_hi = kernels.block_sums(self.n + 1, primes, self.scale_bits)
        self.s1 += s1
        self.skp += skp
        self.h_lo += h_lo
        self.h_hi += h_hi
        self.n += len(primes)
        self.p_n = primes[-1]
        return self

    @property
    def harmonic_bracket(self) -> tuple[Fraction, Fraction]:
        den = 1 << self.scale_bits
        return Fraction(self.h_lo, den), Fraction(self.h_hi, den)


@dataclass(slots=True)
class GeneralSumState:
    """Prefix sums for the two general inequalities.

    ``w_lo, w_hi`` bracket sum k^(a-1) p_k^b scaled by 2^scale_bits when
    ``a <= 0``; for ``a >= 1`` the sum is an integer and is stored unscaled
    with ``w_lo == w_hi``. ``v_lo, v_hi`` bracket sum p_k^b/k^(b+1) scaled by
    2^scale_bits. Only the sums named by ``track_first``/``track_second`` are
    maintained.
    """

    b: int
    a: int | None = None
    n: int = 0
    p_n: int = 0
    w_lo: int = 0
    w_hi: int = 0
    v_lo: int = 0
    v_hi: int = 0
    scale_bits: int = DEFAULT_SCALE_BITS
    track_first: bool = True
    track_second: bool = True

    @classmethod
    def for_inequality(cls, ineq: InequalityId,
                       scale_bits: int = DEFAULT_SCALE_BITS) -> "GeneralSumState":
        if not ineq.is_general:
            raise UnsupportedKindError(f"{ineq} has no general state")
        first = ineq.kind is Kind.GENERAL_FIRST
        return cls(b=ineq.b, a=ineq.a, scale_bits=scale_bits,
                   track_first=first, track_second=not first)

    @property
    def w(self) -> int:
        """The exact first sum (a >= 1 only)."""
        if self.a is None or self.a < 1:
            raise ValueError("the first sum is only exact for a >= 1")
        return self.w_lo

    def partial_sums(self, k0: int, primes: list[int]) -> tuple[int, int, int, int]:
        """Sums of the terms k0, k0+1, ... for ``primes``, without touching the state."""
        a, b, s = self.a, self.b, self.scale_bits
        w_lo = w_hi = v_lo = v_hi = 0
        k = k0
        for p in primes:
            pb = p**b
            if self.track_first:
                if a >= 1:
                    t = k ** (a - 1) * pb
                    w_lo += t
                    w_hi += t
                else:
                    lo, hi = _scaled_term(pb, k ** (1 - a), s)
                    w_lo += lo
                    w_hi += hi
            if self.track_second:
                lo, hi = _scaled_term(pb, k ** (b + 1), s)
                v_lo += lo
                v_hi += hi
            k += 1
        return w_lo, w_hi, v_lo, v_hi

    def add_partial(self, sums: tuple[int, int, int, int], count: int, last_prime: int):
        self.w_lo += sums[0]
        self.w_hi += sums[1]
        self.v_lo += sums[2]
        self.v_hi += sums[3]
        self.n += count
        self.p_n = last_prime
        return self

    def advance(self, k: int, p_k: int) -> "GeneralSumState":
        if k != self.n + 1:
            raise IndexGapError(f"expected index {self.n + 1}, got {k}")
        if p_k <= self.p_n:
            raise ValueError(f"p_{k} = {p_k} does not exceed p_{self.n} = {self.p_n}")
        return self.add_partial(self.partial_sums(k, [p_k]), 1, p_k)


def check(state: SumState, ineq: InequalityId) -> CheckOutcome:
    """Decide ``ineq`` at ``n = state.n``."""
    if ineq.is_general:
        raise UnsupportedKindError(f"{ineq} is decided by check_general")
    n, p = state.n, state.p_n
    if n < 1:
        raise ValueError("empty prefix")
    kind = ineq.kind
    if kind is Kind.SUN_HARMONIC:
        t = (p - n) << state.scale_bits
        if t > state.h_hi:
            return CheckOutcome(n, Verdict.HOLDS)
        if t <= state.h_lo:
            return CheckOutcome(n, Verdict.FAILS)
        return CheckOutcome(n, Verdict.INDETERMINATE)
    if kind is Kind.MANDL:
        lhs, rhs = 2 * state.s1, n * p
    elif kind is Kind.HASSANI:
        lhs, rhs = 14 * state.s1, 7 * n * p - n * n
    elif kind is Kind.SUN_HALF:
        lhs, rhs = 4 * state.s1, 2 * n * p - n * n
    elif kind is Kind.SUN_WEIGHTED:
        lhs, rhs = 9 * state.skp, 3 * n * n * p - n**3
    elif kind is Kind.ABSTRACT_WEIGHTED:
        lhs, rhs = 3 * state.skp, n * n * p
    else:  # pragma: no cover - enum is exhaustive
        raise UnsupportedKindError(str(ineq))
    return CheckOutcome(n, Verdict.HOLDS if lhs < rhs else Verdict.FAILS, rhs - lhs)


def _power(n: int, e: int) -> Fraction:
    return Fraction(n**e) if e >= 0 else Fraction(1, n ** (-e))


def general_rhs(ineq: InequalityId, n: int, p: int) -> Fraction:
    """Right side of a general inequality as an exact rational."""
    b = ineq.b
    if ineq.kind is Kind.GENERAL_FIRST:
        a = ineq.a
        return (_power(n, a) * p**b / (a + b)
                - b * _power(n, a + 1) * p ** (b - 1) / (a + b) ** 2)
    return Fraction(p ** (b + 1) - n * p**b, (b + 1) * n ** (b + 1))


def _bracket_verdict(lo: int, hi: int, scale_bits: int, rhs: Fraction) -> Verdict:
    # lo/2^s <= true sum <= hi/2^s; decide true sum < rhs.
    target_num = rhs.numerator << scale_bits
    den = rhs.denominator
    if hi * den < target_num:
        return Verdict.HOLDS
    if lo * den >= target_num:
        return Verdict.FAILS
    return Verdict.INDETERMINATE


def check_general(state: GeneralSumState, ineq: InequalityId) -> CheckOutcome:
    """Decide a general inequality at ``n = state.n``."""
    if not ineq.is_general:
        raise UnsupportedKindError(f"{ineq} is decided by check")
    if (state.a, state.b) != (ineq.a, ineq.b):
        raise ParameterDomainError(f"state tracks a={state.a}, b={state.b}, not {ineq}")
    n, p = state.n, state.p_n
    if n < 1:
        raise ValueError("empty prefix")
    if ineq.kind is Kind.GENERAL_FIRST:
        if not state.track_first:
            raise ValueError("state does not track the first general sum")
        a, b = ineq.a, ineq.b
        if a >= 1:
            c = a + b
            lhs = c * c * state.w_lo
            rhs = c * n**a * p**b - b * n ** (a + 1) * p ** (b - 1)
            return CheckOutcome(n, Verdict.HOLDS if lhs < rhs else Verdict.FAILS, rhs - lhs)
        verdict = _bracket_verdict(state.w_lo, state.w_hi, state.scale_bits,
                                   general_rhs(ineq, n, p))
        return CheckOutcome(n, verdict)
    if not state.track_second:
        raise ValueError("state does not track the second general sum")
    verdict = _bracket_verdict(state.v_lo, state.v_hi, state.scale_bits,
                               general_rhs(ineq, n, p))
    return CheckOutcome(n, verdict)


def refine_scale(state, new_scale_bits: int, primes: list[int] | None = None,
                 **stream_kwargs):
    """Rebuild ``state`` from k = 1 with a finer scale.

    ``primes`` may supply p_1..p_n; otherwise they are re-sieved. The exact
    parts of the new state must agree with the old one.
    """
    from .primes import primes_list

    if new_scale_bits <= state.scale_bits:
        raise ValueError(
            f"new scale {new_scale_bits} must exceed the current {state.scale_bits}"
        )
    if primes is None:
        primes = primes_list(state.n, **stream_kwargs)
    elif len(primes) < state.n:
        raise ValueError("not enough primes supplied")
    primes = primes[: state.n]
    if isinstance(state, SumState):
        fresh = SumState(scale_bits=new_scale_bits).extend(primes)
        if (fresh.s1, fresh.skp, fresh.p_n) != (state.s1, state.skp, state.p_n):
            raise RuntimeError("recomputed exact sums disagree with the state")
        return fresh
    fresh = GeneralSumState(b=state.b, a=state.a, scale_bits=new_scale_bits,
                            track_first=state.track_first,
                            track_second=state.track_second)
    fresh.add_partial(fresh.partial_sums(1, primes), len(primes), primes[-1] if primes else 0)
    if fresh.p_n != state.p_n:
        raise RuntimeError("recomputed prefix ends at a different prime")
    if state.a is not None and state.a >= 1 and state.track_first and fresh.w_lo != state.w_lo:
        raise RuntimeError("recomputed exact sums disagree with the state")
    return fresh


def new_state(ineq: InequalityId, scale_bits: int = DEFAULT_SCALE_BITS):
    if ineq.is_general:
        return GeneralSumState.for_inequality(ineq, scale_bits)
    return SumState(scale_bits=scale_bits)


def decide(state, ineq: InequalityId) -> CheckOutcome:
    return check_general(state, ineq) if ineq.is_general else check(state, ineq)
