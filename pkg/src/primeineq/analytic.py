"""Certified evaluation of the explicit bounds used in the harmonic argument.

All functions return an :class:`~primeineq.enclosure.Enclosure`. ``log`` is
the natural logarithm. The ``prec`` argument selects the working precision:
53 evaluates in doubles with outward rounding, anything larger goes through
mpmath interval arithmetic.
"""

from __future__ import annotations

import inspect
import math
from typing import Callable

from . import kernels
from .constants import (
    DUSART_LOWER_MIN_INDEX,
    DUSART_LOWER_SHIFT,
    DUSART_UPPER_MIN_INDEX,
    DUSART_UPPER_SHIFT,
    FOLDED_CONSTANT,
    FOLDED_NUMERATOR,
    HARMONIC_SPLIT,
    LOGSUM_PREFIX_BOUND,
    LOGSUM_START,
    TAIL_MARGIN,
    TAIL_RESIDUAL,
    TAIL_RESIDUAL_OFFSET,
    TailMarginParams,
)
from .enclosure import FLOAT_PREC, DomainError, Enclosure, context

__all__ = [
    "IndeterminateError",
    "PreconditionError",
    "dusart_lower",
    "dusart_upper",
    "exact_logsum",
    "find_crossover",
    "folded_constant_margin",
    "logsum_upper_bound",
    "tail_margin",
    "tail_residual_margin",
]

# Precisions tried, in order, when an enclosure is too wide to decide.
PRECISION_LADDER = (FLOAT_PREC, 128, 256, 512)


class PreconditionError(ValueError):
    pass


class IndeterminateError(ArithmeticError):
    """Still undecided at the highest working precision."""


def _dusart_expr(ctx, k: int, shift: str):
    kk = ctx.num(k)
    log_k = ctx.log(kk)
    loglog_k = ctx.log(log_k)
    return kk * (log_k + loglog_k - 1 + (loglog_k - ctx.const(shift)) / log_k)


def dusart_lower(k: int, prec: int = FLOAT_PREC) -> Enclosure:
    """k(log k + log log k - 1 + (log log k - 2.25)/log k), which p_k exceeds for k >= 2."""
    if k < DUSART_LOWER_MIN_INDEX:
        raise DomainError(f"lower bound needs k >= 2, got {k}")
    ctx = context(prec)
    return ctx.result(_dusart_expr(ctx, k, DUSART_LOWER_SHIFT))


def dusart_upper(k: int, prec: int = FLOAT_PREC) -> Enclosure:
    """k(log k + log log k - 1 + (log log k - 1.8)/log k), an upper bound for p_k when k >= 27076."""
    if k < DUSART_UPPER_MIN_INDEX:
        raise DomainError(f"upper bound needs k >= {DUSART_UPPER_MIN_INDEX}, got {k}")
    ctx = context(prec)
    return ctx.result(_dusart_expr(ctx, k, DUSART_UPPER_SHIFT))


def dusart_shift(upper: bool) -> Enclosure:
    return Enclosure.from_decimal(DUSART_UPPER_SHIFT if upper else DUSART_LOWER_SHIFT)


def logsum_upper_bound(m: int, n: int, prec: int = FLOAT_PREC) -> Enclosure:
    """n/log n + 4n/log^2 n + (sqrt(n) - 2(m - 1))/log^2 m, for 3 <= m < sqrt(n).

    This is an upper bound for sum_{k=m}^{n} 1/log k.
    """
    if m < 3 or m * m >= n:
        raise DomainError(f"need 3 <= m < sqrt(n), got m={m}, n={n}")
    ctx = context(prec)
    nn = ctx.num(n)
    log_n = ctx.log(nn)
    log_m = ctx.log(ctx.num(m))
    value = (
        nn / log_n
        + 4 * nn / ctx.sqr(log_n)
        + (ctx.sqrt(nn) - ctx.num(2 * (m - 1))) / ctx.sqr(log_m)
    )
    return ctx.result(value)


def exact_logsum(m: int, n: int) -> Enclosure:
    """sum_{k=m}^{n} 1/log k, accumulated term by term with outward rounding.

    An empty range (m > n) gives [0, 0].
    """
    if m < 2:
        raise DomainError(f"1/log k is undefined at k={m}")
    if m > n:
        return Enclosure(0.0, 0.0)
    if n >= 1 << 53:
        raise DomainError("indices must be exactly representable as doubles")
    return Enclosure(*kernels.logsum_bounds(m, n))


def tail_margin(
    n: int, prec: int = FLOAT_PREC, params: TailMarginParams = TAIL_MARGIN
) -> Enclosure:
    """F(n) = 0.55n/log n + 8.2n/log^2 n - 4n loglog n/log^2 n
    - sqrt(n)(loglog n - 1.8)/log^2 164 - log n + 2960.17 loglog n - 8992.62.

    F(n) > 0 is the last step of the harmonic tail argument.
    """
    if n < 3:
        raise DomainError(f"tail margin needs n >= 3, got {n}")
    ctx = context(prec)
    nn = ctx.num(n)
    log_n = ctx.log(nn)
    loglog_n = ctx.log(log_n)
    log_n2 = ctx.sqr(log_n)
    log_base2 = ctx.sqr(ctx.log(ctx.num(params.c4_base)))
    value = (
        ctx.const(params.c1) * nn / log_n
        + ctx.const(params.c2) * nn / log_n2
        - ctx.const(params.c3) * nn * loglog_n / log_n2
        - ctx.sqrt(nn) * (loglog_n - ctx.const(params.c5)) / log_base2
        - log_n
        + ctx.const(params.c6) * loglog_n
        - ctx.const(params.c7)
    )
    return ctx.result(value)


def _folded_expr(ctx):
    return ctx.num(FOLDED_NUMERATOR) / ctx.sqr(
        ctx.log(ctx.num(LOGSUM_START))
    ) + ctx.const(LOGSUM_PREFIX_BOUND)


def folded_constant_value(prec: int = FLOAT_PREC) -> Enclosure:
    """326/log^2 164 + 2948.64."""
    ctx = context(prec)
    return ctx.result(_folded_expr(ctx))


def folded_constant_margin(prec: int = FLOAT_PREC) -> Enclosure:
    """326/log^2 164 + 2948.64 - 2961.17; must be >= 0 for the folding step."""
    ctx = context(prec)
    return ctx.result(_folded_expr(ctx) - ctx.const(FOLDED_CONSTANT))


def _residual_expr(ctx):
    m = ctx.num(HARMONIC_SPLIT)
    log_m = ctx.log(m)
    return (
        ctx.const(TAIL_RESIDUAL_OFFSET)
        + ctx.const(DUSART_UPPER_SHIFT) * ctx.const(FOLDED_CONSTANT)
        - m * (log_m + ctx.log(log_m) - 2)
        + 2 * m / log_m
    )


def tail_residual_value(prec: int = FLOAT_PREC) -> Enclosure:
    """283451.35 + 1.8 * 2961.17 - m(log m + loglog m - 2) + 2m/log m at m = 27076."""
    ctx = context(prec)
    return ctx.result(_residual_expr(ctx))


def tail_residual_margin(prec: int = FLOAT_PREC) -> Enclosure:
    """8992.62 minus the residual; must be > 0."""
    ctx = context(prec)
    return ctx.result(ctx.const(TAIL_RESIDUAL) - _residual_expr(ctx))


def _accepts_prec(f: Callable) -> bool:
    try:
        return "prec" in inspect.signature(f).parameters
    except (TypeError, ValueError):
        return False


def certified_positive(f: Callable, n: int, accepts_prec: bool | None = None) -> bool:
    """Whether f(n) > 0 is certified, raising precision while undecided."""
    if accepts_prec is None:
        accepts_prec = _accepts_prec(f)
    if not accepts_prec:
        enc = f(n)
        if enc.lo > 0.0:
            return True
        if enc.hi <= 0.0:
            return False
        raise IndeterminateError(f"f({n}) = [{enc.lo}, {enc.hi}] straddles 0")
    for prec in PRECISION_LADDER:
        enc = f(n, prec=prec)
        if enc.lo > 0.0:
            return True
        if enc.hi <= 0.0:
            return False
    raise IndeterminateError(
        f"f({n}) = [{enc.lo}, {enc.hi}] straddles 0 at {PRECISION_LADDER[-1]} bits"
    )


LINEAR_SCAN_WIDTH = 1 << 20


def find_crossover(f: Callable, lo: int, hi: int) -> int:
    """Smallest n in (lo, hi] with f(n) certified positive.

    ``f`` maps an integer to an Enclosure and may accept a ``prec`` keyword,
    in which case undecided points are re-evaluated at higher precision.
    The only precondition is that f(hi) is certified positive; ``lo`` itself
    is never evaluated as a candidate.

    Ranges narrower than 2^20 are scanned linearly, so the result is the true
    minimum. Wider ranges are bisected: the result n then satisfies
    "f(n) > 0 and f(n - 1) not certified positive", which is the minimum
    only if f changes sign once on the range.
    """
    if hi <= lo:
        raise PreconditionError(f"empty range ({lo}, {hi}]")
    accepts = _accepts_prec(f)
    if not certified_positive(f, hi, accepts):
        raise PreconditionError(f"f({hi}) is not certified positive")
    if hi - lo < LINEAR_SCAN_WIDTH:
        for n in range(lo + 1, hi + 1):
            if certified_positive(f, n, accepts):
                return n
        raise AssertionError("unreachable: f(hi) is positive")
    left, right = lo, hi
    while right - left > 1:
        mid = (left + right) // 2
        if certified_positive(f, mid, accepts):
            right = mid
        else:
            left = mid
    return right


def dusart_check(
    upper: bool, k_max: int, k_min: int | None = None, block: int = 1 << 16, **stream_kwargs
) -> dict:
    """Compare a Dusart bound with every p_k for k in [k_min, k_max].

    Returns ``{"checked", "violations", "worst_relative_slack", "k_min", "k_max"}``.
    """
    from .primes import PrimeStream, upper_bound_for_nth_prime, ResourceLimitError

    floor = DUSART_UPPER_MIN_INDEX if upper else DUSART_LOWER_MIN_INDEX
    k_min = floor if k_min is None else max(k_min, floor)
    report = {
        "k_min": k_min,
        "k_max": k_max,
        "checked": 0,
        "violations": [],
        "worst_relative_slack": None,
    }
    if k_max < k_min:
        return report
    max_bound = stream_kwargs.get("max_bound")
    if max_bound is not None and upper_bound_for_nth_prime(k_max) > max_bound:
        raise ResourceLimitError(f"p_{k_max} is expected beyond the sieve cap {max_bound}")
    shift = dusart_shift(upper)
    stream = PrimeStream(**stream_kwargs)
    stream.take(k_min - 1)
    worst = math.inf
    k = k_min
    while k <= k_max:
        chunk = stream.take(min(block, k_max - k + 1))
        bad, slack = kernels.dusart_scan(k, chunk, shift.lo, shift.hi, upper)
        report["violations"].extend(bad)
        worst = min(worst, slack)
        k += len(chunk)
    report["checked"] = k_max - k_min + 1
    report["worst_relative_slack"] = worst
    return report
