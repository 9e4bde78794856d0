"""Pure-Python implementations of the hot loops.

Same signatures and results as the compiled ``_ckernels`` module; this one is
used when the extension is not built or ``PRIMEINEQ_PURE_PYTHON`` is set.
Float routines widen every rounded result by one ulp (two for ``log``) so the
returned pairs always bracket the exact real value.
"""

from __future__ import annotations

import math
from itertools import compress

BACKEND = "python"

_INF = math.inf
_nextafter = math.nextafter
_log = math.log

MANDL, HASSANI, SUN_HARMONIC, SUN_WEIGHTED, SUN_HALF, ABSTRACT_WEIGHTED = range(6)


def sieve_segment(low, count, base_primes):
    """Primes among the odd numbers ``low, low + 2, ..., low + 2(count - 1)``.

    ``low`` must be odd and at least 3; ``base_primes`` must hold every odd
    prime up to the square root of the segment's top, in increasing order.
    """
    seg = bytearray(b"\x01") * count
    high = low + 2 * count
    for p in base_primes:
        pp = p * p
        if pp >= high:
            break
        if pp >= low:
            start = pp
        else:
            start = -(-low // p) * p
            if not start & 1:
                start += p
        i = (start - low) >> 1
        if i < count:
            seg[i::p] = bytes((count - 1 - i) // p + 1)
    return list(compress(range(low, high, 2), seg))


def _log_bounds(x):
    v = _log(x)
    return (_nextafter(_nextafter(v, -_INF), -_INF),
            _nextafter(_nextafter(v, _INF), _INF))


def logsum_bounds(m, n):
    """Outward-rounded bounds of sum_{k=m}^{n} 1/log k (m >= 2)."""
    lo = hi = 0.0
    for k in range(m, n + 1):
        l_lo, l_hi = _log_bounds(k)
        lo = _nextafter(lo + _nextafter(1.0 / l_hi, -_INF), -_INF)
        hi = _nextafter(hi + _nextafter(1.0 / l_lo, _INF), _INF)
    return lo, hi


def dusart_bounds(k, c_lo, c_hi):
    """Bounds of k(log k + loglog k - 1 + (loglog k - c)/log k), c in [c_lo, c_hi]."""
    l_lo, l_hi = _log_bounds(k)
    ll_lo = _nextafter(_nextafter(_log(l_lo), -_INF), -_INF)
    ll_hi = _nextafter(_nextafter(_log(l_hi), _INF), _INF)
    s_lo = _nextafter(_nextafter(l_lo + ll_lo, -_INF) - 1.0, -_INF)
    s_hi = _nextafter(_nextafter(l_hi + ll_hi, _INF) - 1.0, _INF)
    num_lo = _nextafter(ll_lo - c_hi, -_INF)
    num_hi = _nextafter(ll_hi - c_lo, _INF)
    # log k > 0, so the sign of the numerator picks the divisor endpoint.
    q_lo = _nextafter(num_lo / (l_hi if num_lo >= 0.0 else l_lo), -_INF)
    q_hi = _nextafter(num_hi / (l_lo if num_hi >= 0.0 else l_hi), _INF)
    t_lo = _nextafter(s_lo + q_lo, -_INF)
    t_hi = _nextafter(s_hi + q_hi, _INF)
    kf = float(k)
    return (_nextafter(kf * t_lo, -_INF), _nextafter(kf * t_hi, _INF))


def dusart_scan(k0, primes, c_lo, c_hi, upper):
    """Check a Dusart bound against ``primes[i] = p_{k0 + i}``.

    Lower bound: violation unless ``hi < p``. Upper bound: violation unless
    ``lo >= p``. Returns ``(violating indices, smallest relative slack)``.
    """
    violations = []
    worst = _INF
    k = k0
    for p in primes:
        lo, hi = dusart_bounds(k, c_lo, c_hi)
        if upper:
            slack = (lo - p) / p
            if not lo >= p:
                violations.append(k)
        else:
            slack = (p - hi) / p
            if not hi < p:
                violations.append(k)
        if slack < worst:
            worst = slack
        k += 1
    return violations, worst


def block_sums(k0, primes, scale_bits):
    """Partial sums over one block: (sum p, sum k p, sum floor, sum ceil of p 2^s / k)."""
    s1 = skp = h_lo = h_hi = 0
    k = k0
    for p in primes:
        s1 += p
        skp += k * p
        q, r = divmod(p << scale_bits, k)
        h_lo += q
        h_hi += q + (r != 0)
        k += 1
    return s1, skp, h_lo, h_hi


def block_scan(kind, k0, primes, s1, skp, h_lo, h_hi, scale_bits):
    """Advance the basic accumulators through a block and check ``kind`` at each n.

    The accumulators passed in describe the prefix ending at ``k0 - 1``.
    Returns the updated accumulators plus the failing and indeterminate n.
    """
    failures = []
    indeterminate = []
    n = k0
    for p in primes:
        s1 += p
        skp += n * p
        q, r = divmod(p << scale_bits, n)
        h_lo += q
        h_hi += q + (r != 0)
        if kind == MANDL:
            ok = 2 * s1 < n * p
        elif kind == HASSANI:
            ok = 14 * s1 < 7 * n * p - n * n
        elif kind == SUN_HALF:
            ok = 4 * s1 < 2 * n * p - n * n
        elif kind == SUN_WEIGHTED:
            ok = 9 * skp < 3 * n * n * p - n * n * n
        elif kind == ABSTRACT_WEIGHTED:
            ok = 3 * skp < n * n * p
        elif kind == SUN_HARMONIC:
            t = (p - n) << scale_bits
            if t > h_hi:
                ok = True
            elif t <= h_lo:
                ok = False
            else:
                indeterminate.append(n)
                ok = True
        else:
            raise ValueError(f"unknown kind code {kind}")
        if not ok:
            failures.append(n)
        n += 1
    return s1, skp, h_lo, h_hi, failures, indeterminate
