# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops in ``_pykernels``.

Results are identical to the pure-Python module. Must be compiled without
-ffast-math: outward rounding depends on IEEE round-to-nearest arithmetic.
"""

from libc.math cimport log, nextafter, INFINITY

from primeineq import _pykernels as _py

BACKEND = "cython"

# Kind codes; must match _pykernels.
cdef enum:
    MANDL = 0
    HASSANI = 1
    SUN_HARMONIC = 2
    SUN_WEIGHTED = 3
    SUN_HALF = 4
    ABSTRACT_WEIGHTED = 5

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

ctypedef unsigned long long u64

cdef u64 _MASK64 = 0xFFFFFFFFFFFFFFFF
# Accumulators above this fall back to Python ints (leaves room for 9 * skp).
cdef object _PY_LIMIT = 1 << 120


cdef inline u128 _to_u128(object x):
    cdef u64 lo = x & 0xFFFFFFFFFFFFFFFF
    cdef u64 hi = x >> 64
    return ((<u128>hi) << 64) | (<u128>lo)


cdef inline object _from_u128(u128 v):
    cdef u64 hi = <u64>(v >> 64)
    cdef u64 lo = <u64>(v & _MASK64)
    return (int(hi) << 64) | int(lo)


cdef inline bint _over(u128 v):
    return (v >> 120) != 0


def sieve_segment(u64 low, Py_ssize_t count, base_primes):
    cdef bytearray buf = bytearray(b"\x01") * count
    cdef unsigned char[::1] seg = buf
    cdef u64 high = low + 2 * <u64>count
    cdef u64 p, pp, start
    cdef Py_ssize_t i
    for obj in base_primes:
        p = obj
        pp = p * p
        if pp >= high:
            break
        if pp >= low:
            start = pp
        else:
            start = ((low + p - 1) // p) * p
            if (start & 1) == 0:
                start += p
        i = <Py_ssize_t>((start - low) >> 1)
        while i < count:
            seg[i] = 0
            i += <Py_ssize_t>p
    out = []
    cdef u64 v = low
    for i in range(count):
        if seg[i]:
            out.append(v)
        v += 2
    return out


cdef inline double _dn(double x) nogil:
    return nextafter(x, -INFINITY)


cdef inline double _up(double x) nogil:
    return nextafter(x, INFINITY)


def logsum_bounds(long long m, long long n):
    cdef double lo = 0.0, hi = 0.0, v, l_lo, l_hi
    cdef long long k
    with nogil:
        for k in range(m, n + 1):
            v = log(<double>k)
            l_lo = _dn(_dn(v))
            l_hi = _up(_up(v))
            lo = _dn(lo + _dn(1.0 / l_hi))
            hi = _up(hi + _up(1.0 / l_lo))
    return lo, hi


cdef inline void _dusart(long long k, double c_lo, double c_hi,
                         double *out_lo, double *out_hi) nogil:
    cdef double v = log(<double>k)
    cdef double l_lo = _dn(_dn(v)), l_hi = _up(_up(v))
    cdef double ll_lo = _dn(_dn(log(l_lo))), ll_hi = _up(_up(log(l_hi)))
    cdef double s_lo = _dn(_dn(l_lo + ll_lo) - 1.0)
    cdef double s_hi = _up(_up(l_hi + ll_hi) - 1.0)
    cdef double num_lo = _dn(ll_lo - c_hi), num_hi = _up(ll_hi - c_lo)
    cdef double q_lo, q_hi
    if num_lo >= 0.0:
        q_lo = _dn(num_lo / l_hi)
    else:
        q_lo = _dn(num_lo / l_lo)
    if num_hi >= 0.0:
        q_hi = _up(num_hi / l_lo)
    else:
        q_hi = _up(num_hi / l_hi)
    cdef double t_lo = _dn(s_lo + q_lo), t_hi = _up(s_hi + q_hi)
    cdef double kf = <double>k
    out_lo[0] = _dn(kf * t_lo)
    out_hi[0] = _up(kf * t_hi)


def dusart_bounds(long long k, double c_lo, double c_hi):
    cdef double lo, hi
    _dusart(k, c_lo, c_hi, &lo, &hi)
    return lo, hi


def dusart_scan(long long k0, primes, double c_lo, double c_hi, bint upper):
    cdef double lo, hi, pf, slack, worst = INFINITY
    cdef long long k = k0
    violations = []
    for obj in primes:
        pf = <double>(<u64>obj)
        _dusart(k, c_lo, c_hi, &lo, &hi)
        if upper:
            slack = (lo - pf) / pf
            if not lo >= pf:
                violations.append(k)
        else:
            slack = (pf - hi) / pf
            if not hi < pf:
                violations.append(k)
        if slack < worst:
            worst = slack
        k += 1
    return violations, worst


cdef bint _fits(long long k0, primes):
    # Keeps every product below 2^120: n < 2^31, p < 2^40.
    if k0 < 1 or k0 + len(primes) >= (1LL << 31):
        return False
    for obj in primes:
        if obj >= (1 << 40):
            return False
    return True


def block_sums(long long k0, primes, int scale_bits):
    if scale_bits != 64 or not _fits(k0, primes):
        return _py.block_sums(k0, primes, scale_bits)
    cdef u128 s1 = 0, skp = 0, h_lo = 0, h_hi = 0, num, q
    cdef u64 p
    cdef long long k = k0
    for obj in primes:
        p = obj
        s1 += p
        skp += (<u128>k) * p
        num = (<u128>p) << 64
        q = num / (<u128>k)
        h_lo += q
        h_hi += q + (1 if q * (<u128>k) != num else 0)
        if _over(h_hi) or _over(skp):
            return _py.block_sums(k0, primes, scale_bits)
        k += 1
    return _from_u128(s1), _from_u128(skp), _from_u128(h_lo), _from_u128(h_hi)


def block_scan(int kind, long long k0, primes, s1_in, skp_in, h_lo_in, h_hi_in,
               int scale_bits):
    if (scale_bits != 64 or kind < 0 or kind > 5 or not _fits(k0, primes)
            or s1_in >= _PY_LIMIT or skp_in >= _PY_LIMIT
            or h_lo_in >= _PY_LIMIT or h_hi_in >= _PY_LIMIT):
        return _py.block_scan(kind, k0, primes, s1_in, skp_in, h_lo_in,
                              h_hi_in, scale_bits)
    cdef u128 s1 = _to_u128(s1_in), skp = _to_u128(skp_in)
    cdef u128 h_lo = _to_u128(h_lo_in), h_hi = _to_u128(h_hi_in)
    cdef u128 num, q, t, nn
    cdef u64 p
    cdef long long n = k0
    cdef bint ok
    failures = []
    indeterminate = []
    for obj in primes:
        p = obj
        s1 += p
        skp += (<u128>n) * p
        num = (<u128>p) << 64
        q = num / (<u128>n)
        h_lo += q
        h_hi += q + (1 if q * (<u128>n) != num else 0)
        if _over(s1) or _over(skp) or _over(h_hi):
            return _py.block_scan(kind, k0, primes, s1_in, skp_in, h_lo_in,
                                  h_hi_in, scale_bits)
        nn = (<u128>n) * (<u128>n)
        if kind == MANDL:
            ok = 2 * s1 < (<u128>n) * p
        elif kind == HASSANI:
            ok = 14 * s1 + nn < 7 * (<u128>n) * p
        elif kind == SUN_HALF:
            ok = 4 * s1 + nn < 2 * (<u128>n) * p
        elif kind == SUN_WEIGHTED:
            ok = 9 * skp + nn * (<u128>n) < 3 * nn * p
        elif kind == ABSTRACT_WEIGHTED:
            ok = 3 * skp < nn * p
        elif p <= <u64>n:
            ok = False
        else:
            t = (<u128>(p - <u64>n)) << 64
            if t > h_hi:
                ok = True
            elif t <= h_lo:
                ok = False
            else:
                indeterminate.append(n)
                ok = True
        if not ok:
            failures.append(n)
        n += 1
    return (_from_u128(s1), _from_u128(skp), _from_u128(h_lo), _from_u128(h_hi),
            failures, indeterminate)
