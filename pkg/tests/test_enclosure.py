"""Soundness of the float and interval contexts against 200-bit mpmath."""

from fractions import Fraction
import math

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from primeineq.enclosure import DomainError, Enclosure, FLOAT_PREC, context

REF = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else None
REF_PREC = 200

reals = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False)
positive = st.floats(min_value=1e-9, max_value=1e15, allow_nan=False, allow_infinity=False)


def ref(fn, *args):
    with mpmath.workprec(REF_PREC):
        return fn(*[mpmath.mpf(a) for a in args])


def encloses(e: Enclosure, value) -> bool:
    return mpmath.mpf(e.lo) <= value <= mpmath.mpf(e.hi)


@settings(max_examples=300)
@given(reals, reals)
def test_arithmetic_is_sound(x, y):
    a, b = Enclosure.point(x), Enclosure.point(y)
    assert encloses(a + b, ref(lambda u, v: u + v, x, y))
    assert encloses(a - b, ref(lambda u, v: u - v, x, y))
    assert encloses(a * b, ref(lambda u, v: u * v, x, y))
    if y != 0.0:
        assert encloses(a / b, ref(lambda u, v: u / v, x, y))
    assert encloses(a.sqr(), ref(lambda u: u * u, x))


@settings(max_examples=300)
@given(positive)
def test_log_and_sqrt_are_sound(x):
    a = Enclosure.point(x)
    assert encloses(a.log(), ref(mpmath.log, x))
    assert encloses(a.sqrt(), ref(mpmath.sqrt, x))


@settings(max_examples=100)
@given(st.integers(3, 10**12), st.sampled_from([FLOAT_PREC, 64, 128]))
def test_composite_expression_is_sound(n, prec):
    # n log log n / log^2 n, the shape used by the tail margin
    ctx = context(prec)
    nn = ctx.num(n)
    ln = ctx.log(nn)
    val = ctx.result(nn * ctx.log(ln) / ctx.sqr(ln))
    with mpmath.workprec(REF_PREC):
        N = mpmath.mpf(n)
        exact = N * mpmath.log(mpmath.log(N)) / mpmath.log(N) ** 2
    assert encloses(val, exact)


@given(st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**9))
def test_from_fraction_is_tight(q):
    e = Enclosure.from_fraction(q)
    assert q in e
    assert e.hi == e.lo or math.nextafter(e.lo, math.inf) == e.hi


def test_decimal_literals():
    e = Enclosure.from_decimal("0.55")
    assert Fraction(55, 100) in e
    assert e.lo < e.hi
    assert Enclosure.from_decimal("2.25").width == 0.0 or Enclosure.from_decimal("2.25").lo == 2.25


def test_big_int_is_enclosed():
    n = (1 << 60) + 1
    assert n in Enclosure.from_int(n)


def test_higher_precision_is_narrower():
    w = [context(p).result(context(p).log(context(p).num(10**9))).width for p in (53, 128)]
    assert w[1] <= w[0]


def test_domain_errors():
    with pytest.raises(DomainError):
        Enclosure(-1.0, 1.0).log()
    with pytest.raises(DomainError):
        Enclosure(-1.0, 1.0).sqrt()
    with pytest.raises(DomainError):
        Enclosure(1.0, 2.0) / Enclosure(-1.0, 1.0)
    with pytest.raises(ValueError):
        Enclosure(2.0, 1.0)
    with pytest.raises(DomainError):
        context(128).log(context(128).num(0))


def test_predicates():
    assert Enclosure(1.0, 2.0).is_positive()
    assert Enclosure(-2.0, -1.0).is_negative()
    assert Enclosure(-1.0, 1.0).straddles_zero()
    assert Enclosure(1.0, 3.0).mid == 2.0
