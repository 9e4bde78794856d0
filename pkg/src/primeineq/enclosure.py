"""Float intervals with outward rounding.

Every operation computes in round-to-nearest and then widens the result by
one ulp on each side, which always covers the rounding error. ``log`` comes
from the platform libm, which is not guaranteed correctly rounded, so it is
widened by two ulps. When doubles are not precise enough, the same
expressions can be evaluated with mpmath interval arithmetic at a higher
working precision (see :func:`context`) and rounded back outward to floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Union

import mpmath
from mpmath.libmp import to_float

_INF = math.inf
_nextafter = math.nextafter

FLOAT_PREC = 53

Number = Union[int, float, Fraction, "Enclosure"]


class DomainError(ValueError):
    """An expression was evaluated outside its domain."""


def _dn(x: float) -> float:
    return _nextafter(x, -_INF)


def _up(x: float) -> float:
    return _nextafter(x, _INF)


def _fraction_bounds(q: Fraction) -> tuple[float, float]:
    x = float(q)  # correctly rounded
    fx = Fraction(x)
    if fx == q:
        return x, x
    if fx < q:
        return x, _up(x)
    return _dn(x), x


@dataclass(frozen=True, slots=True)
class Enclosure:
    """A closed interval ``[lo, hi]`` known to contain some real value."""

    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise DomainError("NaN endpoint")
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Enclosure":
        return cls(x, x)

    @classmethod
    def from_int(cls, n: int) -> "Enclosure":
        if -(1 << 53) <= n <= (1 << 53):
            x = float(n)
            return cls(x, x)
        return cls(*_fraction_bounds(Fraction(n)))

    @classmethod
    def from_fraction(cls, q: Fraction) -> "Enclosure":
        return cls(*_fraction_bounds(Fraction(q)))

    @classmethod
    def from_decimal(cls, text: str) -> "Enclosure":
        """Tightest float enclosure of an exact decimal literal like ``"0.55"``."""
        return cls(*_fraction_bounds(Fraction(Decimal(text))))

    @classmethod
    def coerce(cls, x: Number) -> "Enclosure":
        if isinstance(x, Enclosure):
            return x
        if isinstance(x, int):
            return cls.from_int(x)
        if isinstance(x, float):
            return cls.point(x)
        if isinstance(x, Fraction):
            return cls.from_fraction(x)
        raise TypeError(f"cannot enclose {type(x).__name__}")

    @property
    def width(self) -> float:
        return _up(self.hi - self.lo)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, x) -> bool:
        if isinstance(x, float):
            return self.lo <= x <= self.hi
        q = Fraction(x)
        return Fraction(self.lo) <= q <= Fraction(self.hi)

    def __add__(self, other: Number) -> "Enclosure":
        o = Enclosure.coerce(other)
        return Enclosure(_dn(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other: Number) -> "Enclosure":
        o = Enclosure.coerce(other)
        return Enclosure(_dn(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other: Number) -> "Enclosure":
        return Enclosure.coerce(other) - self

    def __mul__(self, other: Number) -> "Enclosure":
        o = Enclosure.coerce(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Enclosure(_dn(min(products)), _up(max(products)))

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "Enclosure":
        o = Enclosure.coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise DomainError("division by an enclosure containing zero")
        quotients = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Enclosure(_dn(min(quotients)), _up(max(quotients)))

    def __rtruediv__(self, other: Number) -> "Enclosure":
        return Enclosure.coerce(other) / self

    def sqr(self) -> "Enclosure":
        if self.lo >= 0.0:
            return Enclosure(_dn(self.lo * self.lo), _up(self.hi * self.hi))
        if self.hi <= 0.0:
            return Enclosure(_dn(self.hi * self.hi), _up(self.lo * self.lo))
        return Enclosure(0.0, _up(max(self.lo * self.lo, self.hi * self.hi)))

    def sqrt(self) -> "Enclosure":
        if self.lo < 0.0:
            raise DomainError("sqrt of a possibly negative value")
        lo = max(0.0, _dn(math.sqrt(self.lo)))
        return Enclosure(lo, _up(math.sqrt(self.hi)))

    def log(self) -> "Enclosure":
        if self.lo <= 0.0:
            raise DomainError("log of a possibly non-positive value")
        return Enclosure(_dn(_dn(math.log(self.lo))), _up(_up(math.log(self.hi))))

    def is_positive(self) -> bool:
        return self.lo > 0.0

    def is_negative(self) -> bool:
        return self.hi < 0.0

    def straddles_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


class FloatContext:
    """Evaluation context backed by :class:`Enclosure`."""

    prec = FLOAT_PREC

    @staticmethod
    def num(n: int) -> Enclosure:
        return Enclosure.from_int(n)

    @staticmethod
    def const(text: str) -> Enclosure:
        return Enclosure.from_decimal(text)

    @staticmethod
    def log(x: Enclosure) -> Enclosure:
        return x.log()

    @staticmethod
    def sqrt(x: Enclosure) -> Enclosure:
        return x.sqrt()

    @staticmethod
    def sqr(x: Enclosure) -> Enclosure:
        return x.sqr()

    @staticmethod
    def result(x: Enclosure) -> Enclosure:
        return x


class IntervalContext:
    """Evaluation context backed by mpmath intervals at ``prec`` bits.

    Each instance owns a private mpmath interval context, so concurrent
    evaluations do not share precision state.
    """

    def __init__(self, prec: int):
        self.prec = prec
        self._iv = type(mpmath.iv)()
        self._iv.prec = prec

    def num(self, n: int):
        return self._iv.mpf(n)

    def const(self, text: str):
        # Decimal strings are not exact in binary; mpmath rounds both ends out.
        return self._iv.mpf(text)

    def log(self, x):
        if not x.a > 0:
            raise DomainError("log of a possibly non-positive value")
        return self._iv.log(x)

    def sqrt(self, x):
        if x.a < 0:
            raise DomainError("sqrt of a possibly negative value")
        return self._iv.sqrt(x)

    @staticmethod
    def sqr(x):
        return x**2

    @staticmethod
    def result(x) -> Enclosure:
        lo_mpf, hi_mpf = x._mpi_
        return Enclosure(to_float(lo_mpf, rnd="f"), to_float(hi_mpf, rnd="c"))


def context(prec: int = FLOAT_PREC):
    """Arithmetic context for ``prec`` bits: doubles at 53, mpmath above."""
    if prec <= FLOAT_PREC:
        return FloatContext()
    return IntervalContext(prec)
