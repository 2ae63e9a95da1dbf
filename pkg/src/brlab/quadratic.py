"""Exact arithmetic in the real quadratic field Q(sqrt(c)).

A :class:`QuadraticNumber` stores ``(a + b*sqrt(c)) / d`` with Python integers,
so sums, products, comparisons and floors are exact.  It mixes freely with
``int`` and :class:`fractions.Fraction`; mixing with ``float`` degrades to
``float``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import mpmath

__all__ = ["QuadraticNumber", "frac", "floor", "is_exact"]


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


_VALID_RADICANDS: set[int] = set()


def _floor_sqrt_mul(b: int, c: int) -> int:
    """floor(b * sqrt(c)) for non-square c."""
    if b >= 0:
        return math.isqrt(b * b * c)
    return -math.isqrt(b * b * c - 1) - 1


def _sign(a: int, b: int, c: int) -> int:
    """Sign of a + b*sqrt(c)."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a >= 0 and b > 0:
        return 1
    if a <= 0 and b < 0:
        return -1
    lhs, rhs = a * a, b * b * c
    if a > 0:  # b < 0
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1  # a < 0 < b


class QuadraticNumber:
    __slots__ = ("a", "b", "d", "c")

    def __init__(self, a: int, b: int = 0, c: int = 1, d: int = 1):
        if d == 0:
            raise ZeroDivisionError("denominator is zero")
        if b != 0 and c not in _VALID_RADICANDS:
            if c < 2 or _is_square(c):
                raise ValueError(f"radicand {c} must be a positive non-square")
            _VALID_RADICANDS.add(c)
        self._set(a, b, c, d)

    def _set(self, a, b, c, d):
        if d < 0:
            a, b, d = -a, -b, -d
        g = math.gcd(a, b, d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        self.a = a
        self.b = b
        self.d = d
        self.c = c if b != 0 else (c if c >= 2 else 1)

    @classmethod
    def _new(cls, a, b, c, d):
        # radicand already validated
        if d == 0:
            raise ZeroDivisionError("denominator is zero")
        obj = object.__new__(cls)
        obj._set(a, b, c, d)
        return obj

    @classmethod
    def sqrt(cls, c: int) -> "QuadraticNumber":
        return cls(0, 1, c)

    @classmethod
    def from_rational(cls, r, c: int = 1) -> "QuadraticNumber":
        r = Fraction(r)
        return cls(r.numerator, 0, c, r.denominator)

    # -- coercion -----------------------------------------------------------
    def _coerce(self, other):
        t = type(other)
        if t is int:
            return QuadraticNumber._new(other, 0, self.c, 1)
        if t is Fraction:
            return QuadraticNumber._new(other.numerator, 0, self.c, other.denominator)
        if t is QuadraticNumber:
            if other.b and self.b and other.c != self.c:
                raise ValueError(f"cannot mix Q(sqrt({self.c})) and Q(sqrt({other.c}))")
            return other
        if isinstance(other, QuadraticNumber):
            if other.b and self.b and other.c != self.c:
                raise ValueError(f"cannot mix Q(sqrt({self.c})) and Q(sqrt({other.c}))")
            return other
        if isinstance(other, (int, Rational)):
            other = Fraction(other)
            return QuadraticNumber._new(other.numerator, 0, self.c, other.denominator)
        return None

    def _radicand(self, other: "QuadraticNumber") -> int:
        if self.b:
            return self.c
        if other.b:
            return other.c
        return max(self.c, other.c)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def rational(self) -> Fraction:
        if self.b:
            raise ValueError("number is irrational")
        return Fraction(self.a, self.d)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) + other
        return QuadraticNumber._new(self.a * o.d + o.a * self.d, self.b * o.d + o.b * self.d,
                               self._radicand(o), self.d * o.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber._new(-self.a, -self.b, self.c, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) - other
        return QuadraticNumber._new(self.a * o.d - o.a * self.d, self.b * o.d - o.b * self.d,
                               self._radicand(o), self.d * o.d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) * other
        c = self._radicand(o)
        return QuadraticNumber._new(self.a * o.a + self.b * o.b * c, self.a * o.b + self.b * o.a,
                               c, self.d * o.d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber._new(self.a, -self.b, self.c, self.d)

    def _inverse(self) -> "QuadraticNumber":
        # d / (a + b sqrt c) = d (a - b sqrt c) / (a^2 - b^2 c)
        norm = self.a * self.a - self.b * self.b * self.c
        if norm == 0:
            raise ZeroDivisionError("division by zero")
        return QuadraticNumber._new(self.d * self.a, -self.d * self.b, self.c, norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) / other
        if o.b == 0:
            if o.a == 0:
                raise ZeroDivisionError("division by zero")
            return QuadraticNumber._new(self.a * o.d, self.b * o.d, self.c, self.d * o.a)
        return self * o._inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / float(self)
        return o * self._inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return float(self) ** n
        if n < 0:
            return self._inverse() ** (-n)
        result = QuadraticNumber._new(1, 0, self.c, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- order --------------------------------------------------------------
    def sign(self) -> int:
        return _sign(self.a, self.b, self.c)

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            x = float(self)
            return (x > other) - (x < other)
        return _sign(self.a * o.d - o.a * self.d, self.b * o.d - o.b * self.d, self._radicand(o))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) == other
        return self.a == o.a and self.b == o.b and self.d == o.d

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.d))
        return hash((self.a, self.b, self.c, self.d))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __floor__(self) -> int:
        if self.b == 0:
            return self.a // self.d
        return (self.a + _floor_sqrt_mul(self.b, self.c)) // self.d

    def __ceil__(self) -> int:
        return -math.floor(-self)

    def __mod__(self, m):
        if m != 1:
            return self - m * math.floor(self / m)
        return self - math.floor(self)

    # -- conversion ---------------------------------------------------------
    def to_mpf(self, prec: int = 113):
        """Correctly scaled mpmath value; guards against cancellation in a + b sqrt c."""
        extra = max(self.a.bit_length(), self.b.bit_length(), self.d.bit_length()) + 32
        with mpmath.workprec(prec + extra):
            v = (mpmath.mpf(self.a) + mpmath.mpf(self.b) * mpmath.sqrt(self.c)) / self.d
        with mpmath.workprec(prec):
            return +v

    def __float__(self) -> float:
        if self.b == 0:
            return self.a / self.d
        return float(self.to_mpf(64))

    def fixed_point(self, bits: int = 64) -> int:
        """floor(self * 2**bits), exact."""
        return math.floor(self * (1 << bits))

    def __repr__(self):
        return f"QuadraticNumber({self.a}, {self.b}, {self.c}, {self.d})"

    def __str__(self):
        if self.b == 0:
            return str(Fraction(self.a, self.d))
        num = f"{self.a}{self.b:+}*sqrt({self.c})"
        return num if self.d == 1 else f"({num})/{self.d}"


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadraticNumber))


def floor(x) -> int:
    return math.floor(x)


def frac(x):
    """Fractional part {x} in [0, 1), exact for exact inputs."""
    if isinstance(x, (int, Fraction, QuadraticNumber)):
        return x - math.floor(x)
    if isinstance(x, mpmath.mpf):
        return x - mpmath.floor(x)
    return x - math.floor(x)
