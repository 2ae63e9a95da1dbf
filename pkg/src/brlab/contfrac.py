"""Continued fractions of numbers in (0, 1), convergents and Ostrowski numeration.

All convergent tables are Python integers.  The value of alpha, when present,
is either an exact :class:`~brlab.quadratic.QuadraticNumber` ("quadratic"
mode) or an mpmath float ("decimal" mode).  A bare quotient list has
"symbolic" mode and refuses value-dependent operations.
"""
from __future__ import annotations

import math
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import InvalidInputError, PrecisionError, ResourceError, UnsupportedModeError
from .quadratic import QuadraticNumber

QUADRATIC = "quadratic"
DECIMAL = "decimal"
SYMBOLIC = "symbolic"

DEFAULT_PRECISION_BITS = 128


def precision_bits() -> int:
    """Decimal-mode precision; ``BRLAB_PRECISION_BITS`` overrides, floor of 113 bits."""
    raw = os.environ.get("BRLAB_PRECISION_BITS")
    if raw is None:
        return DEFAULT_PRECISION_BITS
    try:
        bits = int(raw)
    except ValueError:
        raise InvalidInputError(f"BRLAB_PRECISION_BITS={raw!r} is not an integer") from None
    return max(bits, 113)


@dataclass(frozen=True)
class ContinuedFraction:
    """alpha = [0; a_1, ..., a_D] with convergents p_0..p_D, q_0..q_D."""

    quotients: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]
    value: object = None
    value_mode: str = SYMBOLIC

    @property
    def depth(self) -> int:
        return len(self.quotients)

    def a(self, i: int) -> int:
        """Partial quotient a_i, 1-based as in the usual notation."""
        if not 1 <= i <= self.depth:
            raise InvalidInputError(f"a_{i} not available (depth {self.depth})")
        return self.quotients[i - 1]

    def q_at(self, n: int) -> int:
        """q_n with the convention q_{-1} = 0."""
        return 0 if n == -1 else self.q[n]

    def p_at(self, n: int) -> int:
        return 1 if n == -1 else self.p[n]

    def require_value(self):
        if self.value is None:
            raise UnsupportedModeError("continued fraction carries no value (symbolic mode)")
        return self.value

    def to_dict(self) -> dict:
        return {
            "quotients": list(self.quotients),
            "p": list(self.p),
            "q": list(self.q),
            "value_mode": self.value_mode,
        }


@dataclass(frozen=True)
class OstrowskiExpansion:
    digits: tuple[int, ...]
    base: ContinuedFraction = field(repr=False)

    def to_dict(self) -> dict:
        return {"digits": list(self.digits)}


def _convergents(quotients: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    p = [0, 1]
    q = [1, quotients[0]]
    for a in quotients[1:]:
        p.append(a * p[-1] + p[-2])
        q.append(a * q[-1] + q[-2])
    return tuple(p), tuple(q)


def _mode_of(value) -> str:
    if value is None:
        return SYMBOLIC
    if isinstance(value, QuadraticNumber):
        return QUADRATIC
    return DECIMAL


def from_quotients(quotients: Sequence[int], value=None) -> ContinuedFraction:
    quotients = tuple(int(a) for a in quotients)
    if not quotients:
        raise InvalidInputError("quotient list is empty")
    bad = [a for a in quotients if a < 1]
    if bad:
        raise InvalidInputError(f"partial quotients must be >= 1, got {bad[0]}")
    if isinstance(value, (float, str)):
        value = mpmath.mpf(value)
    p, q = _convergents(quotients)
    return ContinuedFraction(quotients, p, q, value, _mode_of(value))


def _expand_exact(x: QuadraticNumber, depth: int) -> list[int]:
    out = []
    for _ in range(depth):
        if x == 0:
            raise InvalidInputError("value is rational; expansion terminated")
        y = 1 / x
        a = math.floor(y)
        out.append(a)
        x = y - a
    return out


@contextmanager
def _iv_prec(prec: int):
    saved = mpmath.iv.prec
    mpmath.iv.prec = prec
    try:
        yield
    finally:
        mpmath.iv.prec = saved


def _expand_interval(x, depth: int, prec: int) -> list[int]:
    # Gauss map on an enclosure of x; stops trusting once the enclosure straddles an integer.
    out = []
    with _iv_prec(prec):
        xi = x
        for n in range(depth):
            if xi.a <= 0:
                raise PrecisionError(
                    f"enclosure reached zero at index {n + 1}", last_trusted_index=n)
            y = 1 / xi
            lo, hi = int(mpmath.floor(y.a)), int(mpmath.floor(y.b))
            if lo != hi:
                raise PrecisionError(
                    f"precision exhausted at partial quotient {n + 1}; "
                    f"a_{n} is the last trusted index", last_trusted_index=n)
            out.append(lo)
            xi = y - lo
    return out


def expand_value(x, depth: int, prec: int | None = None) -> ContinuedFraction:
    """Continued fraction of x in (0, 1) by the Gauss map x -> {1/x}.

    Quadratic irrationals expand exactly.  Decimal inputs (mpf, str) are
    carried as intervals so every returned quotient is certified.
    """
    if depth < 1:
        raise InvalidInputError("depth must be >= 1")
    prec = prec or precision_bits()
    if isinstance(x, QuadraticNumber):
        if not 0 < x < 1:
            raise InvalidInputError("x must lie in (0, 1)")
        return from_quotients(_expand_exact(x, depth), x)
    if isinstance(x, Fraction):
        raise InvalidInputError("x is rational")
    with mpmath.workprec(prec):
        if isinstance(x, str):
            value = mpmath.mpf(x)
            # a decimal string is only known to its last printed digit
            ulp = mpmath.mpf(10) ** (-(len(x.split(".")[-1]) if "." in x else 0))
            with _iv_prec(prec):
                enclosure = mpmath.iv.mpf([value - ulp / 2, value + ulp / 2])
        else:
            value = mpmath.mpf(x)
            with _iv_prec(prec):
                half_ulp = mpmath.ldexp(abs(value), -prec)
                enclosure = mpmath.iv.mpf([value - half_ulp, value + half_ulp])
        if not 0 < value < 1:
            raise InvalidInputError("x must lie in (0, 1)")
    quotients = _expand_interval(enclosure, depth, prec)
    return from_quotients(quotients, value)


def approx_error_bounds(cf: ContinuedFraction, n: int) -> tuple[Fraction, Fraction]:
    """Bounds 1/((a_{n+1}+2) q_n^2) <= |alpha - p_n/q_n| <= 1/(a_{n+1} q_n^2)."""
    if not 0 <= n < cf.depth:
        raise InvalidInputError(f"index {n} needs a_{n + 1}; depth is {cf.depth}")
    a_next = cf.quotients[n]
    qn2 = cf.q[n] ** 2
    lower = Fraction(1, (a_next + 2) * qn2)
    upper = Fraction(1, a_next * qn2)
    if cf.value is not None:
        if isinstance(cf.value, QuadraticNumber):
            err = abs(cf.value - Fraction(cf.p[n], cf.q[n]))
            ok = lower <= err <= upper
        else:
            err = abs(cf.value - mpmath.mpf(cf.p[n]) / cf.q[n])
            ok = mpmath.mpf(lower.numerator) / lower.denominator <= err <= (
                mpmath.mpf(upper.numerator) / upper.denominator)
        if not ok:
            raise PrecisionError(f"|alpha - p_{n}/q_{n}| = {err} outside [{lower}, {upper}]")
    return lower, upper


def theta(cf: ContinuedFraction, l: int):
    """theta_l defined by theta_l / (a_{l+1} q_l^2) = alpha - p_l/q_l."""
    alpha = cf.require_value()
    return (alpha * cf.q[l] - cf.p[l]) * (cf.quotients[l] * cf.q[l])


def theta_table(cf: ContinuedFraction, levels: int | None = None) -> list:
    levels = cf.depth if levels is None else levels
    return [theta(cf, l) for l in range(levels)]


def ostrowski_expand(N: int, cf: ContinuedFraction) -> OstrowskiExpansion:
    """Greedy (largest denominator first) Ostrowski digits b_0..b_s of N."""
    if N < 0:
        raise InvalidInputError("N must be non-negative")
    top = cf.depth
    if N >= cf.q[top]:
        raise InvalidInputError(
            f"N={N} needs q_D > N but q_{top}={cf.q[top]}; extend the expansion")
    digits = [0] * top
    rest = N
    for i in range(top - 1, -1, -1):
        if rest >= cf.q[i]:
            digits[i], rest = divmod(rest, cf.q[i])
    while digits and digits[-1] == 0:
        digits.pop()
    return OstrowskiExpansion(tuple(digits), cf)


def ostrowski_value(exp: OstrowskiExpansion) -> int:
    cf = exp.base
    digits = exp.digits
    if len(digits) > cf.depth:
        raise InvalidInputError(f"{len(digits)} digits exceed depth {cf.depth}")
    if digits and digits[-1] == 0:
        raise InvalidInputError("leading digit b_s must be positive")
    total = 0
    for i, b in enumerate(digits):
        if not 0 <= b <= cf.quotients[i]:
            raise InvalidInputError(f"digit b_{i}={b} outside [0, a_{i + 1}={cf.quotients[i]}]")
        total += b * cf.q[i]
        # greedy-canonical: every prefix stays below the next denominator
        if total >= cf.q[i + 1]:
            raise InvalidInputError(f"digits are not greedy-canonical at index {i}")
    return total


def cfsum_statistic(cf: ContinuedFraction, s: int, m: float, prec: int | None = None):
    """sum_{l=0}^{s} a_{l+1} / q_l^{1/m} * sum_{k=1}^{l+1} a_k, as an mpmath float."""
    if not 0 <= s < cf.depth:
        raise InvalidInputError(f"s={s} needs a_{s + 1}; depth is {cf.depth}")
    if m <= 0:
        raise InvalidInputError("m must be positive")
    with mpmath.workprec(prec or precision_bits()):
        inv_m = 1 / mpmath.mpf(m)
        total = mpmath.mpf(0)
        running = 0
        for l in range(s + 1):
            running += cf.quotients[l]
            total += cf.quotients[l] * running / mpmath.power(cf.q[l], inv_m)
        return +total


# -- named values -------------------------------------------------------------

def golden(depth: int = 40) -> ContinuedFraction:
    """(sqrt5 - 1)/2 = [0; 1, 1, 1, ...]."""
    return from_quotients([1] * depth, QuadraticNumber(-1, 1, 5, 2))


def sqrt2m1(depth: int = 40) -> ContinuedFraction:
    """sqrt2 - 1 = [0; 2, 2, 2, ...]."""
    return from_quotients([2] * depth, QuadraticNumber(-1, 1, 2))


def sqrt3m1(depth: int = 40) -> ContinuedFraction:
    """sqrt3 - 1 = [0; 1, 2, 1, 2, ...]."""
    return from_quotients([1 if i % 2 == 0 else 2 for i in range(depth)],
                          QuadraticNumber(-1, 1, 3))


PRESETS = {"golden": golden, "sqrt2m1": sqrt2m1, "sqrt3m1": sqrt3m1}


def golden_tail_value(quotients: Sequence[int]) -> QuadraticNumber:
    """Exact value of [0; a_1, ..., a_D, 1, 1, 1, ...].

    Gives finite quotient lists an irrational completion in Q(sqrt5) whose
    first D partial quotients are the given ones.
    """
    p, q = _convergents(quotients)
    phi = QuadraticNumber(1, 1, 5, 2)
    return (phi * p[-1] + p[-2]) / (phi * q[-1] + q[-2])


def complete_with_golden_tail(quotients: Sequence[int], extra: int = 0) -> ContinuedFraction:
    value = golden_tail_value(quotients)
    return from_quotients(list(quotients) + [1] * extra, value)


_MAX_LEVELS = {"triangle7a": 5, "disc7b": 2}


def counterexample_alpha(kind: str, levels: int) -> ContinuedFraction:
    """Quotients for the negative constructions, using minimal admissible values.

    Both start from a fixed a_1 and append ``levels`` constructed quotients.
    ``triangle7a``: a_1 = 1 and a_{l+1} = q_l^7.  ``disc7b``: a_1 = 2 (alpha in
    (1/3, 1/2)) and a_{l+1} > q_l^100, each the smallest such integer whose
    parity steers p_l to be even at odd indices l >= 3.
    """
    if kind not in _MAX_LEVELS:
        raise InvalidInputError(f"unknown counterexample kind {kind!r}")
    if levels < 1:
        raise InvalidInputError("levels must be >= 1")
    if levels > _MAX_LEVELS[kind]:
        raise ResourceError(
            f"{kind} with {levels} levels exceeds the budget of {_MAX_LEVELS[kind]}")
    if kind == "triangle7a":
        quotients = [1]
        q_prev, q_cur = 1, 1
        while len(quotients) < levels + 1:
            a = q_cur ** 7
            quotients.append(a)
            q_prev, q_cur = q_cur, a * q_cur + q_prev
        return from_quotients(quotients)

    quotients = [2]
    p_prev, p_cur = 0, 1
    q_prev, q_cur = 1, 2
    for _ in range(levels):
        index = len(quotients) + 1  # index of the convergent this quotient produces
        a = q_cur ** 100 + 1
        want_even = index % 2 == 1 and index >= 3
        for candidate in (a, a + 1):
            p_new = candidate * p_cur + p_prev
            if (p_new % 2 == 0) == want_even:
                a = candidate
                break
        quotients.append(a)
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    return from_quotients(quotients)
