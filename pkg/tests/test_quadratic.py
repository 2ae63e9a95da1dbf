import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from brlab.quadratic import QuadraticNumber, floor, frac, is_exact

radicands = st.sampled_from([2, 3, 5, 7])
small = st.integers(-50, 50)
dens = st.integers(1, 20)


def to_sympy(x: QuadraticNumber):
    return (sympy.Integer(x.a) + sympy.Integer(x.b) * sympy.sqrt(x.c)) / x.d


def _zero(e) -> bool:
    return sympy.expand(sympy.radsimp(e)) == 0


def quad(a, b, c, d):
    return QuadraticNumber(a, b, c, d)


@given(small, small, small, small, dens, dens, radicands)
def test_field_operations_match_sympy(a1, b1, a2, b2, d1, d2, c):
    x, y = quad(a1, b1, c, d1), quad(a2, b2, c, d2)
    sx, sy = to_sympy(x), to_sympy(y)
    assert _zero(to_sympy(x + y) - (sx + sy))
    assert _zero(to_sympy(x - y) - (sx - sy))
    assert _zero(to_sympy(x * y) - sx * sy)
    if y != 0:
        assert _zero(to_sympy(x / y) - sx / sy)


@given(small, small, dens, radicands)
def test_floor_and_ordering_match_sympy(a, b, d, c):
    x = quad(a, b, c, d)
    assert math.floor(x) == sympy.floor(to_sympy(x))
    assert (x > 0) == bool(to_sympy(x) > 0)
    assert 0 <= frac(x) < 1


def test_golden_ratio_identities():
    phi = QuadraticNumber(1, 1, 5, 2)
    assert phi * phi == phi + 1
    g = phi - 1
    assert 1 / g == phi
    assert floor(phi) == 1
    assert abs(float(g) - (math.sqrt(5) - 1) / 2) < 1e-15


def test_rational_mixing_and_exactness():
    r = QuadraticNumber.sqrt(2)
    assert r * r == 2
    assert r + Fraction(1, 2) - Fraction(1, 2) == r
    assert is_exact(r) and is_exact(Fraction(1, 3)) and not is_exact(0.5)
    assert QuadraticNumber(3, 0, 2, 6).is_rational


def test_non_square_radicand_required():
    with pytest.raises(ValueError):
        QuadraticNumber(1, 1, 4, 1)


def test_high_precision_value():
    x = QuadraticNumber(-1, 1, 2, 1)
    v = x.to_mpf(200)
    import mpmath
    with mpmath.workprec(200):
        assert abs(v - (mpmath.sqrt(2) - 1)) < mpmath.mpf(2) ** -195
