import itertools
import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, strategies as st

from brlab.contfrac import (PRESETS, approx_error_bounds, cfsum_statistic, complete_with_golden_tail,
                            counterexample_alpha, expand_value, from_quotients, golden, ostrowski_expand,
                            ostrowski_value, sqrt2m1, theta_table, OstrowskiExpansion)
from brlab.errors import InvalidInputError, PrecisionError, ResourceError
from brlab.quadratic import QuadraticNumber

quotient_lists = st.lists(st.integers(1, 50), min_size=1, max_size=30)


# -- from_quotients -----------------------------------------------------------

def test_fibonacci_convergents():
    cf = from_quotients([1, 1, 1, 1, 1])
    assert list(cf.q) == [1, 1, 2, 3, 5, 8]
    assert list(cf.p) == [0, 1, 1, 2, 3, 5]


def test_base_case():
    cf = from_quotients([2])
    assert list(cf.q) == [1, 2] and list(cf.p) == [0, 1]


@pytest.mark.parametrize("bad", [[], [1, 0], [3, -2]])
def test_rejects_nonpositive_quotients(bad):
    with pytest.raises(InvalidInputError):
        from_quotients(bad)


@given(quotient_lists)
def test_determinant_identity(qs):
    cf = from_quotients(qs)
    for n in range(len(qs)):
        assert cf.p[n] * cf.q[n + 1] - cf.p[n + 1] * cf.q[n] == (-1) ** (n + 1)


@given(quotient_lists)
def test_convergents_match_fraction_oracle(qs):
    cf = from_quotients(qs)
    for n in range(1, len(qs) + 1):
        x = Fraction(0)
        for a in reversed(qs[:n]):
            x = 1 / (a + x)
        assert Fraction(cf.p[n], cf.q[n]) == x


def test_convergents_alternate_around_value():
    for make in PRESETS.values():
        cf = make(20)
        for n in range(1, 20):
            r = Fraction(cf.p[n], cf.q[n])
            assert (r < cf.value) if n % 2 == 0 else (r > cf.value)


# -- expand_value -------------------------------------------------------------

def test_golden_expands_to_ones():
    assert golden(10).quotients == (1,) * 10
    x = QuadraticNumber(-1, 1, 5, 2)
    assert expand_value(x, 10).quotients == (1,) * 10


def test_sqrt2_expands_to_twos():
    assert expand_value(QuadraticNumber(-1, 1, 2, 1), 8).quotients == (2,) * 8


def test_inverse_pi_against_sympy():
    oracle = list(itertools.islice(sympy.continued_fraction_iterator(1 / sympy.pi), 1, 6))
    with mpmath.workprec(256):
        cf = expand_value(1 / mpmath.pi, 5, prec=256)
    assert list(cf.quotients) == oracle == [3, 7, 15, 1, 292]


def test_decimal_string_runs_out_of_precision():
    with pytest.raises(PrecisionError) as info:
        expand_value("0.4142135623730950", 40)
    assert info.value.last_trusted_index is not None
    assert 10 <= info.value.last_trusted_index < 40


@given(st.lists(st.integers(1, 9), min_size=2, max_size=12))
def test_expand_round_trip_golden_tail(qs):
    cf = complete_with_golden_tail(qs)
    again = expand_value(cf.value, len(qs) + 5)
    assert list(again.quotients[:len(qs)]) == qs
    assert all(a == 1 for a in again.quotients[len(qs):])


def test_rational_input_rejected():
    with pytest.raises(InvalidInputError):
        expand_value(Fraction(1, 3), 3)


# -- error bounds and theta ---------------------------------------------------

def test_golden_error_bounds():
    lo, hi = approx_error_bounds(golden(10), 2)
    assert (lo, hi) == (Fraction(1, 12), Fraction(1, 4))
    err = abs((math.sqrt(5) - 1) / 2 - 0.5)
    assert lo <= err <= hi and abs(err - 0.1180) < 1e-4


def test_all_twos_error_bounds():
    assert approx_error_bounds(sqrt2m1(10), 1) == (Fraction(1, 16), Fraction(1, 8))


def test_large_quotient_bracketing():
    cf = complete_with_golden_tail([1, 2, 10 ** 6, 3])
    lo, hi = approx_error_bounds(cf, 2)
    assert hi < Fraction(1, 10 ** 6)
    err = abs(cf.value - Fraction(cf.p[2], cf.q[2]))
    assert lo <= err <= hi


def test_error_bounds_index_out_of_range():
    with pytest.raises(InvalidInputError):
        approx_error_bounds(from_quotients([1, 2]), 2)


@given(st.lists(st.integers(1, 30), min_size=2, max_size=15))
def test_theta_range(qs):
    cf = complete_with_golden_tail(qs, extra=2)
    for l, th in enumerate(theta_table(cf)):
        assert Fraction(1, 3) <= abs(th) <= 1
        assert th / (cf.quotients[l] * cf.q[l] ** 2) == cf.value - Fraction(cf.p[l], cf.q[l])


# -- Ostrowski ----------------------------------------------------------------

def test_golden_ten():
    exp = ostrowski_expand(10, golden(8))
    assert exp.digits == (0, 0, 1, 0, 0, 1)
    assert ostrowski_value(exp) == 10


def test_zero_expansion():
    exp = ostrowski_expand(0, golden(5))
    assert all(b == 0 for b in exp.digits)
    assert ostrowski_value(exp) == 0


def test_denominator_is_single_digit():
    cf = sqrt2m1(10)
    for j in range(1, 10):
        d = ostrowski_expand(cf.q[j], cf).digits
        assert d[j] == 1 and sum(d) == 1


def test_top_digit_linear():
    cf = from_quotients([3, 4, 5])
    exp = OstrowskiExpansion((0, 4), cf)
    assert ostrowski_value(exp) == 4 * cf.q[1]


def test_too_shallow():
    with pytest.raises(InvalidInputError):
        ostrowski_expand(100, golden(5))


def test_illegal_digits_rejected():
    cf = from_quotients([2, 3, 4])
    with pytest.raises(InvalidInputError):
        ostrowski_value(OstrowskiExpansion((5,), cf))
    with pytest.raises(InvalidInputError):
        ostrowski_value(OstrowskiExpansion((1, 0), cf))


def _classical_strings(qs):
    """All digit strings obeying the classical uniqueness rules, by brute force."""
    ranges = [range(0, a + 1) for a in qs]
    for digits in itertools.product(*ranges):
        if digits[0] >= qs[0]:
            continue
        if any(digits[i] == qs[i] and digits[i - 1] != 0 for i in range(1, len(qs))):
            continue
        yield digits


@pytest.mark.parametrize("qs", [[1, 1, 1, 1, 1, 1], [2, 3, 1, 2], [3, 1, 4, 1], [1, 5, 2]])
def test_greedy_matches_classical_numeration(qs):
    cf = from_quotients(qs)
    seen = {}
    for digits in _classical_strings(qs):
        N = sum(b * q for b, q in zip(digits, cf.q))
        assert N not in seen
        seen[N] = digits
    assert sorted(seen) == list(range(cf.q[-1]))
    for N, digits in seen.items():
        got = ostrowski_expand(N, cf).digits
        assert tuple(got) + (0,) * (len(qs) - len(got)) == digits


@given(st.lists(st.integers(1, 6), min_size=1, max_size=8), st.data())
def test_round_trip_and_digit_rules(qs, data):
    cf = from_quotients(qs)
    N = data.draw(st.integers(0, cf.q[-1] - 1))
    exp = ostrowski_expand(N, cf)
    assert ostrowski_value(exp) == N
    assert all(0 <= b <= a for b, a in zip(exp.digits, qs))
    if N >= 1:
        assert exp.digits[-1] > 0


# -- cfsum statistic ----------------------------------------------------------

def test_cfsum_golden():
    v = cfsum_statistic(golden(10), 3, 2)
    assert abs(float(v) - (3 + 3 / math.sqrt(2) + 4 / math.sqrt(3))) < 1e-12
    assert abs(float(v) - 7.431) < 1e-3


def test_cfsum_single_term():
    cf = from_quotients([7, 2])
    assert cfsum_statistic(cf, 0, 1) == 49


@given(st.lists(st.integers(1, 20), min_size=2, max_size=12), st.floats(1, 5))
def test_cfsum_brute_force_and_monotone(qs, m):
    cf = from_quotients(qs)
    prev = -1
    for s in range(len(qs)):
        with mpmath.workprec(128):
            brute = mpmath.fsum(mpmath.mpf(qs[l]) / mpmath.mpf(cf.q[l]) ** (1 / mpmath.mpf(m)) * sum(qs[:l + 1])
                                for l in range(s + 1))
            v = cfsum_statistic(cf, s, m)
            assert abs(v - brute) <= 1e-25 * brute
        assert v >= prev
        prev = v


# -- counterexample quotients -------------------------------------------------

def test_triangle7a_shapes():
    assert list(counterexample_alpha("triangle7a", 0 + 1).quotients[:2]) == [1, 1]
    cf = counterexample_alpha("triangle7a", 2)
    assert list(cf.quotients) == [1, 1, 128]
    assert list(cf.q) == [1, 1, 2, 257]
    cf3 = counterexample_alpha("triangle7a", 3)
    for l in range(1, cf3.depth):
        assert cf3.quotients[l] >= cf3.q[l] ** 7


def test_disc7b_construction():
    cf = counterexample_alpha("disc7b", 2)
    assert cf.quotients[0] == 2
    for l in range(1, cf.depth):
        assert cf.quotients[l] > cf.q[l] ** 100
    odd_even = [l for l in range(3, cf.depth + 1, 2) if cf.p[l] % 2 == 0]
    assert odd_even


def test_counterexample_budget():
    with pytest.raises(ResourceError):
        counterexample_alpha("disc7b", 3)
    with pytest.raises(InvalidInputError):
        counterexample_alpha("nope", 1)
