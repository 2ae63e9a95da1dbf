import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from brlab.brf import (DomeFunction, HatFunction, PeriodizedFunction, birkhoff_remainder, birkhoff_sum,
                       cohomology_residual, decompose_sum, dome_decompose, evaluate, grid_sum_brute,
                       grid_sum_closed_form, koksma_profile, remainder_trace, special_triangle_transfer,
                       star_discrepancy, truncated_derivative_variation)
from brlab.contfrac import from_quotients, golden, sqrt2m1, theta
from brlab.errors import DecompositionError, InvalidInputError, UnsupportedModeError
from brlab.geometry import Disc, negdisc, special_triangle, tau_profile
from brlab.quadratic import QuadraticNumber

GOLDEN = golden(40)
SQRT2 = sqrt2m1(40)
A = math.sqrt(2) - 1


@st.composite
def hats(draw, max_b=Fraction(1)):
    den = draw(st.integers(2, 60))
    b_num = draw(st.integers(2, int(max_b * den)))
    a_num = draw(st.integers(1, b_num - 1))
    H = Fraction(draw(st.integers(1, 20)), draw(st.integers(1, 5)))
    return HatFunction(Fraction(a_num, den), Fraction(b_num, den), H)


def hat_tau(h, shift=0):
    return PeriodizedFunction.single(h, shift)


# -- evaluation ---------------------------------------------------------------

def test_hat_evaluation():
    tau = hat_tau(HatFunction(Fraction(1, 4), Fraction(1, 2), 1))
    assert evaluate(tau, Fraction(1, 4)) == 1
    assert evaluate(tau, Fraction(5, 4)) == 1
    assert evaluate(tau, Fraction(1, 2)) == 0
    assert evaluate(tau, Fraction(1, 8)) == Fraction(1, 2)


def test_dome_evaluation():
    a = 1 / 3
    tau = tau_profile(negdisc(a), a).to_periodized()
    assert abs(evaluate(tau, a / 2) - 0.3) < 1e-14


def test_invalid_hat():
    with pytest.raises(InvalidInputError):
        HatFunction(Fraction(1, 2), Fraction(1, 4), 1)


@given(hats(max_b=Fraction(3)), st.fractions(0, 1), st.integers(-3, 3))
def test_periodized_hat_is_periodic(h, x, m):
    tau = hat_tau(h)
    assert tau(x) == tau(x + m)
    assert tau.integral() == h.H * h.b / 2


# -- Birkhoff sums ------------------------------------------------------------

def test_constant_remainder_is_zero():
    tau = PeriodizedFunction.const(Fraction(2, 7))
    for N in (1, 7, 100):
        assert birkhoff_remainder(tau, GOLDEN, 0, N) == 0


def test_single_term_remainder():
    tau = hat_tau(HatFunction(Fraction(1, 4), Fraction(1, 2), 1))
    # tau(0) = 0 and the integral is Hb/2 = 1/4
    assert birkhoff_remainder(tau, GOLDEN, 0, 1) == Fraction(-1, 4)


def test_symbolic_alpha_rejected():
    tau = hat_tau(HatFunction(Fraction(1, 4), Fraction(1, 2), 1))
    with pytest.raises(UnsupportedModeError):
        birkhoff_sum(tau, from_quotients([1, 2, 3]), 0, 5)


def test_special_triangle_telescopes_exactly():
    alpha = SQRT2.value
    tau = tau_profile(special_triangle(), alpha).to_periodized()
    g = special_triangle_transfer(alpha)
    x0 = Fraction(1, 7)
    for N in (1, 2, 13, 200):
        assert birkhoff_remainder(tau, alpha, x0, N) == g(x0) - g(x0 + N * alpha)


def test_special_triangle_remainder_bound():
    tau = tau_profile(special_triangle(), A).to_periodized()
    bound = 1 / (4 * A * (1 + A))
    rng = np.random.default_rng(1)
    assert abs(birkhoff_remainder(tau, A, 0.0, 10 ** 4, mode="float")) <= bound
    for x0 in rng.uniform(0, 1, size=100):
        assert np.max(np.abs(remainder_trace(tau, A, float(x0), 10 ** 5))) <= bound + 1e-9
    for x0 in rng.uniform(0, 1, size=3):
        assert np.max(np.abs(remainder_trace(tau, A, float(x0), 10 ** 6))) <= bound + 1e-9


def test_modes_agree():
    tau = hat_tau(HatFunction(Fraction(1, 5), Fraction(3, 5), 2), Fraction(1, 9))
    exact = birkhoff_sum(tau, GOLDEN, Fraction(1, 3), 2000)
    dec = birkhoff_sum(tau, GOLDEN, Fraction(1, 3), 2000, mode="decimal")
    flt = birkhoff_sum(tau, GOLDEN, Fraction(1, 3), 2000, mode="float")
    assert abs(exact.to_mpf(200) - dec) < mpmath.mpf(10) ** -25
    assert abs(float(exact) - flt) < 1e-10


# -- decomposition ------------------------------------------------------------

def test_decomposition_golden_ten():
    tau = hat_tau(HatFunction(Fraction(1, 4), Fraction(1, 2), 1))
    value, terms = decompose_sum(tau, GOLDEN, 10)
    assert value == birkhoff_sum(tau, GOLDEN, 0, 10)
    assert value == QuadraticNumber(20, -8, 5, 1)
    assert all(-1 < t.rho < 2 for t in terms)


def test_single_block_shape():
    tau = hat_tau(HatFunction(Fraction(1, 4), Fraction(1, 2), 1))
    q = SQRT2.q[6]
    value, terms = decompose_sum(tau, SQRT2, q)
    assert {(t.l, t.b) for t in terms} == {(6, 0)}
    assert len(terms) == q
    assert value == birkhoff_sum(tau, SQRT2, 0, q)


@given(hats(), st.sampled_from([GOLDEN, SQRT2]), st.integers(1, 300), st.fractions(0, 1))
def test_decomposition_identity(h, cf, N, shift):
    tau = hat_tau(h, shift)
    value, terms = decompose_sum(tau, cf, N)
    assert value == birkhoff_sum(tau, cf, 0, N)
    for t in terms:
        assert -1 < t.rho < 2
        assert 0 <= t.omega < 1
        assert t.rho == t.omega * t.theta_l / cf.a(t.l + 1) + t.x_l
        assert Fraction(1, 3) <= abs(t.theta_l) <= 1
        assert 0 <= t.m_l < cf.q_at(t.l)


def test_decomposition_decimal_mode():
    tau = hat_tau(HatFunction(Fraction(1, 3), Fraction(4, 5), 1))
    N = 5000
    value, _ = decompose_sum(tau, SQRT2, N, mode="decimal")
    direct = birkhoff_sum(tau, SQRT2, 0, N)
    assert abs(value - direct.to_mpf(128)) <= 1e-9 * N


def test_theta_values():
    for cf in (GOLDEN, SQRT2):
        for l in range(15):
            assert Fraction(1, 3) <= abs(theta(cf, l)) <= 1


# -- grid sums ----------------------------------------------------------------

def test_grid_sum_examples():
    h = HatFunction(Fraction(1, 4), Fraction(1, 2), 1)
    assert grid_sum_closed_form(h, 4) == 1 == grid_sum_brute(h, 4)
    h = HatFunction(Fraction(1, 3), Fraction(2, 3), 1)
    assert grid_sum_closed_form(h, 6) == 2 == grid_sum_brute(h, 6)


@given(hats())
def test_grid_sum_closed_form_exact(h):
    for q in (7, 31, 250, 1001):
        assert grid_sum_closed_form(h, q) == grid_sum_brute(h, q)


def test_grid_sum_deviation_shrinks_like_one_over_q():
    h = HatFunction(Fraction(2, 7), Fraction(5, 7), 3)
    devs = [abs(grid_sum_closed_form(h, q) - h.H * h.b * q / 2) * q for q in range(10, 3000, 37)]
    assert max(devs) <= float(h.H) / (2 * float(h.a * (h.b - h.a))) * float(max(h.a, h.b)) / 4


# -- discrepancy --------------------------------------------------------------

def test_discrepancy_examples():
    N = 17
    assert star_discrepancy([Fraction(k, N) for k in range(N)]).star == Fraction(1, N)
    assert star_discrepancy([0]).star == 1
    cf = golden(10)
    pts = [Fraction((k * cf.q[4]) % 8, 8) for k in range(8)]
    stats = star_discrepancy(pts)
    assert 8 * stats.star <= 1 + 2 * sum(cf.quotients[:5]) == 11
    with pytest.raises(InvalidInputError):
        star_discrepancy([Fraction(1)])


def _brute_star(xs):
    """sup over anchored boxes [0, t) via all candidate t."""
    N = len(xs)
    best = Fraction(0)
    for t in set(xs) | {Fraction(1)}:
        open_count = sum(1 for x in xs if x < t)
        closed_count = sum(1 for x in xs if x <= t)
        best = max(best, abs(Fraction(open_count, N) - t), abs(Fraction(closed_count, N) - t))
    return best


@given(st.lists(st.fractions(0, 1).filter(lambda f: f < 1), min_size=1, max_size=40))
def test_discrepancy_against_brute_force(xs):
    stats = star_discrepancy(xs)
    N = len(xs)
    assert stats.star == _brute_star(xs)
    assert Fraction(1, 2 * N) <= stats.star <= 1
    assert stats.star <= stats.extreme <= 2 * stats.star


@pytest.mark.parametrize("cf", [GOLDEN, SQRT2, from_quotients([3, 1, 4, 1, 5, 9, 2, 6])])
def test_koksma_small_levels(cf):
    for l in range(1, 7):
        worst, bound = koksma_profile(cf, l)
        assert worst <= bound


# -- domes --------------------------------------------------------------------

def test_variation_bound_for_negdisc_dome():
    dome = tau_profile(negdisc(0.5), 0.5).to_dome()
    v = truncated_derivative_variation(dome, 100)
    assert v <= 4 * dome.c * 10
    assert abs(v - 4 * dome.derivative(1 / 100)) < 1e-9
    v2 = truncated_derivative_variation(dome, 200)
    # finite-q corrections push the ratio slightly past sqrt(2)
    assert v2 <= v * 2 ** 0.5 * 1.05


def test_variation_thresholds():
    dome = tau_profile(negdisc(0.5), 0.5).to_dome()
    with pytest.raises(InvalidInputError):
        truncated_derivative_variation(dome, 3)


def test_dome_decompose_reconstructs():
    alpha = 0.9
    prof = tau_profile(Disc((0.5, 0.5), 0.45), alpha)
    dome = prof.to_dome()
    assert 1 < dome.B <= 2
    hat, d1, d2 = dome_decompose(dome)
    assert (hat.a, hat.b) == (1, dome.B)
    xs = np.linspace(0, float(dome.B), 2001)
    rebuilt = hat.values(xs) + d1.values(xs) + d2.values(xs - 1)
    assert np.max(np.abs(rebuilt - dome.values(xs))) <= 1e-12
    assert d1.B == 1 and abs(d2.B - (dome.B - 1)) < 1e-15


def test_dome_decompose_needs_long_support():
    dome = tau_profile(negdisc(0.4), 0.4).to_dome()
    with pytest.raises(InvalidInputError):
        dome_decompose(dome)


def test_convex_input_is_not_a_dome():
    bad = DomeFunction(1.0, lambda x: x * x, 0.5, 2, 10.0)
    with pytest.raises(DecompositionError):
        bad.check()


# -- cohomology ---------------------------------------------------------------

def test_special_triangle_residual():
    tau = tau_profile(special_triangle(), A).to_periodized()
    g = special_triangle_transfer(A)
    assert cohomology_residual(tau, A, g, 10 ** 4) <= 1e-12
    assert cohomology_residual(tau, A, lambda x: np.asarray(x) ** 2, 10 ** 4) > 0.1


def test_constant_residual_is_zero():
    tau = PeriodizedFunction.const(0.3)
    assert cohomology_residual(tau, A, lambda x: np.zeros_like(np.asarray(x, dtype=float)), 100) == 0


def test_transfer_function():
    g = special_triangle_transfer(Fraction(1, 2))
    assert g(Fraction(1, 2)) == Fraction(-1, 6)
    assert g(0) == 0 and g(Fraction(1)) == 0
    for x in (Fraction(1, 7), Fraction(2, 5)):
        assert g(x) == g(1 - x)
    with pytest.raises(InvalidInputError):
        special_triangle_transfer(Fraction(3, 2))


def test_transfer_maximum():
    a = A
    g = special_triangle_transfer(a)
    xs = np.linspace(0, 1, 10001)
    assert abs(np.max(np.abs(g(xs))) - 1 / (8 * a * (1 + a))) < 1e-15
