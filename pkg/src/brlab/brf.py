"""Bounded remainder functions: hats, domes, Birkhoff sums and their decomposition.

Sums run in one of three tiers.  ``"quadratic"`` keeps every quantity in
Q(sqrt(c)) and is exact; ``"decimal"`` uses mpmath at the configured
precision; ``"float"`` vectorizes with numpy and a 64-bit fixed-point orbit,
for long horizons.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .contfrac import (DECIMAL, QUADRATIC, ContinuedFraction, ostrowski_expand,
                       precision_bits, theta)
from .errors import (DecompositionError, InternalConsistencyError, InvalidInputError,
                     PrecisionError, UnsupportedModeError)
from .quadratic import QuadraticNumber, frac, is_exact

FLOAT = "float"

CONCAVITY_TOL = 1e-9


def _like(v, y):
    """Exact v as an mpf when y is an mpf (mpmath cannot compare mpf with Fraction)."""
    if isinstance(y, mpmath.mpf) and isinstance(v, (Fraction, QuadraticNumber)):
        return _to_mpf(v, mpmath.mp.prec)
    return v


# -- base functions ------------------------------------------------------------

@dataclass(frozen=True)
class HatFunction:
    """Tent on [0, b] rising linearly to H at a and falling back to 0 at b."""

    a: object
    b: object
    H: object

    def __post_init__(self):
        if not (0 < self.a < self.b and self.H > 0):
            raise InvalidInputError("hat needs 0 < a < b and H > 0")

    @property
    def support_end(self):
        return self.b

    @property
    def is_exact(self) -> bool:
        return is_exact(self.a) and is_exact(self.b) and is_exact(self.H)

    def __call__(self, y):
        a, b, H = _like(self.a, y), _like(self.b, y), _like(self.H, y)
        if y <= 0 or y >= b:
            return 0
        if y <= a:
            return H * y / a
        return H * (b - y) / (b - a)

    def values(self, ys) -> np.ndarray:
        ys = np.asarray(ys, dtype=float)
        a, b, H = float(self.a), float(self.b), float(self.H)
        up = H * ys / a
        down = H * (b - ys) / (b - a)
        return np.where((ys > 0) & (ys < b), np.minimum(up, down), 0.0)

    def integral(self):
        return self.H * self.b / 2


@dataclass
class DomeFunction:
    """Concave function on (0, B), vanishing at both ends, with growth certificate
    f(z), f(B - z) <= c z^(1/m) for 0 <= z < eps."""

    B: object
    f: Callable
    eps: float
    m: float
    c: float
    fprime: Callable | None = None
    f_array: Callable | None = None
    integral_value: object = None

    def __post_init__(self):
        if not self.B > 0:
            raise InvalidInputError("dome support must have positive length")

    @property
    def support_end(self):
        return self.B

    @property
    def is_exact(self) -> bool:
        return False

    def __call__(self, y):
        if y <= 0 or y >= self.B:
            return 0
        return self.f(y)

    def values(self, ys) -> np.ndarray:
        ys = np.asarray(ys, dtype=float)
        inside = (ys > 0) & (ys < float(self.B))
        out = np.zeros_like(ys)
        if self.f_array is not None:
            out[inside] = self.f_array(ys[inside])
        else:
            out[inside] = [float(self.f(y)) for y in ys[inside]]
        return out

    def derivative(self, y):
        if self.fprime is not None:
            return self.fprime(y)
        h = 2.0 ** (-precision_bits() // 3)
        with mpmath.workprec(precision_bits()):
            return (mpmath.mpf(self.f(y + h)) - mpmath.mpf(self.f(y - h))) / (2 * h)

    def integral(self):
        if self.integral_value is not None:
            return self.integral_value
        return mpmath.quad(lambda t: self.f(t), [0, self.B])

    def check(self, samples: int = 1000, grid: int = 10_000) -> None:
        """Sampled concavity and growth checks; raises DecompositionError on failure."""
        B = float(self.B)
        xs = np.linspace(0.0, B, samples + 2)[1:-1]
        vals = self.values(xs)
        if np.any(vals < -CONCAVITY_TOL):
            raise DecompositionError("dome takes negative values")
        second = vals[:-2] - 2 * vals[1:-1] + vals[2:]
        if np.any(second > CONCAVITY_TOL):
            raise DecompositionError("dome is not concave on the sample grid")
        z = self.eps * np.arange(1, grid + 1) / grid
        z = z[z < B]
        bound = self.c * z ** (1.0 / self.m) * (1 + 1e-9)
        if np.any(self.values(z) > bound) or np.any(self.values(B - z) > bound):
            raise DecompositionError("growth certificate fails on the grid")


@dataclass
class PeriodizedFunction:
    """tau(x) = constant + sum_i w_i sum_m T_i(x - shift_i + m)."""

    terms: list = field(default_factory=list)  # (weight, base, shift)
    constant: object = 0

    @classmethod
    def single(cls, base, shift=0) -> "PeriodizedFunction":
        return cls([(1, base, shift)])

    @classmethod
    def const(cls, gamma) -> "PeriodizedFunction":
        return cls([], gamma)

    @property
    def is_exact(self) -> bool:
        return is_exact(self.constant) and all(
            is_exact(w) and is_exact(s) and base.is_exact for w, base, s in self.terms)

    def __call__(self, x):
        total = self.constant
        for w, base, shift in self.terms:
            u = frac(x - _like(shift, x))
            end = _like(base.support_end, x)
            j = 0
            while u + j < end:
                total = total + _like(w, x) * base(u + j)
                j += 1
        return total

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.full_like(xs, float(self.constant))
        for w, base, shift in self.terms:
            u = np.mod(xs - float(shift), 1.0)
            for j in range(int(math.ceil(float(base.support_end)))):
                out += float(w) * base.values(u + j)
        return out

    def integral(self):
        return self.constant + sum((w * base.integral() for w, base, _ in self.terms), 0)


def evaluate(tau: PeriodizedFunction, x):
    return tau(x)


# -- Birkhoff sums -------------------------------------------------------------

def _alpha(alpha):
    if isinstance(alpha, ContinuedFraction):
        return alpha.require_value()
    return alpha


def _pick_mode(tau, alpha, x0, mode):
    if mode is not None:
        return mode
    if is_exact(alpha) and is_exact(x0) and tau.is_exact:
        return QUADRATIC
    return DECIMAL


def to_fixed(x, bits: int = 64) -> int:
    """floor({x} * 2**bits), exact for exact inputs."""
    x = frac(x)
    if is_exact(x):
        return math.floor(x * (1 << bits))
    with mpmath.workprec(bits + 64):
        return int(mpmath.floor(mpmath.mpf(x) * (1 << bits)))


def orbit_float(alpha, x0, start: int, count: int) -> np.ndarray:
    """{x0 + k alpha} for k in [start, start + count) as float64 via 64-bit fixed point."""
    a = np.uint64(to_fixed(_alpha(alpha)))
    b = np.uint64(to_fixed(x0))
    k = np.arange(start, start + count, dtype=np.uint64)
    v = k * a + b  # wraps mod 2**64
    return (v >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def birkhoff_sum(tau: PeriodizedFunction, alpha, x0, N: int, mode: str | None = None):
    """S_N = sum_{k<N} tau({x0 + k alpha})."""
    if N < 1:
        raise InvalidInputError("N must be at least 1")
    if isinstance(alpha, ContinuedFraction) and alpha.value is None:
        raise UnsupportedModeError("Birkhoff sums need a value for alpha")
    alpha = _alpha(alpha)
    mode = _pick_mode(tau, alpha, x0, mode)
    if mode == QUADRATIC:
        if not (is_exact(alpha) and is_exact(x0) and tau.is_exact):
            raise UnsupportedModeError("quadratic mode needs exact alpha, x0 and profile")
        total = 0
        x = frac(x0)
        for _ in range(N):
            total = total + tau(x)
            x = frac(x + alpha)
        return total
    if mode == DECIMAL:
        prec = precision_bits()
        with mpmath.workprec(prec):
            a = _to_mpf(alpha, prec)
            x = _to_mpf(x0, prec)
            terms = (tau(mpmath.frac(x + k * a)) for k in range(N))
            return mpmath.fsum(terms)
    if mode == FLOAT:
        total = 0.0
        for start in range(0, N, 1 << 18):
            n = min(1 << 18, N - start)
            total += math.fsum(tau.values(orbit_float(alpha, x0, start, n)))
        return total
    raise UnsupportedModeError(f"unknown mode {mode!r}")


def _to_mpf(x, prec):
    if isinstance(x, QuadraticNumber):
        return x.to_mpf(prec)
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def birkhoff_remainder(tau: PeriodizedFunction, alpha, x0, N: int, mode: str | None = None):
    """S_N(x0) - N * integral(tau)."""
    s = birkhoff_sum(tau, alpha, x0, N, mode)
    integral = tau.integral()
    if isinstance(s, float):
        return s - N * float(integral)
    if isinstance(s, mpmath.mpf) and not isinstance(integral, mpmath.mpf):
        integral = _to_mpf(integral, precision_bits())
    return s - N * integral


def remainder_trace(tau: PeriodizedFunction, alpha, x0, N: int, chunk: int = 1 << 18) -> np.ndarray:
    """Float remainders S_n(x0) - n * integral for n = 1..N."""
    mean = float(tau.integral())
    out = np.empty(N)
    carry = 0.0
    for start in range(0, N, chunk):
        n = min(chunk, N - start)
        vals = tau.values(orbit_float(alpha, x0, start, n)) - mean
        c = np.cumsum(vals) + carry
        out[start:start + n] = c
        carry = c[-1]
    return out


# -- decomposition -------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionTerm:
    l: int
    b: int
    k: int
    m_l: int
    x_l: object
    theta_l: object
    rho: object
    omega: Fraction
    alpha_l: Fraction
    gamma_l: Fraction

    def row(self) -> list:
        return [self.l, self.b, self.k, self.m_l, self.x_l, self.theta_l, self.rho, self.omega]


def _block_fraction(cf: ContinuedFraction, M: int, q: int, mode: str, prec: int):
    """({M alpha}, floor(q {M alpha}), q {M alpha} - floor) with a precision check in decimal mode."""
    alpha = cf.value
    if M == 0:
        return 0, 0
    if mode == QUADRATIC:
        f = frac(M * alpha)
        qf = q * f
        m = math.floor(qf)
        return m, qf - m
    with mpmath.workprec(prec):
        a = _to_mpf(alpha, prec)
        y = M * a
        f = y - mpmath.floor(y)
        qf = q * f
        m = int(mpmath.floor(qf))
        x = qf - m
        err = mpmath.mpf(2) ** (-prec) * (abs(y) + 1) * (q + 1) * 8
        if f < err or 1 - f < err or x < err or 1 - x < err:
            raise PrecisionError(f"fractional part of {M}*alpha not resolved at {prec} bits")
        return m, x


def decompose_sum(tau: PeriodizedFunction, alpha: ContinuedFraction, N: int,
                  mode: str | None = None) -> tuple[object, list[DecompositionTerm]]:
    """Regroup sum_{k<N} tau(k alpha) by Ostrowski blocks.

    Returns the sum and the table of (l, b, k) terms; the sum evaluated from
    the table equals the direct sum (exactly in quadratic mode).
    """
    if N < 1:
        raise InvalidInputError("N must be at least 1")
    if not isinstance(alpha, ContinuedFraction) or alpha.value is None:
        raise UnsupportedModeError("decomposition needs a continued fraction carrying a value")
    cf = alpha
    if mode is None:
        mode = QUADRATIC if is_exact(cf.value) and tau.is_exact else DECIMAL
    if mode not in (QUADRATIC, DECIMAL):
        raise UnsupportedModeError(f"decomposition supports quadratic or decimal mode, not {mode!r}")
    prec = precision_bits()
    digits = ostrowski_expand(N, cf).digits
    terms = []
    total = 0
    n_l = 0
    for l, b_l in enumerate(digits):
        q = cf.q_at(l)
        if b_l == 0:
            continue
        q_prev = cf.q_at(l - 1)
        sign = 1 if l % 2 == 1 else -1  # (-1)^(l-1)
        alpha_l = Fraction(sign * q_prev, q)
        th = theta(cf, l) if mode == QUADRATIC else _to_mpf(theta(cf, l), prec)
        a_next = cf.a(l + 1)
        for b in range(b_l):
            M = n_l + b * q
            m_l, x_l = _block_fraction(cf, M, q, mode, prec)
            gamma_l = -m_l * alpha_l
            for k in range(q):
                omega = frac(k * alpha_l + gamma_l)
                rho = omega * th / a_next + x_l if mode == QUADRATIC else \
                    _to_mpf(omega, prec) * th / a_next + x_l
                terms.append(DecompositionTerm(l, b, k, m_l, x_l, th, rho, omega, alpha_l, gamma_l))
                total = total + tau((k + rho) / q)
        n_l += b_l * q
    for t in terms:
        if not (-1 < t.rho < 2):
            raise InternalConsistencyError(f"rho out of (-1, 2) at level {t.l}")
    return total, terms


# -- grid sums -----------------------------------------------------------------

def _split(x):
    """x = u + xi with u integer and xi in (0, 1]."""
    u = math.ceil(x) - 1
    return u, x - u


def grid_sum_brute(hat: HatFunction, q: int):
    """sum_{k<q} tau(k/q) for the periodized hat, term by term."""
    tau = PeriodizedFunction.single(hat)
    return sum((tau(Fraction(k, q) if hat.is_exact else k / q) for k in range(q)), 0)


def grid_sum_closed_form(hat: HatFunction, q: int):
    """sum_{k<q} tau(k/q) = Hbq/2 + (H a eta(1-eta) - H b xi(1-xi)) / (2 a (b-a) q)

    with aq = u + xi, bq = v + eta and xi, eta in (0, 1].  Falls back to the
    direct sum when u >= v.
    """
    if not hat.b <= 1:
        raise InvalidInputError("closed form needs b <= 1")
    a, b, H = hat.a, hat.b, hat.H
    u, xi = _split(a * q)
    v, eta = _split(b * q)
    if u >= v:
        return grid_sum_brute(hat, q)
    return H * b * q / 2 + (H * a * eta * (1 - eta) - H * b * xi * (1 - xi)) / (2 * a * (b - a) * q)


# -- discrepancy ---------------------------------------------------------------

@dataclass(frozen=True)
class DiscrepancyStats:
    N: int
    star: object
    extreme: object = None


def star_discrepancy(points: Sequence) -> DiscrepancyStats:
    xs = sorted(points)
    N = len(xs)
    if N == 0:
        raise InvalidInputError("empty point set")
    if xs[0] < 0 or xs[-1] >= 1:
        raise InvalidInputError("points must lie in [0, 1)")
    over = max(Fraction(i + 1, N) - x if is_exact(x) else (i + 1) / N - x for i, x in enumerate(xs))
    under = max(x - Fraction(i, N) if is_exact(x) else x - i / N for i, x in enumerate(xs))
    star = max(over, under)
    extreme = over + under
    return DiscrepancyStats(N, star, extreme)


def koksma_profile(cf: ContinuedFraction, l: int) -> tuple[Fraction, int]:
    """max_{N <= q_l} N D*_N of {k alpha_l}, alpha_l = (-1)^(l-1) q_{l-1}/q_l, and 1 + 2 sum_{i<=l} a_i.

    Exact integer arithmetic; points are kept in a sorted array as N grows.
    """
    q = cf.q_at(l)
    step = ((1 if l % 2 == 1 else -1) * cf.q_at(l - 1)) % q
    bound = 1 + 2 * sum(cf.a(i) for i in range(1, l + 1))
    arr = np.empty(0, dtype=np.int64)
    best_num = 0  # N D*_N * q
    for N in range(1, q + 1):
        r = ((N - 1) * step) % q
        arr = np.insert(arr, np.searchsorted(arr, r), r)
        i = np.arange(1, N + 1, dtype=np.int64)
        nr = N * arr
        cur = max(int(np.max(i * q - nr)), int(np.max(nr - (i - 1) * q)))
        best_num = max(best_num, cur)
    return Fraction(best_num, q), bound


# -- domes ---------------------------------------------------------------------

def truncated_derivative_variation(dome: DomeFunction, q: int):
    """V_I(f_q') = 2 (f'(1/q) - f'(B - 1/q)), checked against 4 c q^(1 - 1/m)."""
    B = dome.B
    if not (q > 2 / B and q > 1 / dome.eps):
        raise InvalidInputError("q must exceed 2/B and 1/eps")
    v = 2 * (dome.derivative(Fraction(1, q) if is_exact(B) else 1 / q) - dome.derivative(B - 1 / q))
    bound = 4 * dome.c * q ** (1 - 1 / dome.m)
    if float(v) > bound * (1 + 1e-12):
        raise InternalConsistencyError(f"variation {float(v)} exceeds 4 c q^(1-1/m) = {bound}")
    return v


def dome_decompose(T: DomeFunction, grid: int = 10_000):
    """Split a dome on [0, B], 1 < B <= 2, into hat(1, B, T(1)) plus domes on [0, 1] and [1, B].

    The second dome is returned on [0, B - 1]; it sits at offset 1.
    """
    B = T.B
    if not (1 < B <= 2):
        raise InvalidInputError("dome_decompose needs 1 < B <= 2")
    h1 = T(1)
    hat = HatFunction(1, B, h1)
    d1p = float(abs(T.derivative(1)))
    c1 = max(T.c, d1p + float(h1))

    def f2(z):
        return T(z) - hat(z)

    def f3(z):
        return T(1 + z) - hat(1 + z)

    def f2_arr(zs):
        return T.values(zs) - hat.values(zs)

    def f3_arr(zs):
        return T.values(1 + np.asarray(zs)) - hat.values(1 + np.asarray(zs))

    eps = min(T.eps, 0.5, float(B - 1) / 2)
    d1 = DomeFunction(1, f2, eps, T.m, c1, f_array=f2_arr)
    d2 = DomeFunction(B - 1, f3, eps, T.m, c1, f_array=f3_arr)
    d1.check()
    d2.check()
    xs = np.linspace(0.0, float(B), grid)
    err = np.max(np.abs(T.values(xs) - hat.values(xs) - d1.values(xs) - d2.values(xs - 1)))
    if err > 1e-12:
        raise DecompositionError(f"pointwise reconstruction error {err}")
    return hat, d1, d2


# -- cohomology ----------------------------------------------------------------

def special_triangle_transfer(alpha) -> Callable:
    """g(x) = {x}({x} - 1) / (2 alpha (1 + alpha)), solving tau - 1/2 = g - g(. + alpha)."""
    alpha = _alpha(alpha)
    if not 0 < alpha < 1:
        raise InvalidInputError("transfer function needs 0 < alpha < 1")
    scale = 2 * alpha * (1 + alpha)

    def g(x):
        if isinstance(x, np.ndarray):
            y = np.mod(x, 1.0)
            return y * (y - 1) / float(scale)
        y = frac(x)
        return y * (y - 1) / scale

    return g


def cohomology_residual(tau: PeriodizedFunction, alpha, g: Callable, grid_n: int) -> float:
    """max_j |tau(x_j) - integral - g(x_j) + g({x_j + alpha})| over x_j = j / grid_n."""
    if grid_n < 2:
        raise InvalidInputError("grid_n must be at least 2")
    a = float(_alpha(alpha))
    xs = np.arange(grid_n) / grid_n
    lhs = tau.values(xs) - float(tau.integral())
    rhs = np.asarray(g(xs), dtype=float) - np.asarray(g(np.mod(xs + a, 1.0)), dtype=float)
    return float(np.max(np.abs(lhs - rhs)))
