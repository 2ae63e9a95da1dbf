"""Target sets in the unit square and their projection to periodic profiles.

A set S is a simple polygon or a disc.  Coordinates may be ``Fraction``,
:class:`~brlab.quadratic.QuadraticNumber` or ``float``; arithmetic stays exact
whenever the inputs are exact.

Boundary convention for membership: a boundary point belongs to S exactly
when moving it infinitesimally in direction (1, eta), 0 < eta << 1, lands in
the interior.  For a polygon this counts an edge as inside iff its outward
normal has negative x-component, or zero x-component and negative
y-component; the closed square therefore behaves like [0, 1)^2.  Discs are
open.

For slope alpha, the chord function T_S(y) is the x-extent (equivalently the
flow time) of S along the line through (0, y) with slope alpha, and
tau_S(x) = sum_m T_S(x + m) is its 1-periodic profile.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .contfrac import ContinuedFraction
from .errors import (ConstructionError, InternalConsistencyError, InvalidInputError,
                     UnsupportedModeError)
from .quadratic import QuadraticNumber, is_exact

SLOPE_TOLERANCE = 1e-12


def alpha_value(alpha):
    """Numeric slope from a ContinuedFraction or a bare number."""
    if isinstance(alpha, ContinuedFraction):
        return alpha.require_value()
    return alpha


def _sqrt(x):
    if isinstance(x, (int, Fraction, QuadraticNumber)):
        return mpmath.sqrt(x.to_mpf(113) if isinstance(x, QuadraticNumber) else mpmath.mpf(x))
    if isinstance(x, mpmath.mpf):
        return mpmath.sqrt(x)
    return math.sqrt(x)


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


@dataclass(frozen=True)
class Polygon:
    vertices: tuple

    def __post_init__(self):
        verts = tuple(tuple(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise InvalidInputError("a polygon needs at least 3 vertices")
        for x, y in verts:
            if not (0 <= x <= 1 and 0 <= y <= 1):
                raise InvalidInputError(f"vertex ({x}, {y}) lies outside the unit square")
        if self.signed_area() == 0:
            raise InvalidInputError("polygon is degenerate (zero area)")
        if not _is_simple(verts):
            raise InvalidInputError("polygon is not simple")

    @property
    def edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def signed_area(self):
        v = self.vertices
        total = 0
        for i in range(len(v)):
            (x0, y0), (x1, y1) = v[i], v[(i + 1) % len(v)]
            total += x0 * y1 - x1 * y0
        return Fraction(total, 2) if isinstance(total, int) else total / 2

    @property
    def is_ccw(self) -> bool:
        return self.signed_area() > 0

    def ccw(self) -> "Polygon":
        return self if self.is_ccw else Polygon(self.vertices[::-1])

    @property
    def is_convex(self) -> bool:
        v = self.ccw().vertices
        n = len(v)
        return all(_cross(*v[i - 1], *v[i], *v[(i + 1) % n]) >= 0 for i in range(n))

    @property
    def is_exact(self) -> bool:
        return all(is_exact(c) for vert in self.vertices for c in vert)


@dataclass(frozen=True)
class Disc:
    center: tuple
    radius: object

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(self.center))
        cx, cy = self.center
        r = self.radius
        if not r > 0:
            raise InvalidInputError("radius must be positive")
        if not (r <= cx <= 1 - r and r <= cy <= 1 - r):
            raise InvalidInputError("disc is not contained in the unit square")

    @property
    def is_exact(self) -> bool:
        return False


TorusSet = Polygon | Disc


def _segments_intersect(p1, p2, p3, p4) -> bool:
    d1 = _cross(*p3, *p4, *p1)
    d2 = _cross(*p3, *p4, *p2)
    d3 = _cross(*p1, *p2, *p3)
    d4 = _cross(*p1, *p2, *p4)
    if ((d1 > 0) != (d2 > 0) and d1 != 0 and d2 != 0) and ((d3 > 0) != (d4 > 0) and d3 != 0 and d4 != 0):
        return True

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return ((d1 == 0 and on_seg(p3, p4, p1)) or (d2 == 0 and on_seg(p3, p4, p2))
            or (d3 == 0 and on_seg(p1, p2, p3)) or (d4 == 0 and on_seg(p1, p2, p4)))


def _is_simple(verts) -> bool:
    n = len(verts)
    edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                # adjacent edges share exactly one vertex; reject folding back
                a, b = edges[i], edges[j]
                shared = a[1] if j == i + 1 else a[0]
                other_a = a[0] if j == i + 1 else a[1]
                other_b = b[1] if j == i + 1 else b[0]
                if _cross(*shared, *other_a, *other_b) == 0:
                    da = (other_a[0] - shared[0], other_a[1] - shared[1])
                    db = (other_b[0] - shared[0], other_b[1] - shared[1])
                    if da[0] * db[0] + da[1] * db[1] > 0:
                        return False
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


# -- membership and measure ----------------------------------------------------

def contains(s: TorusSet, point) -> bool:
    px, py = point
    if isinstance(s, Disc):
        cx, cy = s.center
        return (px - cx) ** 2 + (py - cy) ** 2 < s.radius ** 2
    inside = False
    for (x0, y0), (x1, y1) in s.edges:
        if (y0 > py) != (y1 > py):
            # crossing lies strictly right of the point
            side = (x0 - px) * (y1 - y0) + (py - y0) * (x1 - x0)
            if side != 0 and (side > 0) == (y1 > y0):
                inside = not inside
    return inside


def measure(s: TorusSet):
    if isinstance(s, Disc):
        r = s.radius
        if isinstance(r, (int, Fraction)):
            return mpmath.pi * mpmath.mpf(r.numerator) ** 2 / mpmath.mpf(r.denominator) ** 2 \
                if isinstance(r, Fraction) else mpmath.pi * r ** 2
        if isinstance(r, QuadraticNumber):
            return mpmath.pi * (r * r).to_mpf(113)
        return math.pi * r * r
    return abs(s.signed_area())


# -- chords --------------------------------------------------------------------

def inside_intervals(s: TorusSet, c, alpha, lo=None, hi=None) -> list[tuple]:
    """Maximal x-intervals where the line y = c + alpha*x lies in S, clipped to [lo, hi].

    Exact for exact polygons; discs go through a square root.
    """
    if isinstance(s, Disc):
        cx, cy = s.center
        # (x - cx)^2 + (c + alpha x - cy)^2 < r^2
        k = c - cy
        qa = 1 + alpha * alpha
        qb = 2 * (alpha * k - cx)
        qc = cx * cx + k * k - s.radius ** 2
        disc = qb * qb - 4 * qa * qc
        if not disc > 0:
            return []
        root = _sqrt(disc)
        x0 = (-qb - root) / (2 * qa)
        x1 = (-qb + root) / (2 * qa)
        if lo is not None:
            x0 = max(x0, lo)
        if hi is not None:
            x1 = min(x1, hi)
        return [(x0, x1)] if x1 > x0 else []

    xs = []
    for (x0, y0), (x1, y1) in s.edges:
        g0 = y0 - alpha * x0 - c
        g1 = y1 - alpha * x1 - c
        if g0 == 0 and g1 == 0:
            xs.extend((x0, x1))
        elif (g0 <= 0 <= g1) or (g1 <= 0 <= g0):
            xs.append(x0 + (x1 - x0) * (g0 / (g0 - g1)))
    if lo is not None:
        xs = [x for x in xs if x > lo] + [lo]
    if hi is not None:
        xs = [x for x in xs if x < hi] + [hi]
    xs = sorted(set(xs))
    out = []
    for a, b in zip(xs, xs[1:]):
        mid = (a + b) / 2
        if contains(s, (mid, c + alpha * mid)):
            if out and out[-1][1] == a:
                out[-1] = (out[-1][0], b)
            else:
                out.append((a, b))
    return out


def chord_length(s: TorusSet, y, alpha):
    """T_S(y) = |l(y)| / sqrt(1 + alpha^2): the x-extent of S on the slope-alpha line through (0, y)."""
    alpha = alpha_value(alpha)
    if not alpha > 0:
        raise InvalidInputError("alpha must be positive")
    return sum((b - a for a, b in inside_intervals(s, y, alpha)), 0)


# -- profiles ------------------------------------------------------------------

class ChordProfile:
    """tau_S for a fixed slope: support [B1, B2] of T_S and its periodization."""

    B1 = B2 = None
    continuous = True
    is_exact = False

    @property
    def width(self):
        return self.B2 - self.B1

    @property
    def lift(self):
        """Support start reduced into [0, 1); the stored support is [lift, lift + width]."""
        return self.B1 - math.floor(self.B1)

    def T(self, y):
        raise NotImplementedError

    def __call__(self, x):
        u = x - self.B1
        u = u - math.floor(u)
        total = 0
        j = 0
        while u + j <= self.width:
            total = total + self.T(self.B1 + u + j)
            j += 1
        return total

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        b1 = float(self.B1)
        width = float(self.width)
        u = np.mod(xs - b1, 1.0)
        out = np.zeros_like(u)
        for j in range(int(math.floor(width)) + 1):
            out += self._T_array(b1 + u + j)
        return out

    def integral(self):
        raise NotImplementedError


class PolygonProfile(ChordProfile):
    def __init__(self, polygon: Polygon, alpha):
        self.polygon = polygon
        self.alpha = alpha
        images = sorted(set(vy - alpha * vx for vx, vy in polygon.vertices))
        self.breakpoints = images
        self.B1, self.B2 = images[0], images[-1]
        pieces = []
        for lo, hi in zip(images, images[1:]):
            h = hi - lo
            v1 = chord_length(polygon, lo + h / 3, alpha)
            v2 = chord_length(polygon, lo + 2 * h / 3, alpha)
            slope3 = v2 - v1  # change over a third of the piece
            pieces.append((lo, hi, v1 - slope3, v2 + slope3))
        self.pieces = pieces
        self.continuous = _pieces_continuous(pieces)
        self.is_exact = polygon.is_exact and is_exact(alpha)
        self._xp = np.array([float(x) for p in pieces for x in (p[0], p[1])])
        self._fp = np.array([float(v) for p in pieces for v in (p[2], p[3])])

    def T(self, y):
        if y < self.B1 or y > self.B2:
            return 0
        i = bisect.bisect_right(self.breakpoints, y) - 1
        i = min(i, len(self.pieces) - 1)
        lo, hi, vl, vr = self.pieces[i]
        return vl + (vr - vl) * ((y - lo) / (hi - lo))

    def _T_array(self, ys):
        return np.interp(ys, self._xp, self._fp, left=0.0, right=0.0)

    def integral(self):
        return sum(((hi - lo) * (vl + vr) / 2 for lo, hi, vl, vr in self.pieces), 0)

    def hats(self, triangles=None):
        """Decompose T_S into shifted hat functions, one per triangle.

        Returns (shift, HatFunction) pairs with T_S(y) = sum H(y - shift).
        """
        from .brf import HatFunction

        triangles = triangles if triangles is not None else triangulate(self.polygon, self.alpha)
        out = []
        for tri in triangles:
            imgs = sorted(vy - self.alpha * vx for vx, vy in tri.vertices)
            lo, mid, hi = imgs
            if lo == mid or mid == hi:
                raise ConstructionError("triangle has an edge of slope alpha; its profile is not a hat")
            peak = chord_length(tri, mid, self.alpha)
            out.append((lo, HatFunction(mid - lo, hi - lo, peak)))
        return out

    def to_periodized(self):
        from .brf import PeriodizedFunction

        return PeriodizedFunction([(1, hat, shift) for shift, hat in self.hats()])


def _pieces_continuous(pieces) -> bool:
    for (_, _, _, vr), (_, _, vl, _) in zip(pieces, pieces[1:]):
        if isinstance(vr, float) or isinstance(vl, float):
            if abs(vr - vl) > 1e-9:
                return False
        elif vr != vl:
            return False
    first, last = pieces[0][2], pieces[-1][3]
    return abs(float(first)) < 1e-12 and abs(float(last)) < 1e-12


class DiscProfile(ChordProfile):
    """Dome profile T_S(y) = 2 sqrt(r^2 (1 + alpha^2) - (y - y_c)^2) / (1 + alpha^2)."""

    def __init__(self, disc: Disc, alpha):
        self.disc = disc
        self.alpha = alpha
        cx, cy = disc.center
        self.center_line = cy - alpha * cx
        self.scale = 1 + alpha * alpha
        self.r2s = disc.radius ** 2 * self.scale
        self.half_width = _sqrt(self.r2s)
        self.B1 = self.center_line - self.half_width
        self.B2 = self.center_line + self.half_width
        self._f = tuple(float(v) for v in (self.center_line, self.scale, self.r2s))

    def T(self, y):
        inner = self.r2s - (y - self.center_line) ** 2
        if not inner > 0:
            return 0
        return 2 * _sqrt(inner) / self.scale

    def _T_array(self, ys):
        yc, scale, r2s = self._f
        inner = np.maximum(r2s - (ys - yc) ** 2, 0.0)
        return 2.0 * np.sqrt(inner) / scale

    def derivative(self, y):
        inner = self.r2s - (y - self.center_line) ** 2
        if not inner > 0:
            raise InvalidInputError("derivative requested outside the open support")
        return -2 * (y - self.center_line) / (_sqrt(inner) * self.scale)

    def integral(self):
        return measure(self.disc)

    def to_dome(self):
        from .brf import DomeFunction

        b1 = self.B1
        c, m, eps = dome_growth_certificate(self.disc, self.alpha)
        return DomeFunction(
            B=2 * self.half_width,
            f=lambda z: self.T(b1 + z),
            fprime=lambda z: self.derivative(b1 + z),
            eps=eps, m=m, c=c,
            f_array=lambda zs: self._T_array(float(b1) + np.asarray(zs, dtype=float)),
        )

    def to_periodized(self):
        from .brf import PeriodizedFunction

        return PeriodizedFunction([(1, self.to_dome(), self.B1)])


def tau_profile(s: TorusSet, alpha) -> ChordProfile:
    """Profile tau_S(x) = int_0^1 chi_S(t, {t alpha + x}) dt, built exactly from breakpoints."""
    alpha = alpha_value(alpha)
    if not alpha > 0:
        raise InvalidInputError("alpha must be positive")
    if isinstance(s, Disc):
        return DiscProfile(s, alpha)
    return PolygonProfile(s, alpha)


# -- triangulation and slopes ---------------------------------------------------

def _slope_is(dx, dy, alpha) -> bool:
    if dx == 0:
        return False
    if is_exact(dx) and is_exact(dy) and is_exact(alpha):
        return dy == alpha * dx
    return abs(float(dy) - float(alpha) * float(dx)) <= SLOPE_TOLERANCE * max(1.0, abs(float(dx)))


def _in_closed_triangle(p, a, b, c) -> bool:
    return _cross(*a, *b, *p) >= 0 and _cross(*b, *c, *p) >= 0 and _cross(*c, *a, *p) >= 0


def triangulate(polygon: Polygon, alpha=None) -> list[Polygon]:
    """Ear clipping.  With ``alpha`` given, ears whose new diagonal has slope alpha are skipped."""
    alpha = alpha_value(alpha) if alpha is not None else None
    verts = list(polygon.ccw().vertices)
    out = []
    while len(verts) > 3:
        n = len(verts)
        for i in range(n):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
            if _cross(*a, *b, *c) <= 0:
                continue
            if any(_in_closed_triangle(p, a, b, c) for p in verts if p not in (a, b, c)):
                continue
            if alpha is not None and _slope_is(c[0] - a[0], c[1] - a[1], alpha):
                continue
            out.append(Polygon((a, b, c)))
            del verts[i]
            break
        else:
            raise ConstructionError("no admissible ear; every candidate diagonal has slope alpha")
    out.append(Polygon(tuple(verts)))
    return out


def has_edge_of_slope(polygon: Polygon, alpha) -> bool:
    if isinstance(alpha, ContinuedFraction):
        if alpha.value is None:
            raise UnsupportedModeError("slope test needs alpha's value")
        alpha = alpha.value
    return any(_slope_is(x1 - x0, y1 - y0, alpha) for (x0, y0), (x1, y1) in polygon.edges)


def dome_growth_certificate(disc: Disc, alpha, grid: int = 10_000) -> tuple[float, float, float]:
    """(c, m, eps) with T_S(B2 - z), T_S(B1 + z) <= c z^(1/m) for 0 <= z < eps.

    c = 8 / sqrt(k (1 + alpha^2)) with curvature k = 1/r and m = 2; eps is the
    half-width of the support.  The bound is re-checked on a grid.
    """
    if not isinstance(disc, Disc):
        raise InvalidInputError("growth certificate is defined for discs")
    alpha = float(alpha_value(alpha))
    r = float(disc.radius)
    k = 1.0 / r
    c = 8.0 / math.sqrt(k * (1.0 + alpha * alpha))
    profile = tau_profile(Disc(tuple(float(v) for v in disc.center), r), alpha)
    eps = float(profile.half_width)
    z = eps * np.arange(1, grid + 1) / grid
    b1, b2 = float(profile.B1), float(profile.B2)
    bound = c * np.sqrt(z)
    for vals in (profile._T_array(b2 - z), profile._T_array(b1 + z)):
        if np.any(vals > bound * (1 + 1e-9)):
            raise InternalConsistencyError("growth bound failed for a disc profile")
    return c, 2.0, eps


# -- sampling ------------------------------------------------------------------

def random_polygon(rng: np.random.Generator, n_vertices: int | None = None,
                   denominator: int = 1000, inset: Fraction = Fraction(1, 50)) -> Polygon:
    """Random star-shaped simple polygon with rational vertices inside an inset square."""
    while True:
        n = n_vertices or int(rng.integers(3, 8))
        center = rng.uniform(0.3, 0.7, size=2)
        angles = np.sort(rng.uniform(0, 2 * np.pi, size=n))
        if np.min(np.diff(np.r_[angles, angles[0] + 2 * np.pi])) < 0.2:
            continue
        radii = rng.uniform(0.05, 0.3, size=n)
        pts = center + np.c_[radii * np.cos(angles), radii * np.sin(angles)]
        lo, hi = float(inset), 1 - float(inset)
        if np.any(pts < lo) or np.any(pts > hi):
            continue
        verts = tuple((Fraction(round(x * denominator), denominator),
                       Fraction(round(y * denominator), denominator)) for x, y in pts)
        try:
            return Polygon(verts)
        except InvalidInputError:
            continue


def random_disc(rng: np.random.Generator, r_min: float = 0.02, r_max: float = 0.45,
                denominator: int = 1000) -> Disc:
    while True:
        r = Fraction(round(rng.uniform(r_min, r_max) * denominator), denominator)
        cx = Fraction(round(rng.uniform(0, 1) * denominator), denominator)
        cy = Fraction(round(rng.uniform(0, 1) * denominator), denominator)
        if r > 0 and r <= cx <= 1 - r and r <= cy <= 1 - r:
            return Disc((cx, cy), r)


def random_rectangle(rng: np.random.Generator, denominator: int = 1000) -> Polygon:
    while True:
        xs = sorted(Fraction(int(v), denominator) for v in rng.integers(0, denominator + 1, size=2))
        ys = sorted(Fraction(int(v), denominator) for v in rng.integers(0, denominator + 1, size=2))
        if xs[0] < xs[1] and ys[0] < ys[1]:
            return rectangle(xs[0], ys[0], xs[1], ys[1])


def rectangle(x0, y0, x1, y1) -> Polygon:
    return Polygon(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))


def unit_square() -> Polygon:
    return rectangle(0, 0, 1, 1)


def special_triangle() -> Polygon:
    """Triangle (0,0), (1,0), (0,1): bounded remainder for every slope."""
    return Polygon(((0, 0), (1, 0), (0, 1)))


def slope_parallelogram(alpha, p) -> Polygon:
    """Parallelogram (0,0), (1,alpha), (1,alpha+p), (0,p) with two edges of slope alpha."""
    return Polygon(((0, 0), (1, alpha), (1, alpha + p), (0, p)))


def negdisc(alpha) -> Disc:
    """Disc of diameter alpha/sqrt(1+alpha^2) whose profile is supported on [0, alpha]."""
    alpha = float(alpha_value(alpha))
    r = alpha / (2 * math.sqrt(1 + alpha * alpha))
    cx = r
    cy = alpha / 2 + alpha * cx
    return Disc((cx, cy), r)
