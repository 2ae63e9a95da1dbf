"""Occupancy of the linear flow X(t) = ({x1 + t}, {x2 + alpha t}) in a target set.

Time is cut into units, one per passage of the x-coordinate across [0, 1).
During unit n the trajectory is the line Y = y0_n + alpha s (mod 1), s = X,
with y0_n = {x2 - alpha x1 + n alpha}; modulo 1 it splits into the pieces
Y = y0_n - j + alpha s.  Each piece is clipped against the set.

Two engines share this layout.  The exact engine solves every crossing in
the arithmetic of its inputs (rationals or a quadratic field).  The float
engine clips whole batches of units at once against convex pieces of the set
and carries the running totals between batches; it serves long horizons.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .brf import birkhoff_remainder, orbit_float
from .errors import InternalConsistencyError, InvalidInputError
from .geometry import (Disc, Polygon, TorusSet, alpha_value, inside_intervals, measure,
                       tau_profile, triangulate)
from .quadratic import frac, is_exact

EXACT = "exact"
FLOAT = "float"

EQUIVALENCE_BOUND = 4
BATCH = 1 << 16


@dataclass(frozen=True)
class FlowExperiment:
    set: TorusSet
    alpha: object
    x: tuple
    T: object

    def __post_init__(self):
        _check(self.alpha, self.x, self.T)


@dataclass
class DiscrepancyTrace:
    checkpoints: list  # (T_i, delta_i)
    running_sup: float
    sups: list = field(default_factory=list)  # running sup of |delta| up to each T_i
    mode: str = FLOAT

    def rows(self) -> list:
        return [(t, d, s) for (t, d), s in zip(self.checkpoints, self.sups)]


def _check(alpha, x, T):
    a = alpha_value(alpha)
    if not a > 0:
        raise InvalidInputError("alpha must be positive")
    x1, x2 = x
    if not (0 <= x1 < 1 and 0 <= x2 < 1):
        raise InvalidInputError("start point must lie in [0, 1)^2")
    if T < 0:
        raise InvalidInputError("horizon must be non-negative")
    return a


def _pick_mode(s, alpha, x, mode):
    if mode is not None:
        return mode
    exact = isinstance(s, Polygon) and s.is_exact and is_exact(alpha) and all(is_exact(c) for c in x)
    return EXACT if exact else FLOAT


def _unit_count(x1, T) -> int:
    return max(1, math.ceil(x1 + T))


# -- exact engine --------------------------------------------------------------

def _exact_intervals(s: TorusSet, alpha, x, T):
    """Inside intervals as (t_enter, t_exit) in time order."""
    x1, x2 = x
    base = frac(x2 - alpha * x1)
    wraps = math.ceil(alpha)
    for n in range(_unit_count(x1, T)):
        lo = x1 if n == 0 else 0
        hi = min(1, x1 + T - n)
        if not hi > lo:
            break
        y0 = frac(base + n * alpha)
        for j in range(wraps + 1):
            for a, b in inside_intervals(s, y0 - j, alpha, lo, hi):
                yield n + a - x1, n + b - x1


# -- float engine --------------------------------------------------------------

def _components(s: TorusSet):
    if isinstance(s, Disc):
        cx, cy = s.center
        return [("disc", float(cx), float(cy), float(s.radius))]
    polys = [s.ccw()] if s.is_convex else triangulate(s)
    out = []
    for p in polys:
        v = np.array([[float(a), float(b)] for a, b in p.ccw().vertices])
        e = np.roll(v, -1, axis=0) - v
        out.append(("poly", v, e))
    return out


def _clip_batch(comps, alpha: float, c: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Clip lines Y = c + alpha s, s in [lo, hi], against each convex component.

    Returns (index, s_enter, s_exit) for every non-empty clip.
    """
    idx_out, a_out, b_out = [], [], []
    for comp in comps:
        if comp[0] == "disc":
            _, cx, cy, r = comp
            k = c - cy
            qa = 1 + alpha * alpha
            qb = 2 * (alpha * k - cx)
            qc = cx * cx + k * k - r * r
            disc = qb * qb - 4 * qa * qc
            ok = disc > 0
            root = np.sqrt(np.where(ok, disc, 0.0))
            sa = np.maximum((-qb - root) / (2 * qa), lo)
            sb = np.minimum((-qb + root) / (2 * qa), hi)
        else:
            _, v, e = comp
            sa = lo.copy()
            sb = hi.copy()
            ok = np.ones(c.shape, dtype=bool)
            for (vx, vy), (ex, ey) in zip(v, e):
                kappa = ex * alpha - ey
                beta = ex * (c - vy) + ey * vx
                if kappa > 0:
                    sa = np.maximum(sa, -beta / kappa)
                elif kappa < 0:
                    sb = np.minimum(sb, -beta / kappa)
                else:
                    ok &= beta > 0
        ok &= sb > sa
        idx = np.nonzero(ok)[0]
        idx_out.append(idx)
        a_out.append(sa[idx])
        b_out.append(sb[idx])
    return np.concatenate(idx_out), np.concatenate(a_out), np.concatenate(b_out)


def _float_batches(s: TorusSet, alpha, x, T, batch: int = BATCH):
    """Yield (t_enter, t_exit) arrays per batch of units, sorted by time."""
    a_exact = alpha_value(alpha)
    a = float(a_exact)
    x1, x2 = x
    x1f = float(x1)
    Tf = float(T)
    base = frac(x2 - a_exact * x1) if is_exact(a_exact) and is_exact(x1) and is_exact(x2) \
        else (float(x2) - a * x1f) % 1.0
    comps = _components(s)
    wraps = math.ceil(a)
    units = _unit_count(x1f, Tf)
    for n0 in range(0, units, batch):
        cnt = min(batch, units - n0)
        n = np.arange(n0, n0 + cnt)
        y0 = orbit_float(a_exact, base, n0, cnt)
        lo = np.where(n == 0, x1f, 0.0)
        hi = np.minimum(1.0, x1f + Tf - n)
        keep = hi > lo
        ts_a, ts_b = [], []
        for j in range(wraps + 1):
            idx, sa, sb = _clip_batch(comps, a, y0[keep] - j, lo[keep], hi[keep])
            nn = n[keep][idx]
            ts_a.append(nn + sa - x1f)
            ts_b.append(nn + sb - x1f)
        ta = np.concatenate(ts_a)
        tb = np.concatenate(ts_b)
        order = np.argsort(ta, kind="stable")
        yield ta[order], tb[order]


def _float_unit_occupancy(s: TorusSet, alpha, x, units: int) -> np.ndarray:
    """Occupancy during each of the first ``units`` units (T = units - x1 end)."""
    x1 = float(x[0])
    out = np.zeros(units)
    for ta, tb in _float_batches(s, alpha, x, units - x1):
        n = np.floor(ta + x1 + 1e-15).astype(np.int64)
        n = np.clip(n, 0, units - 1)
        np.add.at(out, n, tb - ta)
    return out


# -- public operations ---------------------------------------------------------

def occupancy(s: TorusSet, alpha, x, T, mode: str | None = None):
    """int_0^T chi_S(X(t)) dt."""
    a = _check(alpha, x, T)
    mode = _pick_mode(s, a, x, mode)
    if mode == EXACT:
        return sum((tb - ta for ta, tb in _exact_intervals(s, a, x, T)), 0)
    return math.fsum(math.fsum(tb - ta) for ta, tb in _float_batches(s, alpha, x, T))


def delta_T(s: TorusSet, alpha, x, T, mode: str | None = None):
    a = _check(alpha, x, T)
    mode = _pick_mode(s, a, x, mode)
    occ = occupancy(s, alpha, x, T, mode)
    lam = measure(s)
    if mode == EXACT:
        return occ - T * lam
    return occ - float(T) * float(lam)


def equivalence_gap(s: TorusSet, alpha, x, T, mode: str | None = None):
    """|S_N(x0) - Delta_T| with x0 = {x2 - x1 alpha} and N = floor(T); must not exceed 4."""
    a = _check(alpha, x, T)
    mode = _pick_mode(s, a, x, mode)
    x1, x2 = x
    N = math.floor(T)
    tau = tau_profile(s, a)
    if mode == EXACT:
        x0 = frac(x2 - x1 * a)
        s_n = birkhoff_remainder(tau, a, x0, N, mode="quadratic") if N >= 1 else 0
    else:
        x0 = frac(x2 - x1 * a) if all(is_exact(v) for v in (a, x1, x2)) else (float(x2) - float(x1) * float(a)) % 1.0
        s_n = birkhoff_remainder(tau, a, x0, N, mode="float") if N >= 1 else 0.0
    gap = abs(s_n - delta_T(s, alpha, x, T, mode))
    if gap > EQUIVALENCE_BOUND:
        raise InternalConsistencyError(f"equivalence gap {float(gap)} exceeds {EQUIVALENCE_BOUND}")
    return gap


def sup_trace(s: TorusSet, alpha, x, T_max, checkpoints, mode: str | None = None) -> DiscrepancyTrace:
    """Delta_T at each checkpoint and the running sup of |Delta_T| up to it.

    Between events Delta is linear in T, so the sup is taken over every entry
    and exit time.
    """
    a = _check(alpha, x, T_max)
    checkpoints = list(checkpoints)
    if checkpoints != sorted(checkpoints) or (checkpoints and checkpoints[-1] > T_max):
        raise InvalidInputError("checkpoints must be sorted and at most T_max")
    mode = _pick_mode(s, a, x, mode)
    if mode == EXACT:
        batches = _exact_batches(s, a, x, T_max)
        lam = measure(s)
    else:
        batches = _float_batches(s, alpha, x, T_max)
        lam = float(measure(s))
    return _trace_from_batches(batches, lam, checkpoints, mode)


def _exact_batches(s, alpha, x, T):
    ivs = list(_exact_intervals(s, alpha, x, T))
    yield [ta for ta, _ in ivs], [tb for _, tb in ivs]


def _trace_from_batches(batches, lam, checkpoints, mode) -> DiscrepancyTrace:
    exact = mode == EXACT
    occ = 0  # occupancy before the current batch
    sup = 0
    results = []
    sups = []
    pending = list(checkpoints)
    for ta, tb in batches:
        if exact:
            ta, tb = list(ta), list(tb)
            lengths = [b - a for a, b in zip(ta, tb)]
            before = []
            acc = occ
            for L in lengths:
                before.append(acc)
                acc = acc + L
            enter = [abs(o - lam * t) for o, t in zip(before, ta)]
            leave = [abs(o + L - lam * t) for o, L, t in zip(before, lengths, tb)]
            ev_t = ta + tb
            ev_v = enter + leave
            order = sorted(range(len(ev_t)), key=ev_t.__getitem__)
            ev_t = [ev_t[i] for i in order]
            prefix = []
            m = sup
            for i in order:
                m = max(m, ev_v[i])
                prefix.append(m)
            last_t = tb[-1] if tb else None
        else:
            ta = np.asarray(ta)
            tb = np.asarray(tb)
            lengths = tb - ta
            before = occ + np.concatenate(([0.0], np.cumsum(lengths)[:-1])) if len(ta) else np.empty(0)
            acc = before[-1] + lengths[-1] if len(ta) else occ
            ev_t = np.concatenate((ta, tb))
            ev_v = np.abs(np.concatenate((before - lam * ta, before + lengths - lam * tb)))
            order = np.argsort(ev_t, kind="stable")
            ev_t = ev_t[order]
            prefix = np.maximum.accumulate(np.concatenate(([sup], ev_v[order])))[1:]
            last_t = tb[-1] if len(tb) else None
        # checkpoints resolved inside this batch
        while pending and (last_t is None or pending[0] <= last_t):
            T = pending.pop(0)
            d = _delta_at(T, ta, tb, before, lengths, occ, lam, exact)
            k = _count_le(ev_t, T, exact)
            run = prefix[k - 1] if k else sup
            run = max(run, abs(d))
            if not exact:
                d, run = float(d), float(run)
            results.append((T, d))
            sups.append(run)
        if len(ev_t):
            sup = max(sup, prefix[-1])
        occ = acc
    for T in pending:  # past the last interval: flow is outside
        d = occ - lam * T
        d = d if exact else float(d)
        results.append((T, d))
        sup = max(sup, abs(d))
        sups.append(sup if exact else float(sup))
    running = max([sup] + sups)
    return DiscrepancyTrace(results, running if exact else float(running), sups, mode)


def _count_le(ts, T, exact):
    if exact:
        return bisect.bisect_right(ts, T)
    return int(np.searchsorted(ts, T, side="right"))


def _delta_at(T, ta, tb, before, lengths, occ, lam, exact):
    """Delta at time T using the batch's interval list."""
    if exact:
        i = bisect.bisect_right(ta, T) - 1
    else:
        i = int(np.searchsorted(ta, T, side="right")) - 1
    if i < 0:
        return occ - lam * T
    inside = min(T, tb[i]) - ta[i]
    return before[i] + inside - lam * T


# -- Kesten coupling -----------------------------------------------------------

def kesten_counts(alpha, p, N: int) -> np.ndarray:
    """Cumulative #{n < k : {n alpha} in [0, p)} for k = 1..N."""
    a = alpha_value(alpha)
    out = np.empty(N, dtype=np.int64)
    carry = 0
    pf = float(p)
    for start in range(0, N, BATCH):
        cnt = min(BATCH, N - start)
        hits = (orbit_float(a, 0, start, cnt) < pf).astype(np.int64)
        c = np.cumsum(hits) + carry
        out[start:start + cnt] = c
        carry = int(c[-1])
    return out


def unit_occupancy(s: TorusSet, alpha, N: int, x2=0) -> np.ndarray:
    """Cumulative occupancy at integer times 1..N from (0, x2) (float engine)."""
    return np.cumsum(_float_unit_occupancy(s, alpha, (0, x2), N))
