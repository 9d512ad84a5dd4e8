"""
Brute-force evaluation of the min-plus operators on a rational grid.

Nothing here looks at curve internals except through ``f(t)``; right limits
are recovered by linear extrapolation from two nearby samples, which is exact
when the sampled curve is affine just to the right of the point.  When every
breakpoint of the operands lies on the grid, the min/sup formulas below are
exact at grid points.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from fractions import Fraction
from typing import Callable, List

import numpy as np

from .curve import INF, Curve

# +inf in scaled int64 rows; the sum of two stays below 2**63
BIG = 2**61

Fn = Callable[[Fraction], object]


def grid(step, H) -> List[Fraction]:
    step, H = Fraction(step), Fraction(H)
    n = int(H / step)
    return [k * step for k in range(n + 1)]


def right_limit(f: Fn, t, eta) -> object:
    a, b = f(t + eta), f(t + 2 * eta)
    if a == INF or b == INF:
        return INF
    return 2 * a - b


def suggested_grid(*curves: Curve):
    """(step, H): a quarter of the smallest breakpoint gap, 3x transient plus 3 periods."""
    pts = set()
    T, d = Fraction(0), Fraction(1)
    for f in curves:
        H = f.T0 + 3 * f.d
        pts |= {Fraction(0)} | {s.start for s in f.segments_until(H)} | {s.end for s in f.segments_until(H)}
        T, d = max(T, f.T0), max(d, f.d)
    pts = sorted(pts)
    gap = min((b - a for a, b in zip(pts, pts[1:])), default=Fraction(1))
    return gap / 4, 3 * T + 3 * d


def _ints(*rows):
    """Scale rows of Fractions (or INF) to int64 arrays over one denominator."""
    den = 1
    for row in rows:
        for x in row:
            if x != INF:
                den = math.lcm(den, Fraction(x).denominator)
    out = []
    for row in rows:
        a = np.empty(len(row), dtype=np.int64)
        for k, x in enumerate(row):
            a[k] = BIG if x == INF else int(x * den)
        out.append(a)
    return out, den


def _back(x, den):
    return INF if x >= BIG else Fraction(int(x), den)


def conv_at(f: Fn, g: Fn, t, step) -> object:
    best = INF
    for s in grid(step, t):
        v = f(s) + g(t - s)
        if v < best:
            best = v
    return best


def conv_grid(f: Fn, g: Fn, step, H) -> List:
    """Convolution on the whole grid at once, O(n^2)."""
    pts = grid(step, H)
    (F, G), den = _ints([f(t) for t in pts], [g(t) for t in pts])
    out = []
    for i in range(len(pts)):
        out.append(_back(min(int(np.min(F[: i + 1] + G[i::-1])), BIG), den))
    return out


def deconv_at(f: Fn, g: Fn, t, step, S) -> object:
    """max(0, sup_{0<=s<=S} f(t+s) - g(s)), with right limits to catch jumps."""
    return deconv_grid(f, g, step, t, S, only=t)[0]


def deconv_grid(f: Fn, g: Fn, step, H, S, only=None) -> List:
    """f (/) g at each grid t <= H (or just at ``only``), sup over grid s <= S."""
    eta = step / 8
    ts = [Fraction(only)] if only is not None else grid(step, H)
    ss = grid(step, S)
    us = sorted({t + s for t in ts for s in ss})
    rows = [f(u) for u in us], [right_limit(f, u, eta) for u in us]
    rows += [g(s) for s in ss], [right_limit(g, s, eta) for s in ss]
    (F, Fr, G, Gr), den = _ints(*rows)
    where = {u: k for k, u in enumerate(us)}
    out = []
    for t in ts:
        k = where[t]
        best, unbounded = 0, False
        for A, B in ((F[k : k + len(ss)], G), (Fr[k : k + len(ss)], Gr)):
            fin = B < BIG
            if np.any(A[fin] >= BIG):
                unbounded = True
                break
            if np.any(fin):
                best = max(best, int(np.max(A[fin] - B[fin])))
        out.append(INF if unbounded else Fraction(best, den))
    return out


def closure_grid(f: Fn, step, H, K: int) -> List:
    """min over k <= K of f^k (f^0 = e) on the grid."""
    pts = grid(step, H)
    (F,), den = _ints([f(t) for t in pts])
    n = len(pts)
    power = np.full(n, BIG, dtype=np.int64)
    power[0] = 0
    best = power.copy()
    for _ in range(K):
        nxt = np.empty(n, dtype=np.int64)
        for i in range(n):
            nxt[i] = min(int(np.min(power[: i + 1] + F[i::-1])), BIG)
        power = nxt
        best = np.minimum(best, power)
    return [_back(x, den) for x in best]


def vdev_grid(alpha: Fn, beta: Fn, step, H) -> object:
    eta = step / 8
    pts = grid(step, H)
    rows = [alpha(t) for t in pts], [beta(t) for t in pts]
    rows += [right_limit(alpha, t, eta) for t in pts], [right_limit(beta, t, eta) for t in pts]
    (A, B, Ar, Br), den = _ints(*rows)
    best = 0
    for a, b in ((A, B), (Ar, Br)):
        fin = b < BIG
        if np.any(a[fin] >= BIG):
            return INF
        if np.any(fin):
            best = max(best, int(np.max(a[fin] - b[fin])))
    return Fraction(best, den)


def hdev_grid(alpha: Fn, beta: Fn, step, H, Hb=None) -> object:
    """Largest horizontal gap sampled at grid t and just after it.

    At each grid t the lag to the first u with beta(u) >= alpha(t) is solved
    on the grid and refined inside the last cell, taking beta affine there.
    The supremum may only be approached from the right of t, so the limit of
    the lag there is taken too: the last u with beta(u) <= alpha(t+) when
    alpha keeps rising, else the first u reaching alpha(t+).
    """
    Hb = Fraction(Hb if Hb is not None else 4 * H)
    eta = step / 8
    us = grid(step, Hb)
    B = [beta(u) for u in us]
    Br = [right_limit(beta, u, eta) for u in us]

    def first_reach(y):
        k = bisect_left(B, y)
        if k == len(B):
            return None
        if k == 0:
            return us[0]
        lo = Br[k - 1]
        if lo >= y:
            return us[k - 1]
        return us[k - 1] + step * (y - lo) / (B[k] - lo) if B[k] != INF else us[k]

    def last_below(y):
        k = bisect_right(B, y) - 1
        if k < 0:
            return us[0]
        if k == len(B) - 1:
            return None
        lo = Br[k]
        if lo > y:
            return us[k]
        return us[k] + step * (y - lo) / (B[k + 1] - lo) if B[k + 1] != INF else us[k + 1]

    best = Fraction(0)
    for t in grid(step, H):
        y = alpha(t)
        if y == INF:
            if B[-1] != INF:
                return INF
            y = INF
        u = first_reach(y)
        if u is None:
            return INF
        best = max(best, u - t)
        yr = right_limit(alpha, t, eta)
        # alpha rising right after t: the lag tends to the end of beta's level yr
        u = last_below(yr) if yr != INF and alpha(t + eta) > yr else first_reach(yr)
        if u is None:
            return INF
        best = max(best, u - t)
    return best
