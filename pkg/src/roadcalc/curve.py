"""
Exact piecewise-affine curves of the min-plus dioid.

A curve f is non-decreasing, equal to 0 for t < 0, and left-continuous.  It is
stored as its value ``f0`` at t = 0, a list of segments covering (0, T0 + d]
and a pseudo-periodic tail rule ``f(t + d) = f(t) + c`` for every t > T0.
``c`` may be +inf, in which case the curve is +inf for all t > T0.

A segment ``Seg(start, end, value, slope)`` describes f on the half-open
interval (start, end]: ``value`` is the right limit at ``start`` and
f(t) = value + slope * (t - start).  A jump at a breakpoint b therefore lives
between f(b) (end of the left segment) and the right limit (start of the right
one).  All finite numbers are :class:`fractions.Fraction`; +inf is ``math.inf``.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from fractions import Fraction
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

INF = math.inf

Value = Union[Fraction, float]
Number = Union[int, str, Fraction, float]


class CurveError(ValueError):
    """Raised for invalid curve data or unsupported operations."""


def value(x) -> Value:
    """Convert ``x`` to an exact :data:`Value` (Fraction or +inf)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if math.isinf(x):
            if x < 0:
                raise CurveError("-inf is not a curve value")
            return INF
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity", "+infinity"):
            return INF
        return Fraction(s)
    return Fraction(x)


def rational(x) -> Fraction:
    v = value(x)
    if v == INF:
        raise CurveError("expected a finite rational, got +inf")
    return v


def is_inf(x) -> bool:
    return x == INF


def rlcm(a: Fraction, b: Fraction) -> Fraction:
    """Least common multiple of two positive rationals."""
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    na = a.numerator * (den // a.denominator)
    nb = b.numerator * (den // b.denominator)
    return Fraction(na * nb // math.gcd(na, nb), den)


def fmt(x: Value) -> str:
    if x == INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Seg(NamedTuple):
    start: Fraction
    end: Fraction
    value: Value
    slope: Fraction

    def at(self, t) -> Value:
        if self.value == INF:
            return INF
        return self.value + self.slope * (t - self.start)

    @property
    def end_value(self) -> Value:
        return self.at(self.end)

    def shifted(self, dt, dv) -> "Seg":
        return Seg(self.start + dt, self.end + dt, self.value + dv, self.slope)


def merge_segments(segs: Sequence[Seg], keep: Iterable = ()) -> List[Seg]:
    """Merge adjacent continuous segments of equal slope (except across ``keep`` points)."""
    keep = set(keep)
    out: List[Seg] = []
    for s in segs:
        if s.end <= s.start:
            continue
        if s.value == INF:
            s = Seg(s.start, s.end, INF, Fraction(0))
        if out:
            p = out[-1]
            if p.start == s.start:
                continue
            if (
                s.start not in keep
                and p.slope == s.slope
                and p.end_value == s.value
            ) or (p.value == INF and s.value == INF and s.start not in keep):
                out[-1] = Seg(p.start, s.end, p.value, p.slope)
                continue
        out.append(s)
    return out


def cut_segments(segs: Sequence[Seg], lo, hi) -> List[Seg]:
    """Restrict segments to (lo, hi]."""
    out = []
    for s in segs:
        a, b = max(s.start, lo), min(s.end, hi)
        if a >= b:
            continue
        out.append(Seg(a, b, s.at(a) if a > s.start else s.value, s.slope))
    return out


class Curve:
    """Immutable element of the min-plus dioid of non-decreasing functions.

    Build curves with the constructors in :mod:`roadcalc.minplus` (``gamma``,
    ``delta``, ``rate_latency``, ``token_bucket``...) rather than directly.
    """

    __slots__ = ("f0", "segs", "T0", "d", "c", "_ends", "_H")

    def __init__(self, f0, segs: Sequence[Seg], T0, d, c, *, canonical: bool = True):
        f0 = value(f0)
        T0, d, c = rational(T0), rational(d), value(c)
        if d <= 0:
            raise CurveError("tail period must be positive")
        if T0 < 0:
            raise CurveError("tail start must be nonnegative")
        segs = [Seg(Fraction(s[0]), Fraction(s[1]), value(s[2]), Fraction(s[3])) for s in segs]
        if canonical:
            f0, segs, T0, d, c = _canonical(f0, segs, T0, d, c)
            _check_monotone(f0, segs, T0, c)
        self.f0, self.segs, self.T0, self.d, self.c = f0, tuple(segs), T0, d, c
        self._ends = [s.end for s in self.segs]
        self._H = T0 + d

    # -- structure ---------------------------------------------------------

    @property
    def tail_kind(self) -> str:
        if self.c == INF:
            return "infinite"
        pattern = [s for s in self.segs if s.start >= self.T0]
        if len(pattern) == 1 and pattern[0].slope * self.d == self.c:
            return "affine"
        return "periodic"

    @property
    def rate(self) -> Value:
        """Long-run growth rate c/d (+inf for an infinite tail)."""
        return INF if self.c == INF else self.c / self.d

    @property
    def horizon(self) -> Fraction:
        return self._H

    @property
    def is_eps(self) -> bool:
        return self.f0 == INF

    def breakpoints(self, H) -> List[Fraction]:
        return [s.start for s in self.segments_until(H)]

    def segments_until(self, H) -> List[Seg]:
        """Segments covering (0, H], unfolding the tail as needed."""
        H = Fraction(H)
        if H <= 0:
            return []
        if H <= self.horizon:
            return cut_segments(self.segs, 0, H)
        out = list(self.segs)
        if self.c == INF:
            last = out[-1]
            out[-1] = Seg(last.start, H, INF, Fraction(0))
            return out
        pattern = [s for s in self.segs if s.start >= self.T0]
        k = 1
        while True:
            shift = k * self.d
            if self.T0 + shift >= H:
                break
            add = k * self.c
            for s in pattern:
                out.append(s.shifted(shift, add))
            k += 1
        return cut_segments(out, 0, H)

    # -- evaluation --------------------------------------------------------

    def _reduce(self, t: Fraction) -> Tuple[Fraction, Value]:
        """Map t > T0 + d back into (T0, T0 + d]; return (t', added value)."""
        if t <= self.horizon:
            return t, Fraction(0)
        if self.c == INF:
            return t, INF
        k = math.ceil((t - self.horizon) / self.d)
        return t - k * self.d, k * self.c

    def __call__(self, t) -> Value:
        if not isinstance(t, Fraction):
            t = Fraction(t)
        if t <= 0:
            return self.f0 if t == 0 else Fraction(0)
        if t <= self._H:
            s = self.segs[bisect_left(self._ends, t)]
            return INF if s.value == INF else s.value + s.slope * (t - s.start)
        if self.c == INF:
            return INF
        k = math.ceil((t - self._H) / self.d)
        t = t - k * self.d
        s = self.segs[bisect_left(self._ends, t)]
        return s.value + s.slope * (t - s.start) + k * self.c

    def right_limit(self, t) -> Value:
        """f(t+), the limit from the right."""
        t = Fraction(t)
        if t < 0:
            return Fraction(0)
        add = Fraction(0)
        if t >= self.horizon:
            if self.c == INF:
                return INF
            k = math.floor((t - self.T0) / self.d)
            t, add = t - k * self.d, k * self.c
        i = bisect_right(self._ends, t)
        return self.segs[i].at(t) + add

    def inverse(self, y) -> Value:
        """inf{u >= 0 : f(u) >= y}; +inf if never reached."""
        if y == INF:
            return self.T0 if self.c == INF else INF
        y = Fraction(y)
        if self.f0 >= y:
            return Fraction(0)
        segs = self.segs
        base = Fraction(0)
        if self.c != INF and self.c > 0:
            top = segs[-1].end_value
            if y > top:
                k = math.ceil((y - top) / self.c)
                y -= k * self.c
                base = k * self.d
                segs = [s for s in segs if s.start >= self.T0]
        for s in segs:
            if s.value >= y:
                return base + s.start
            if s.slope > 0 and s.end_value >= y:
                return base + s.start + (y - s.value) / s.slope
        return INF

    # -- comparisons -------------------------------------------------------

    def _common_horizon(self, other: "Curve") -> Fraction:
        if self.c == INF or other.c == INF:
            return max(self.horizon, other.horizon)
        return max(self.T0, other.T0) + rlcm(self.d, other.d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Curve):
            return NotImplemented
        if self.f0 != other.f0 or self.rate != other.rate:
            return False
        H = self._common_horizon(other)
        return merge_segments(self.segments_until(H)) == merge_segments(other.segments_until(H))

    def __hash__(self):
        return hash((self.f0, self.rate))

    def __repr__(self) -> str:
        body = ", ".join(
            f"({fmt(s.start)},{fmt(s.end)}]:{fmt(s.value)}+{fmt(s.slope)}t" for s in self.segs
        )
        return (
            f"Curve(f0={fmt(self.f0)}, [{body}], tail={self.tail_kind}"
            f"(T0={fmt(self.T0)}, d={fmt(self.d)}, c={fmt(self.c)}))"
        )

    # -- operator sugar ----------------------------------------------------

    def __or__(self, other):  # f | g  ==  f (+) g
        from .minplus import min_plus_add

        return min_plus_add(self, other)

    def __mul__(self, other):  # f * g  ==  min-plus convolution
        from .minplus import conv

        return conv(self, other)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        tail = {"kind": self.tail_kind, "T0": fmt(self.T0)}
        if self.tail_kind == "affine":
            tail["slope"] = fmt(self.c / self.d)
        elif self.tail_kind == "periodic":
            tail["d"], tail["c"] = fmt(self.d), fmt(self.c)
        upto = self.T0 if self.tail_kind != "periodic" else self.horizon
        transient = [[fmt(Fraction(0)), fmt(self.f0), None]]
        for s in self.segs:
            if s.start >= upto:
                break
            transient.append([fmt(s.start), fmt(s.value), fmt(s.slope)])
        if self.tail_kind == "affine":
            last = [s for s in self.segs if s.start >= self.T0][0]
            transient.append([fmt(last.start), fmt(last.value), fmt(last.slope)])
        return {"transient": transient, "tail": tail}

    @classmethod
    def from_dict(cls, data: dict) -> "Curve":
        rows = data["transient"]
        f0 = value(rows[0][1])
        tail = data["tail"]
        T0 = rational(tail["T0"])
        kind = tail["kind"]
        pts = [(rational(r[0]), value(r[1]), rational(r[2])) for r in rows[1:]]
        if kind == "infinite":
            d, c = Fraction(1), INF
            pts.append((T0, INF, Fraction(0)))
        elif kind == "affine":
            slope = rational(tail["slope"])
            d, c = Fraction(1), slope
        elif kind == "periodic":
            d, c = rational(tail["d"]), value(tail["c"])
        else:
            raise CurveError(f"unknown tail kind {kind!r}")
        end = T0 + d
        segs = []
        for i, (a, v, s) in enumerate(pts):
            b = pts[i + 1][0] if i + 1 < len(pts) else end
            segs.append(Seg(a, b, v, s))
        return cls(f0, segs, T0, d, c)


# -- canonical form --------------------------------------------------------


def _check_monotone(f0, segs, T0, c) -> None:
    if c < 0:
        raise CurveError("a curve cannot lose value from one period to the next")
    prev = f0
    for s in segs:
        if s.value < prev or (s.value != INF and s.slope < 0):
            raise CurveError(f"curve decreases on ({fmt(s.start)}, {fmt(s.end)}]")
        prev = s.end_value
    first = next((s for s in segs if s.start == T0), None)
    if first is not None and prev > first.value + c:
        raise CurveError("curve decreases where its tail pattern repeats")


def _raw(f0, segs, T0, d, c) -> Curve:
    return Curve(f0, segs, T0, d, c, canonical=False)


def _relation_holds(f: Curve, lo, hi, shift, inc, bps=None) -> bool:
    """Check f(t + shift) == f(t) + inc on (lo, hi] using elementary intervals.

    ``bps`` may pass f's breakpoints up to at least hi + shift.
    """
    pts = {Fraction(lo), Fraction(hi)}
    for b in bps if bps is not None else f.breakpoints(hi + shift):
        if b >= hi + shift:
            break
        if lo < b < hi:
            pts.add(b)
        if lo < b - shift < hi:
            pts.add(b - shift)
    pts = sorted(pts)
    for p, q in zip(pts, pts[1:]):
        for t in (q, (p + q) / 2):
            if f(t + shift) != f(t) + inc:
                return False
    return True


def _periodic_from(segs: Sequence[Seg], T0, d, c) -> Fraction:
    """Smallest T <= T0 with f(t + d) = f(t) + c on (T, T0].

    Walks back from T0 over the overlaps of f and of f(. + d) - c, comparing
    slope and end value on each; segments are affine, so that settles it.
    """
    A = cut_segments(segs, 0, T0)
    B = [Seg(x.start - d, x.end - d, x.value - c, x.slope) for x in cut_segments(segs, d, T0 + d)]
    i, j, hi = len(A) - 1, len(B) - 1, T0
    while i >= 0 and j >= 0:
        x, y = A[i], B[j]
        if x.slope != y.slope or x.at(hi) != y.at(hi):
            return hi
        hi = max(x.start, y.start)
        if x.start >= hi:
            i -= 1
        if y.start >= hi:
            j -= 1
    return hi


def _canonical(f0, segs, T0, d, c):
    if f0 == INF:
        return INF, [Seg(Fraction(0), Fraction(1), INF, Fraction(0))], Fraction(0), Fraction(1), INF
    end = T0 + d
    if not segs or segs[0].start != 0 or segs[-1].end < end:
        raise CurveError("segments must cover (0, T0 + d]")
    for a, b in zip(segs, segs[1:]):
        if a.end != b.start:
            raise CurveError("segments must be contiguous")
    segs = cut_segments(segs, 0, end)
    # first +inf point
    first_inf = next((s.start for s in segs if s.value == INF), None)
    if c == INF and first_inf is None:
        first_inf = T0
    if first_inf is not None:
        T0, d, c = first_inf, Fraction(1), INF
        segs = cut_segments(segs, 0, T0) + [Seg(T0, T0 + 1, INF, Fraction(0))]
        return f0, merge_segments(segs, keep=[T0]), T0, d, c
    if c < 0:
        raise CurveError("tail increment must be nonnegative")
    f = _raw(f0, segs, T0, d, c)
    # detect an affine tail: the pattern is a single line of slope c/d
    pattern = merge_segments(cut_segments(segs, T0, end))
    if len(pattern) == 1 and pattern[0].slope * d == c and d != 1:
        d, c = Fraction(1), c / d
        segs = f.segments_until(T0 + 1)
        f = _raw(f0, segs, T0, d, c)
    # shrink the transient
    newT0 = _periodic_from(segs, T0, d, c)
    if newT0 != T0:
        T0 = newT0
        segs = f.segments_until(T0 + d)
        f = _raw(f0, segs, T0, d, c)
    # shrink the period
    if f.tail_kind == "periodic":
        n = len(merge_segments(cut_segments(segs, T0, T0 + d)))
        for k in range(n, 1, -1):
            if _relation_holds(f, T0, T0 + d, d / k, c / k):
                d, c = d / k, c / k
                segs = f.segments_until(T0 + d)
                break
    # split at T0 so the pattern starts at a breakpoint
    out = []
    for s in segs:
        if s.start < T0 < s.end:
            out.append(Seg(s.start, T0, s.value, s.slope))
            out.append(Seg(T0, s.end, s.at(T0), s.slope))
        else:
            out.append(s)
    return f0, merge_segments(cut_segments(out, 0, T0 + d), keep=[T0]), T0, d, c


def from_points(f0, pieces: Sequence[Tuple], tail: Optional[Tuple] = None) -> Curve:
    """Build a curve from ``(start, value, slope)`` rows.

    ``tail`` is ``("inf", T0)``, ``("affine", T0, slope)`` or
    ``("periodic", T0, d, c)``; rows must start at 0 and describe the curve on
    (0, T0 + d].
    """
    rows = [(rational(a), value(v), rational(s)) for a, v, s in pieces]
    kind = tail[0] if tail else "inf"
    if kind == "inf":
        T0 = rational(tail[1]) if tail else rows[-1][0] if rows else Fraction(0)
        d, c = Fraction(1), INF
        rows = [r for r in rows if r[0] < T0] + [(T0, INF, Fraction(0))]
    elif kind == "affine":
        T0, d, c = rational(tail[1]), Fraction(1), rational(tail[2])
    else:
        T0, d, c = rational(tail[1]), rational(tail[2]), value(tail[3])
    end = T0 + d
    segs = []
    for i, (a, v, s) in enumerate(rows):
        b = rows[i + 1][0] if i + 1 < len(rows) else max(end, a + 1)
        segs.append(Seg(a, b, v, s))
    return Curve(f0, segs, T0, d, c)
