"""
Min-plus operations on :class:`~roadcalc.curve.Curve`.

Every operation works in two stages: a tail argument fixes a finite horizon
past which the result is known to be pseudo-periodic (or +inf), then the
result is computed exactly on that horizon from the operands' segments and
handed to the canonicalizer.
"""

from __future__ import annotations

import math
from fractions import Fraction
from operator import itemgetter
from typing import Iterable, List, Sequence, Tuple

from .curve import INF, Curve, CurveError, Seg, Value, merge_segments, rational, rlcm, value

ZERO = Fraction(0)
ONE = Fraction(1)


class UnboundedError(CurveError):
    """The requested quantity is +inf for every t (e.g. a deconvolution)."""


# -- constructors ----------------------------------------------------------


def eps() -> Curve:
    """The zero element: +inf for all t >= 0."""
    return Curve(INF, [Seg(ZERO, ONE, INF, ZERO)], 0, 1, INF)


def e() -> Curve:
    """The unit element: 0 at t = 0, +inf after."""
    return gamma(0)


def gamma(p) -> Curve:
    p = value(p)
    if p != INF and p < 0:
        raise CurveError("gamma exponent must be nonnegative")
    return Curve(p, [Seg(ZERO, ONE, INF, ZERO)], 0, 1, INF)


def delta(T) -> Curve:
    return atom(0, T)


def atom(p, T) -> Curve:
    """gamma^p delta^T: p on [0, T], +inf after."""
    p, T = value(p), rational(T)
    if T < 0:
        raise CurveError("delta shift must be nonnegative")
    if T == 0:
        return gamma(p)
    return Curve(p, [Seg(ZERO, T, p, ZERO), Seg(T, T + 1, INF, ZERO)], T, 1, INF)


def rate_latency(R, T) -> Curve:
    """t -> R * max(t - T, 0)."""
    R, T = rational(R), rational(T)
    if R < 0 or T < 0:
        raise CurveError("rate and latency must be nonnegative")
    if T == 0:
        return Curve(0, [Seg(ZERO, ONE, ZERO, R)], 0, 1, R)
    return Curve(0, [Seg(ZERO, T, ZERO, ZERO), Seg(T, T + 1, ZERO, R)], T, 1, R)


def token_bucket(sigma, r) -> Curve:
    """t -> sigma + r t for t >= 0."""
    sigma, r = value(sigma), rational(r)
    if sigma == INF:
        return eps()
    if sigma < 0 or r < 0:
        raise CurveError("burst and rate must be nonnegative")
    return Curve(sigma, [Seg(ZERO, ONE, sigma, r)], 0, 1, r)


def zero() -> Curve:
    return rate_latency(0, 0)


def staircase(p, T) -> Curve:
    """(gamma^p delta^T)*: 0 at 0 and k p on ((k-1) T, k T]."""
    p, T = rational(p), rational(T)
    if T == 0:
        return e()
    if p == 0:
        return zero()
    return Curve(0, [Seg(ZERO, T, p, ZERO)], 0, T, p)


# -- helpers ---------------------------------------------------------------


def _gap(f: Curve, rate, lo=ZERO, *, sup: bool) -> Fraction:
    """sup (or inf) of f(t) - rate * t over t >= lo, f with a finite tail."""
    vals = []
    if lo == 0:
        vals.append(f.f0)
    for s in f.segs:
        if s.end <= lo:
            continue
        a = max(s.start, lo)
        vals.append(s.at(a) - rate * a if a > s.start else s.value - rate * a)
        vals.append(s.end_value - rate * s.end)
    return max(vals) if sup else min(vals)


def _lower_envelope(p, q, lines: Sequence[Tuple[Value, Fraction]]) -> List[Seg]:
    """Lower envelope on (p, q] of lines given as (value at p+, slope)."""
    lines = [ln for ln in lines if ln[0] != INF]
    if not lines:
        return [Seg(p, q, INF, ZERO)]
    a, s = min(lines)
    cur, out = p, []
    while True:
        best = None
        for aj, sj in lines:
            if sj < s:
                x = p + (aj - a) / (s - sj)
                if x > cur and (best is None or (x, sj) < best[:2]):
                    best = (x, sj, aj)
        if best is None or best[0] >= q:
            out.append(Seg(cur, q, a + s * (cur - p), s))
            return out
        x, sj, aj = best
        out.append(Seg(cur, x, a + s * (cur - p), s))
        cur, a, s = x, aj, sj


def _upper_envelope(p, q, lines) -> List[Seg]:
    if any(a == INF for a, _ in lines):
        return [Seg(p, q, INF, ZERO)]
    low = _lower_envelope(p, q, [(-a, -s) for a, s in lines])
    return [Seg(x.start, x.end, -x.value, -x.slope) for x in low]


def _pareto(lines, upper: bool) -> List[Tuple]:
    """Drop lines that start no better and never turn better."""
    out, best = [], None
    for a, k in sorted(lines, key=(lambda ln: (-ln[0], -ln[1])) if upper else None):
        # sorted best start first; keep only strictly improving slopes
        if best is None or (k > best if upper else k < best):
            out.append((a, k))
            best = k
    return out


def _scales(times, segs) -> Tuple[int, int]:
    """Common denominators: Dt for times, Dv so values and slope * dt are integers."""
    Dt = 1
    for t in times:
        Dt = math.lcm(Dt, t.denominator)
    for x in segs:
        Dt = math.lcm(Dt, x.start.denominator, x.end.denominator)
    Dv = 1
    for x in segs:
        if x.value != INF:
            Dv = math.lcm(Dv, x.value.denominator, x.slope.denominator * Dt)
    return Dt, Dv


def _int_seg(x, Dt: int, Dv: int) -> Tuple:
    """(start, end, value or None for +inf, slope) scaled to integers."""
    S, E = x.start.numerator * (Dt // x.start.denominator), x.end.numerator * (Dt // x.end.denominator)
    if x.value == INF:
        return (S, E, None, 0)
    return (S, E, x.value.numerator * (Dv // x.value.denominator), x.slope.numerator * (Dv // (x.slope.denominator * Dt)))


def _sweep(pieces: Iterable[Tuple], H, *, upper: bool = False) -> List[Seg]:
    """Envelope on (0, H] of pieces ``(A, B, value at A+, slope)`` living on (A, B]."""
    pieces = [Seg(*pc) for pc in pieces if pc[0] < H and pc[1] > 0 and pc[1] > pc[0]]
    Dt, Dv = _scales([Fraction(H)], pieces)
    return _sweep_int([_int_seg(x, Dt, Dv) for x in pieces], H, Dt, Dv, upper)


def _sweep_int(rows: List[Tuple], H, Dt: int, Dv: int, upper: bool = False) -> List[Seg]:
    """_sweep on integer rows: times over Dt, values over Dv.

    Only the lines that can appear in an envelope are turned back into
    fractions.
    """
    Hi = H.numerator * (Dt // H.denominator)
    rows = sorted((r for r in rows if r[0] < Hi and r[1] > 0 and r[1] > r[0]), key=itemgetter(0))
    pts = {0, Hi}
    for Ai, Bi, _, _ in rows:
        if Ai > 0:
            pts.add(Ai)
        if Bi < Hi:
            pts.add(Bi)
    pts = sorted(pts)
    envelope = _upper_envelope if upper else _lower_envelope
    out: List[Seg] = []
    active: List[Tuple] = []
    i = 0
    for P, Qn in zip(pts, pts[1:]):
        while i < len(rows) and rows[i][0] <= P:
            active.append(rows[i])
            i += 1
        active = [r for r in active if r[1] > P]
        p, q = Fraction(P, Dt), Fraction(Qn, Dt)
        if upper and any(r[2] is None for r in active):
            out.append(Seg(p, q, INF, ZERO))
            continue
        lines = {(vi + (P - Ai) * k, k) for Ai, _, vi, k in active if vi is not None}
        if not lines:
            out.append(Seg(p, q, ZERO if upper else INF, ZERO))
            continue
        best = [(Fraction(a, Dv), Fraction(k * Dt, Dv)) for a, k in _pareto(lines, upper)]
        out.extend(envelope(p, q, best))
    return merge_segments(out)


def _finite_segs(f: Curve, H) -> List[Seg]:
    return [s for s in f.segments_until(H) if s.value != INF]


# -- (+) -------------------------------------------------------------------


def min_plus_add(f: Curve, g: Curve) -> Curve:
    """Pointwise minimum."""
    if f.is_eps:
        return g
    if g.is_eps:
        return f
    if f.c == INF and g.c == INF:
        T0, d, c = max(f.T0, g.T0), ONE, INF
    elif f.c == INF or g.c == INF:
        fin = g if f.c == INF else f
        T0, d, c = max(f.T0, g.T0), fin.d, fin.c
    elif f.rate == g.rate:
        T0, d = max(f.T0, g.T0), rlcm(f.d, g.d)
        c = f.rate * d
    else:
        lo, hi = (f, g) if f.rate < g.rate else (g, f)
        K = _gap(lo, lo.rate, lo.T0, sup=True)
        k = _gap(hi, hi.rate, sup=False)
        T0 = max(lo.T0, hi.T0, (K - k) / (hi.rate - lo.rate))
        d, c = lo.d, lo.c
    H = T0 + d
    pieces = [(s.start, s.end, s.value, s.slope) for s in f.segments_until(H)]
    pieces += [(s.start, s.end, s.value, s.slope) for s in g.segments_until(H)]
    return Curve(min(f.f0, g.f0), _sweep(pieces, H), T0, d, c)


def min_all(curves: Iterable[Curve]) -> Curve:
    out = eps()
    for f in curves:
        out = min_plus_add(out, f)
    return out


# -- convolution -----------------------------------------------------------


def _conv_sweep(f: Curve, g: Curve, H, cap=None) -> List[Seg]:
    """Lower envelope on (0, H] of all candidate pieces of f * g.

    ``cap = (T, X)`` skips pairs where f's piece starts at or after T and g's
    piece starts at or after X; the caller guarantees those never win.
    """
    fs, gs = _finite_segs(f, H), _finite_segs(g, H)
    extra = [x for x in (f.f0, g.f0) if x != INF]
    Dt, Dv = _scales([Fraction(H)] + ([cap[0], cap[1]] if cap else []), fs + gs)
    for x in extra:
        Dv = math.lcm(Dv, x.denominator)
    F = [_int_seg(x, Dt, Dv) for x in fs]
    G = [_int_seg(y, Dt, Dv) for y in gs]
    Hi = H.numerator * (Dt // H.denominator)
    rows = []
    if f.f0 != INF:
        a = f.f0.numerator * (Dv // f.f0.denominator)
        rows += [(S, E, v + a, k) for S, E, v, k in G]
    if g.f0 != INF:
        a = g.f0.numerator * (Dv // g.f0.denominator)
        rows += [(S, E, v + a, k) for S, E, v, k in F]
    if cap is not None:
        T, X = (c.numerator * (Dt // c.denominator) for c in cap)
    for Sx, Ex, vx, kx in F:
        for Sy, Ey, vy, ky in G:
            A = Sx + Sy
            if A >= Hi or (cap is not None and Sx >= T and Sy >= X):
                break
            if kx <= ky:
                mid, klo, khi = A + (Ex - Sx), kx, ky
            else:
                mid, klo, khi = A + (Ey - Sy), ky, kx
            v = vx + vy
            rows.append((A, mid, v, klo))
            rows.append((mid, Ex + Ey, v + klo * (mid - A), khi))
    return _sweep_int(rows, H, Dt, Dv)


def conv(f: Curve, g: Curve) -> Curve:
    """Min-plus convolution (f * g)(t) = min_{0<=s<=t} f(s) + g(t - s)."""
    if f.is_eps or g.is_eps:
        return eps()
    if f.c == INF and g.c == INF:
        T0, d, c = f.T0 + g.T0, ONE, INF
    elif f.c == INF or g.c == INF:
        fin = g if f.c == INF else f
        T0, d, c = f.T0 + g.T0, fin.d, fin.c
    elif f.rate == g.rate:
        d = rlcm(f.d, g.d)
        T0, c = f.T0 + g.T0 + d, f.rate * d
    else:
        lo, hi = (f, g) if f.rate < g.rate else (g, f)
        S0 = lo.T0 + lo.d
        u0 = hi.T0 + hi.d
        K = _gap(lo, lo.rate, lo.T0, sup=True)
        k = _gap(hi, hi.rate, sup=False)
        bound = (hi.rate * S0 - k - lo.rate * u0 + K + hi(u0)) / (hi.rate - lo.rate)
        T0, d, c = max(S0 + u0, bound), lo.d, lo.c
    H = T0 + d
    cap = None
    if f.c != INF and g.c != INF:
        # Once the slower curve is periodic, moving one common period L of
        # the faster curve's share over to it never costs more, so the faster
        # curve is only needed up to its T0 + L.
        lo, hi = (f, g) if f.rate <= g.rate else (g, f)
        X = hi.T0 + rlcm(f.d, g.d)
        cap = (lo.T0, X)
        if lo is g:
            return Curve(f.f0 + g.f0, _conv_sweep(g, f, H, cap), T0, d, c)
    return Curve(f.f0 + g.f0, _conv_sweep(f, g, H, cap), T0, d, c)


def conv_all(curves: Iterable[Curve]) -> Curve:
    out = e()
    for f in curves:
        out = conv(out, f)
    return out


# -- deconvolution ---------------------------------------------------------


def _deconv_setup(f: Curve, g: Curve):
    """Return (S, T0, d, c) or raise UnboundedError; s ranges over [0, S]."""
    if f.is_eps:
        raise UnboundedError("deconvolution of eps is +inf everywhere")
    if g.c == INF:
        S = g.T0
        if f.c == INF:
            if f.T0 < g.T0:
                raise UnboundedError("deconvolution is +inf for every t")
            return S, f.T0 - g.T0, ONE, INF
        return S, f.T0, f.d, f.c
    if f.c == INF:
        raise UnboundedError("f reaches +inf while g stays finite")
    if f.rate > g.rate:
        raise UnboundedError(f"long-run rate {f.rate} exceeds {g.rate}")
    S = max(f.T0, g.T0) + rlcm(f.d, g.d)
    return S, f.T0, f.d, f.c


def _deconv_pairs(f: Curve, g: Curve, H, S) -> List[Tuple]:
    """Closed pieces (lo, hi, value at lo, slope) in t whose upper envelope is f (/) g."""
    fs = f.segments_until(H + S)
    gs = _finite_segs(g, S)
    out = []
    if g.f0 != INF:
        out += [(s.start, s.end, s.value if s.value == INF else s.value - g.f0, s.slope) for s in fs]
    for s1 in fs:
        a1, b1, v1, k1 = s1
        for a2, b2, v2, k2 in gs:
            if a1 - b2 > H:
                continue
            if v1 == INF:
                out.append((a1 - b2, b1 - a2, INF, ZERO))
                continue
            fb1 = s1.end_value
            if k1 >= k2:
                kink = b1 - b2
                lo, hi = a1 - b2, kink
                if hi > lo:
                    out.append((lo, hi, v1 + k1 * (lo + b2 - a1) - v2 - k2 * (b2 - a2), k1))
                lo2, hi2 = max(kink, a1 - b2), b1 - a2
                if hi2 >= lo2:
                    out.append((lo2, hi2, fb1 - v2 - k2 * (b1 - lo2 - a2), k2))
            else:
                kink = a1 - a2
                lo, hi = a1 - b2, kink
                if hi >= lo:
                    out.append((lo, hi, v1 - v2 - k2 * (a1 - lo - a2), k2))
                lo2, hi2 = kink, b1 - a2
                if hi2 > lo2:
                    out.append((lo2, hi2, v1 + k1 * (lo2 + a2 - a1) - v2, k1))
    return out


def _deconv_at_zero(f: Curve, g: Curve, S) -> Value:
    # piece domains are open on the left; the right end is safe since f is non-decreasing
    best = f.f0 - g.f0 if g.f0 != INF else None
    for lo, hi, v, k in _deconv_pairs(f, g, ZERO, S):
        if lo < 0 <= hi:
            x = v if v == INF else v + k * (0 - lo)
            if best is None or x > best:
                best = x
    return best


def _deconv_segs(f: Curve, g: Curve, H, S, clamp: bool) -> List[Seg]:
    pieces = [(ZERO, H, ZERO, ZERO)] if clamp else []
    for lo, hi, v, k in _deconv_pairs(f, g, H, S):
        if hi <= 0 or lo >= H:
            continue
        if lo < 0:
            v = v if v == INF else v - k * lo
            lo = ZERO
        pieces.append((lo, hi, v, k))
    return _sweep(pieces, H, upper=True)


def deconv(f: Curve, g: Curve) -> Curve:
    """Min-plus deconvolution sup_{s>=0} f(t + s) - g(s), clamped below at 0."""
    if g.is_eps:
        return zero()
    S, T0, d, c = _deconv_setup(f, g)
    at0 = _deconv_at_zero(f, g, S)
    if at0 == INF:
        raise UnboundedError("deconvolution is +inf for every t")
    if c != INF and c > 0:
        # the clamp at 0 only commutes with the tail rule once the raw value is >= 0
        raw = _deconv_segs(f, g, T0 + d, S, clamp=False)
        hT = next(x.at(T0) if x.start < T0 else x.value for x in raw if x.end > T0)
        if hT < 0:
            T0 += math.ceil(-hT / c) * d
    H = T0 + d
    f0 = max(at0 if at0 is not None else ZERO, ZERO)
    return Curve(f0, _deconv_segs(f, g, H, S, clamp=True), T0, d, c)


# -- closure ---------------------------------------------------------------


def _closure_terms(f: Curve) -> List[Curve]:
    """Split f into closure-able terms: gamma/delta atoms and one affine tail."""
    terms = [gamma(f.f0)]
    kind = f.tail_kind
    upto = f.T0 if kind != "periodic" else None
    if upto is None:
        raise CurveError("closure is supported only for mins of atoms and rate-latency/affine curves")
    for s in f.segs:
        if s.start >= upto:
            break
        if s.slope == 0:
            terms.append(atom(s.value, s.end))
    if kind == "affine":
        vT, r = f.right_limit(f.T0), f.rate
        if r > 0 and vT - r * f.T0 <= 0:
            terms.append(rate_latency(r, f.T0 - vT / r))
        else:
            terms.append(token_bucket(vT - r * f.T0, r) if vT - r * f.T0 >= 0 else token_bucket(vT, r))
    if min_all(terms) != f:
        raise CurveError(
            "closure is supported only for mins of gamma/delta atoms and rate-latency/affine curves"
        )
    return terms


def _closure_term(t: Curve) -> Curve:
    if t.tail_kind == "infinite":
        seg = t.segs[0]
        if seg.value == INF:  # gamma^p
            return e()
        return staircase(seg.value, seg.end)
    # affine term: rate-latency (f(0) = 0) or token bucket
    if t.f0 == 0 and t.right_limit(0) == 0:
        if t.T0 > 0 or t.rate == 0:
            return zero()
        return t
    return min_plus_add(e(), Curve(0, [Seg(ZERO, ONE, t.right_limit(0), t.rate)], 0, 1, t.rate))


def closure(f: Curve) -> Curve:
    """Additive closure f* = e (+) f (+) f^2 (+) ...

    Supported for finite mins of gamma^p delta^T atoms and rate-latency or
    token-bucket curves, through (f (+) g)* = f* * g*.
    """
    if f.is_eps:
        return e()
    return conv_all(_closure_term(t) for t in _closure_terms(f))


# -- gains, residuals ------------------------------------------------------


def positive_shift(f: Curve, a) -> Curve:
    """t -> max(f(t) - a, 0)."""
    a = rational(a)
    if a < 0:
        raise CurveError("shift must be nonnegative")
    if a == 0 or f.is_eps:
        return f
    T0, d, c = f.T0, f.d, f.c
    if c != INF:
        x = f.inverse(a)
        if x == INF:
            return zero()
        T0 = max(T0, x)
    out = []
    for s in f.segments_until(T0 + d):
        if s.value == INF:
            out.append(s)
            continue
        v0, v1 = s.value - a, s.end_value - a
        if v0 >= 0:
            out.append(Seg(s.start, s.end, v0, s.slope))
        elif v1 <= 0:
            out.append(Seg(s.start, s.end, ZERO, ZERO))
        else:
            x = s.start - v0 / s.slope
            out += [Seg(s.start, x, ZERO, ZERO), Seg(x, s.end, ZERO, s.slope)]
    f0 = f.f0 if f.f0 == INF else max(f.f0 - a, ZERO)
    return Curve(f0, out, T0, d, c)


def lift(f: Curve, a) -> Curve:
    """f + a for t > 0, f(0) unchanged."""
    a = rational(a)
    return Curve(f.f0, [Seg(s.start, s.end, s.value + a, s.slope) for s in f.segs], f.T0, f.d, f.c)


def _raw_difference(f: Curve, g: Curve, H) -> List[Tuple]:
    """(p, q, value at p+, slope) of f - g on (0, H]; value +inf where f is."""
    pts = sorted({s.start for s in f.segments_until(H)} | {s.start for s in g.segments_until(H)} | {H})
    out = []
    for p, q in zip(pts, pts[1:]):
        x = (p + q) / 2
        fv = f(x)
        if fv == INF:
            out.append((p, q, INF, ZERO))
            continue
        fr, gr = f.right_limit(p), g.right_limit(p)
        out.append((p, q, fr - gr, (fv - fr - g(x) + gr) / (x - p)))
    return out


def residual(f: Curve, g: Curve) -> Curve:
    """Largest non-decreasing minorant of [f - g]^+, i.e. t -> inf_{u>=t} [f(u) - g(u)]^+."""
    if g.is_eps or g.c == INF:
        return zero()
    if f.is_eps:
        return eps()
    if f.c == INF:
        T0, L, c = f.T0, ONE, INF
    else:
        if f.rate <= g.rate:
            return zero()
        L = rlcm(f.d, g.d)
        T0 = max(f.T0, g.T0)
        c = (f.rate - g.rate) * L
        # the clamp commutes with the tail rule only where f - g >= 0
        low = min(
            min(v, v + k * (q - p))
            for p, q, v, k in _raw_difference(f, g, T0 + L)
            if q > T0
        )
        if low < 0:
            T0 += math.ceil(-low / c) * L
    H = T0 + 2 * L
    diff = []
    for p, q, v0, slope in _raw_difference(f, g, H):
        if v0 == INF:
            diff.append(Seg(p, q, INF, ZERO))
            continue
        v1 = v0 + slope * (q - p)
        if v0 >= 0 and v1 >= 0:
            diff.append(Seg(p, q, v0, slope))
        elif v0 <= 0 and v1 <= 0:
            diff.append(Seg(p, q, ZERO, ZERO))
        else:
            z = p - v0 / slope
            if v0 < 0:
                diff += [Seg(p, z, ZERO, ZERO), Seg(z, q, ZERO, slope)]
            else:
                diff += [Seg(p, z, v0, slope), Seg(z, q, ZERO, ZERO)]
    # backward running infimum
    m: Value = INF
    out: List[Seg] = []
    for s in reversed(diff):
        if s.value == INF:
            out.append(s if m == INF else Seg(s.start, s.end, m, ZERO))
            continue
        if s.slope >= 0:
            if s.end_value <= m:
                out.append(s)
            elif s.value >= m:
                out.append(Seg(s.start, s.end, m, ZERO))
            else:
                x = s.start + (m - s.value) / s.slope
                out += [Seg(x, s.end, m, ZERO), Seg(s.start, x, s.value, s.slope)]
            m = min(m, s.value)
        else:
            low = min(s.end_value, m)
            out.append(Seg(s.start, s.end, low, ZERO))
            m = low
    out.reverse()
    f0 = min(max(f.f0 - g.f0, ZERO), m)
    return Curve(f0, out, T0, L, c)


# -- deviations ------------------------------------------------------------


def vdev(alpha: Curve, beta: Curve) -> Value:
    """Vertical deviation sup_{t>=0} alpha(t) - beta(t), floored at 0."""
    if beta.is_eps:
        return ZERO
    try:
        S, *_ = _deconv_setup(alpha, beta)
    except UnboundedError:
        return INF
    v = _deconv_at_zero(alpha, beta, S)
    return ZERO if v is None else max(v, ZERO)


def _inverse_strict(f: Curve, y) -> Value:
    """inf{u >= 0 : f(u) > y}."""
    if f.f0 > y:
        return ZERO
    segs, base = f.segs, ZERO
    if f.c != INF and f.c > 0:
        top = segs[-1].end_value
        if y >= top:
            k = math.floor((y - top) / f.c) + 1
            y, base = y - k * f.c, k * f.d
            segs = [s for s in segs if s.start >= f.T0]
    for s in segs:
        if s.value > y:
            return base + s.start
        if s.slope > 0 and s.end_value > y:
            return base + s.start + (y - s.value) / s.slope
    return INF


def hdev(alpha: Curve, beta: Curve) -> Value:
    """Horizontal deviation sup_{t>=0} inf{h >= 0 : alpha(t) <= beta(t + h)}."""
    if beta.is_eps:
        return ZERO
    if alpha.is_eps:
        x = beta.inverse(INF)
        return x
    if alpha.c == INF:
        if beta.c != INF:
            return INF
        H = alpha.T0
        tail_val = beta.inverse(INF) - alpha.T0
    else:
        tail_val = None
        if beta.c == INF:
            H = max(beta.T0, alpha.horizon)
        elif alpha.rate > beta.rate:
            return INF
        elif alpha.rate < beta.rate:
            K = _gap(alpha, alpha.rate, sup=True)
            k = _gap(beta, beta.rate, sup=False)
            H = max((K - k) / (beta.rate - alpha.rate), alpha.horizon, beta.horizon)
        elif alpha.rate == 0:
            H = max(alpha.horizon, beta.horizon)
        else:
            tp = max(alpha.T0, _inverse_strict(alpha, beta(beta.T0)))
            H = tp + rlcm(alpha.d, beta.d) + alpha.d

    def D(t):
        y = alpha(t)
        x = beta.inverse(y)
        return INF if x == INF else x - t

    top = alpha(H)
    if top == INF:
        top = max(s.end_value for s in alpha.segments_until(H) if s.value != INF) if any(
            s.value != INF for s in alpha.segments_until(H)
        ) else alpha.f0
    bH = beta.inverse(top) if top != INF else INF
    bH = beta.horizon if bH == INF else bH + beta.d
    levels = {beta.f0}
    for s in beta.segments_until(max(bH, beta.horizon)):
        if s.value != INF:
            levels.add(s.value)
            levels.add(s.end_value)
    cands = {ZERO, H} | {s.start for s in alpha.segments_until(H)}
    for y in levels:
        if y == INF:
            continue
        for x in (alpha.inverse(y), _inverse_strict(alpha, y)):
            if x != INF and 0 <= x <= H:
                cands.add(x)
    cands = sorted(cands)
    best = ZERO
    for t in cands:
        v = D(t)
        if v == INF:
            return INF
        best = max(best, v)
    for p, q in zip(cands, cands[1:]):
        x1, x2 = p + (q - p) / 3, p + 2 * (q - p) / 3
        d1, d2 = D(x1), D(x2)
        if d1 == INF or d2 == INF:
            return INF
        best = max(best, 2 * d1 - d2, 2 * d2 - d1)
    if tail_val is not None:
        best = max(best, tail_val)
    return best
