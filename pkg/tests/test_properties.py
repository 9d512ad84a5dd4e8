"""Randomized algebra properties: dioid laws, closure identities and oracle agreement.

Each property runs on N seeded cases.  Failing cases are collected and the
first few reported, so a red test says how often and where.
"""

from fractions import Fraction as Q

from gen import cases, random_atom, random_closable, random_curve
from roadcalc import (
    INF,
    UnboundedError,
    closure,
    conv,
    deconv,
    e,
    eps,
    hdev,
    min_plus_add,
    positive_shift,
    vdev,
)
from roadcalc import oracle
from roadcalc.curve import rlcm

N = 500
STEP = Q(1, 4)


def run(n, seed, check):
    bad = []
    for i, rng in cases(n, seed):
        msg = check(rng)
        if msg:
            bad.append(f"case {i}: {msg}")
    assert not bad, f"{len(bad)}/{n} cases failed:\n" + "\n".join(bad[:5])


def horizon(*fs, extra=2):
    return max(f.T0 for f in fs) + 3 * max(f.d for f in fs) + extra


def window(*fs, extra=1):
    """Latest transient plus one common period: past it f - g only repeats or drifts down."""
    L = fs[0].d
    for f in fs[1:]:
        L = rlcm(L, f.d)
    return max(f.T0 for f in fs) + L + extra


def grid_diff(f, g, H, step=STEP):
    for t in oracle.grid(step, H):
        if f(t) != g(t):
            return t
    return None


# -- dioid laws ------------------------------------------------------------


def test_dioid_laws():
    def check(rng):
        f, g, h = random_curve(rng), random_curve(rng), random_curve(rng)
        add, mul = min_plus_add, conv
        if add(f, g) != add(g, f):
            return f"(+) not commutative for {f}, {g}"
        if add(add(f, g), h) != add(f, add(g, h)):
            return "(+) not associative"
        if add(f, f) != f or add(f, eps()) != f:
            return f"(+) idempotence or zero fails for {f}"
        fg = mul(f, g)
        if fg != mul(g, f):
            return f"(*) not commutative for {f}, {g}"
        if mul(fg, h) != mul(f, mul(g, h)):
            return f"(*) not associative for {f}, {g}, {h}"
        if mul(f, e()) != f or not mul(f, eps()).is_eps:
            return f"unit or absorbing element fails for {f}"
        if mul(f, add(g, h)) != add(fg, mul(f, h)):
            return f"(*) does not distribute over (+) for {f}, {g}, {h}"
        return None

    run(N, 1, check)


# -- closure identities ----------------------------------------------------


def test_closure_below_f():
    def check(rng):
        f = random_closable(rng)
        fs = closure(f)
        ffs = conv(f, fs)
        H = horizon(f, fs, ffs)
        for t in oracle.grid(STEP, H):
            if not fs(t) <= ffs(t) <= f(t):
                return f"f* <= f * f* <= f fails at t={t} for {f}"
        return None

    run(N, 2, check)


def test_closure_absorbs_when_f0_zero():
    def check(rng):
        f = random_closable(rng)
        if f(0) != 0:
            f = min_plus_add(f, e())
        fs = closure(f)
        t = grid_diff(conv(f, fs), fs, horizon(f, fs))
        return f"f * f* != f* at t={t} for {f}" if t is not None else None

    run(N, 3, check)


def test_closure_of_min_is_product():
    def check(rng):
        f, g = random_atom(rng), random_atom(rng)
        lhs, rhs = closure(min_plus_add(f, g)), conv(closure(f), closure(g))
        return f"(f (+) g)* != f* * g* for {f}, {g}" if lhs != rhs else None

    run(N, 4, check)


def test_positive_part_moves_inside_convolution():
    def check(rng):
        f, g = random_curve(rng), random_curve(rng)
        a = Q(rng.choice([1, 2, 3, 4])) / 2
        lhs = positive_shift(conv(f, g), a)
        rhs = conv(f, positive_shift(g, a))
        t = grid_diff(lhs, rhs, horizon(f, g, lhs, rhs))
        return f"a={a} f={f} g={g}: {lhs(t)} != {rhs(t)} at t={t}" if t is not None else None

    run(N, 5, check)


def test_positive_part_inequality_holds():
    # what does survive: [(f * g) - a]^+ <= f * [g - a]^+
    def check(rng):
        f, g = random_curve(rng), random_curve(rng)
        a = Q(rng.choice([1, 2, 3, 4])) / 2
        lhs = positive_shift(conv(f, g), a)
        rhs = conv(f, positive_shift(g, a))
        for t in oracle.grid(STEP, horizon(f, g, lhs, rhs)):
            if lhs(t) > rhs(t):
                return f"a={a} f={f} g={g} at t={t}"
        return None

    run(N, 5, check)


def test_unit_plus_product_is_closure():
    def check(rng):
        f = random_closable(rng)
        fs = closure(f)
        return f"e (+) f * f* != f* for {f}" if min_plus_add(e(), conv(f, fs)) != fs else None

    run(N, 6, check)


def test_staircase_lies_above_its_rate_line():
    def check(rng):
        p = Q(rng.randint(1, 8), rng.choice([1, 2, 4]))
        T = Q(rng.randint(1, 12), rng.choice([1, 2, 3]))
        from roadcalc import atom

        s = closure(atom(p, T))
        H = 6 * T
        pts = set(oracle.grid(T / 4, H)) | {x.start for x in s.segments_until(H)}
        for t in sorted(pts):
            if s(t) < p * t / T or s.right_limit(t) < p * t / T:
                return f"p={p} T={T} t={t}"
        return None

    run(N, 7, check)


# -- oracle agreement ------------------------------------------------------


def test_conv_matches_grid_oracle():
    def check(rng):
        f, g = random_curve(rng), random_curve(rng)
        c = conv(f, g)
        H = min(horizon(f, g, c), 40)
        ref = oracle.conv_grid(f, g, STEP, H)
        for t, r in zip(oracle.grid(STEP, H), ref):
            if c(t) != r:
                return f"{f} * {g} at t={t}: {c(t)} vs {r}"
        return None

    run(N, 11, check)


def test_deconv_matches_grid_oracle():
    def check(rng):
        f, g = random_curve(rng), random_curve(rng)
        try:
            dd = deconv(f, g)
        except UnboundedError:
            # unbounded exactly when f outgrows g or g stops at a finite level f exceeds
            return None if oracle.deconv_at(f, g, 0, STEP, horizon(f, g, extra=8)) == INF or f.rate > g.rate else (
                f"deconv raised for {f} (/) {g}"
            )
        S = window(f, g, dd)
        H = min(horizon(dd), 12)
        for t, r in zip(oracle.grid(STEP, H), oracle.deconv_grid(f, g, STEP, H, S)):
            if dd(t) != r:
                return f"{f} (/) {g} at t={t}: {dd(t)} vs {r}"
        return None

    run(N, 12, check)


def test_closure_matches_grid_oracle():
    def check(rng):
        f = random_closable(rng)
        fs = closure(f)
        H = min(horizon(f, fs), 16)
        # enough powers: the smallest positive jump or slope climbs past H's values
        ref = oracle.closure_grid(f, STEP, H, K=int(4 * H) + 2)
        for t, r in zip(oracle.grid(STEP, H), ref):
            if fs(t) != r:
                return f"closure of {f} at t={t}: {fs(t)} vs {r}"
        return None

    run(N, 13, check)


def test_hdev_matches_grid_oracle():
    def check(rng):
        f, g = random_curve(rng), random_curve(rng)
        h = hdev(f, g)
        if f.rate > g.rate:
            return None if h == INF else f"finite hdev {h} with faster arrival {f}, {g}"
        # the search window for beta only needs to reach past the claimed lag
        S = window(f, g)
        r = oracle.hdev_grid(f, g, STEP, S, S + (h if h != INF else 0) + 2)
        return f"hdev({f}, {g}) = {h}, grid {r}" if h != r else None

    run(N, 14, check)


def test_vdev_matches_grid_oracle():
    def check(rng):
        f, g = random_curve(rng), random_curve(rng)
        v = vdev(f, g)
        if f.rate > g.rate:
            return None if v == INF else f"finite vdev {v} with faster arrival"
        r = oracle.vdev_grid(f, g, STEP, window(f, g))
        return f"vdev({f}, {g}) = {v}, grid {r}" if v != r else None

    run(N, 15, check)
