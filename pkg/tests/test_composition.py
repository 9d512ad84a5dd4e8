from fractions import Fraction as Q
import random
import time

import numpy as np
import pytest

from gen import random_curve
from roadcalc import INF, conv, min_plus_add, oracle, rate_latency, token_bucket
from roadcalc.bounds import AffineArrival, delay_bound
from roadcalc.composition import (
    Edge,
    Merge,
    NetworkError,
    RoadNetwork,
    identity_couple,
    path_service,
    path_travel_time_bound,
    residual_merge,
    series,
)
from roadcalc.ctm import CoupleGrid, simulate_scaled, violations
from roadcalc.road import Counts, ServiceCouple, example_road, service_couple_theorem1
from roadcalc.soundness import COUPLES, default_arrival, random_inflow

ROAD = example_road()
DENSITIES = [Q(1, 6), Q(1, 3), Q(1, 2)]


def test_identity_server_is_neutral():
    for rho in DENSITIES:
        c = service_couple_theorem1(ROAD, rho)
        for s in (series(c, identity_couple()), series(identity_couple(), c)):
            assert s.beta == c.beta and s.lam == c.lam


def _grid_conv(a, b):
    return [min(a[j] + b[k - j] for j in range(k + 1)) for k in range(len(a))]


def test_series_matches_end_to_end_on_random_triples():
    start = time.perf_counter()
    step, H = Q(1, 2), 16
    rng = random.Random(21)
    for i in range(50):
        b1, l1, b2, l2, U = (random_curve(rng, f0_zero=True) for _ in range(5))
        # exact: b1 * (b2 * U (+) l2) (+) l1 == (b1 * b2) * U (+) (b1 * l2 (+) l1)
        lhs = min_plus_add(conv(b1, min_plus_add(conv(b2, U), l2)), l1)
        s = series(ServiceCouple(b1, l1), ServiceCouple(b2, l2))
        rhs = min_plus_add(conv(s.beta, U), s.lam)
        assert lhs == rhs, i
        # the same identity with every operator replaced by its grid version
        g = {k: [f(t) for t in oracle.grid(step, H)] for k, f in dict(b1=b1, l1=l1, b2=b2, l2=l2, U=U).items()}
        inner = [min(x, y) for x, y in zip(_grid_conv(g["b2"], g["U"]), g["l2"])]
        left = [min(x, y) for x, y in zip(_grid_conv(g["b1"], inner), g["l1"])]
        lam = [min(x, y) for x, y in zip(_grid_conv(g["b1"], g["l2"]), g["l1"])]
        right = [min(x, y) for x, y in zip(_grid_conv(_grid_conv(g["b1"], g["b2"]), g["U"]), lam)]
        assert left == right, i
    assert time.perf_counter() - start < 30


def _tandem(rho, name, runs=50, dt=Q(1, 2), horizon=80, seed=1):
    """Runs where the composed couple is violated, and those where a single road's couple is."""
    K = int(horizon / dt)
    c = COUPLES[name](ROAD, rho)
    one, both = CoupleGrid(c, dt, K), CoupleGrid(series(c, c), dt, K)
    alpha, occ = default_arrival(ROAD, rho), Counts.uniform(ROAD, rho)
    rng = np.random.default_rng(seed)
    composed, stage = [], []
    for i in range(runs):
        U, us = random_inflow(rng, alpha, dt, horizon)
        first = simulate_scaled(ROAD, occ, dt, U, us)
        second = simulate_scaled(ROAD, occ, dt, first.Z, first.scale)
        if violations(second, U, us, both):
            composed.append(i)
        if violations(first, U, us, one) or violations(second, first.Z, first.scale, one):
            stage.append(i)
    return composed, stage


@pytest.mark.parametrize("name", sorted(COUPLES))
@pytest.mark.parametrize("rho", DENSITIES)
def test_tandem_never_violates_composed_couple(rho, name):
    composed, stage = _tandem(rho, name)
    assert not composed, f"{len(composed)}/50 tandem runs violate the composed couple ({len(stage)} violate a single road)"


@pytest.mark.parametrize("name", sorted(COUPLES))
@pytest.mark.parametrize("rho", DENSITIES)
def test_composition_adds_no_violations(rho, name):
    composed, stage = _tandem(rho, name)
    assert set(composed) <= set(stage)


# -- networks --------------------------------------------------------------


def _net(merges=()):
    edges = {
        "AB": Edge("AB", "A", "B", ROAD, Q(1, 6)),
        "DB": Edge("DB", "D", "B", ROAD, Q(1, 6)),
        "BC": Edge("BC", "B", "C", ROAD, Q(1, 4), "relaxed"),
    }
    return RoadNetwork(edges, {m.node: m for m in merges})


def test_zero_cross_traffic_leaves_the_path_unchanged():
    plain = path_service(_net(), ["AB", "BC"])
    merged = path_service(_net([Merge("B", token_bucket(0, 0))]), ["AB", "BC"])
    assert plain.beta == merged.beta and plain.lam == merged.lam


def test_cross_traffic_only_delays():
    alpha = AffineArrival(1, Q(1, 40))
    free = path_travel_time_bound(_net(), ["AB", "BC"], alpha)
    busy = path_travel_time_bound(_net([Merge("B", token_bucket(1, Q(1, 40)))]), ["AB", "BC"], alpha)
    assert free < busy < INF


def test_saturating_cross_traffic_gives_no_bound():
    net = _net([Merge("B", token_bucket(1, 1))])
    assert path_travel_time_bound(net, ["AB", "BC"], AffineArrival(1, Q(1, 40))) == INF


def test_residual_of_rate_latency():
    c = ServiceCouple(rate_latency(1, 2), rate_latency(1, 2))
    r = residual_merge(c, token_bucket(1, Q(1, 2)))
    assert r.beta == rate_latency(Q(1, 2), 6)


def test_path_delay_matches_series_by_hand():
    net = _net()
    c = series(net.edges["BC"].couple(), net.edges["AB"].couple())
    alpha = AffineArrival(1, Q(1, 40))
    assert path_travel_time_bound(net, ["AB", "BC"], alpha) == delay_bound(alpha, c)


def test_cycles_and_bad_paths_rejected():
    edges = {
        "XY": Edge("XY", "X", "Y", ROAD, Q(1, 6)),
        "YX": Edge("YX", "Y", "X", ROAD, Q(1, 6)),
    }
    with pytest.raises(NetworkError):
        RoadNetwork(edges)
    net = _net()
    with pytest.raises(NetworkError):
        net.check_path(["AB", "DB"])
    with pytest.raises(NetworkError):
        net.check_path(["AB", "nope"])
    with pytest.raises(NetworkError):
        _net([Merge("Q", token_bucket(1, 1))])
