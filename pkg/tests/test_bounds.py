from fractions import Fraction as Q
import random
import time

from roadcalc import oracle, rate_latency, token_bucket
from roadcalc.bounds import (
    AffineArrival,
    backlog_bound,
    couple_bounds,
    delay_bound,
    output_arrival,
    relaxed_bounds,
    road_bounds,
    tau_max_density,
)
from roadcalc.curve import INF
from roadcalc.road import ServiceCouple, avg_travel_time, example_road

ROAD = example_road()


def test_travel_time_sweep():
    start = time.perf_counter()
    strict = []
    for k in range(1, 60):
        rho = Q(k, 60)
        tau, tau_max = avg_travel_time(ROAD, rho), tau_max_density(ROAD, rho)
        assert road_bounds(ROAD, rho, AffineArrival(0, 0)).tau_max == tau_max
        if Q(1, 4) < rho < Q(1, 2):
            assert tau_max > tau, rho
            strict.append(rho)
        else:
            assert tau_max == tau, rho
    assert len(strict) == 14
    assert time.perf_counter() - start < 1


def test_example1_bounds_at_critical_density():
    rep = road_bounds(ROAD, Q(1, 3), AffineArrival(0, Q(1, 3)))
    assert rep.tau_max == 8 and rep.b_max == Q(8, 3)


def test_closed_forms_match_generic_operators():
    for rho in [Q(1, 6), Q(1, 4), Q(1, 3), Q(2, 5), Q(1, 2), Q(3, 4)]:
        alpha = AffineArrival(Q(3, 2), Q(1, 10))
        a, b = road_bounds(ROAD, rho, alpha), relaxed_bounds(ROAD, rho, alpha)
        assert (a.tau_max, a.b_max) == (b.tau_max, b.b_max), rho
        assert a.output_arrival == b.output_arrival


def test_overload_is_unbounded_not_an_error():
    rep = couple_bounds(AffineArrival(1, 1), ServiceCouple(rate_latency(Q(1, 2), 1), rate_latency(Q(1, 2), 1)))
    assert rep.tau_max == INF and rep.b_max == INF and rep.output_arrival is None and rep.note


def _tb_rl_cases(n=60, seed=7):
    rng = random.Random(seed)
    for _ in range(n):
        R = Q(rng.choice([1, 2, 4]), 2)
        r = R * Q(rng.randint(0, 3), 4)
        sigma = Q(rng.randint(0, 6), 2)
        T = Q(rng.randint(0, 12), 4)
        if sigma == 0 and r == 0:
            # zero arrivals never wait; the closed form assumes a real bucket
            sigma = Q(1, 2)
        yield sigma, r, R, T


def test_token_bucket_rate_latency_closed_forms():
    for sigma, r, R, T in _tb_rl_cases():
        alpha, couple = token_bucket(sigma, r), ServiceCouple(rate_latency(R, T), rate_latency(R, T))
        assert delay_bound(alpha, couple) == T + sigma / R
        assert backlog_bound(alpha, couple) == sigma + r * T
        assert output_arrival(alpha, couple) == token_bucket(sigma + r * T, r)


def test_token_bucket_rate_latency_grid_oracle():
    step = Q(1, 4)
    for sigma, r, R, T in _tb_rl_cases():
        alpha, beta = token_bucket(sigma, r), rate_latency(R, T)
        S = T + 3
        assert oracle.hdev_grid(alpha, beta, step, S, S + T + sigma / R + 2) == T + sigma / R
        assert oracle.vdev_grid(alpha, beta, step, S) == sigma + r * T
        out = oracle.deconv_grid(alpha, beta, step, 6, S)
        for t, v in zip(oracle.grid(step, 6), out):
            assert v == sigma + r * T + r * t, (sigma, r, R, T, t)
