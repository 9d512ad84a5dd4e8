from fractions import Fraction as Q
import time

import pytest

from roadcalc import CurveError, atom, closure, conv, min_plus_add, oracle, positive_shift
from roadcalc.road import (
    Counts,
    RingRoad,
    atom_a,
    autonomous_flow,
    avg_travel_time,
    example_road,
    fundamental_flow,
    q_max,
    service_couple_exact,
    service_couple_relaxed,
    service_couple_theorem1,
)

ROAD = example_road()


def expected_example1():
    s3, s6, s12 = closure(atom(1, 3)), closure(atom(1, 6)), closure(atom(3, 12))
    b1 = positive_shift(s6, 1)
    b2 = positive_shift(s3, 2)
    b3 = positive_shift(conv(s3, s12), 3)
    return {
        Q(1, 6): (b1, b1),
        Q(1, 3): (b2, min_plus_add(min_plus_add(b2, atom(0, 8)), atom(1, 10))),
        Q(1, 2): (b3, b3),
    }


def test_example1_couples_exact():
    start = time.perf_counter()
    for rho, (beta, lam) in expected_example1().items():
        c = service_couple_theorem1(ROAD, rho)
        assert c.beta == beta, rho
        assert c.lam == lam, rho
    assert time.perf_counter() - start < 1


@pytest.mark.parametrize("rho", [Q(1, 6), Q(1, 3), Q(1, 2)])
def test_theorem1_beta_matches_dense_grid(rho):
    # literal formula, with the closure taken by brute force on a grid
    N = 6 * rho
    step, H = Q(1, 2), 40
    star = oracle.closure_grid(atom_a(ROAD, rho), step, H, K=int(H) + 2)
    beta = service_couple_theorem1(ROAD, rho).beta
    for t, s in zip(oracle.grid(step, H), star):
        assert beta(t) == max(s - N, 0), t


def test_fundamental_diagram():
    assert fundamental_flow(ROAD, Q(1, 6)) == Q(1, 6)
    assert fundamental_flow(ROAD, Q(1, 2)) == Q(1, 4)
    assert q_max(ROAD) == Q(1, 3)
    assert ROAD.rho_c == Q(1, 3)
    assert autonomous_flow(ROAD, Counts.uniform(ROAD, Q(1, 3))) == Q(1, 3)


def test_travel_time():
    assert avg_travel_time(ROAD, Q(1, 6)) == 6
    assert avg_travel_time(ROAD, Q(1, 2)) == 12
    with pytest.raises(CurveError):
        avg_travel_time(ROAD, 0)


def test_exact_couple_agrees_at_uniform_counts_to_within_one_period():
    # the per-section couple can only be larger than the density one
    for rho in [Q(1, 6), Q(1, 3), Q(1, 2)]:
        loose = service_couple_theorem1(ROAD, rho)
        tight = service_couple_exact(ROAD, Counts.uniform(ROAD, rho))
        for t in oracle.grid(Q(1, 2), 40):
            assert tight.lam(t) >= loose.lam(t) or tight.beta(t) >= loose.beta(t)


def test_relaxed_couple_lies_below_theorem1():
    for rho in [Q(1, 6), Q(1, 3), Q(1, 2)]:
        exact = service_couple_theorem1(ROAD, rho).total
        relaxed = service_couple_relaxed(ROAD, rho).total
        for t in oracle.grid(Q(1, 2), 60):
            assert relaxed(t) <= exact(t), (rho, t)


def test_invalid_roads():
    with pytest.raises(CurveError):
        RingRoad(2, 1, 1, 1, 1)
    with pytest.raises(CurveError):
        RingRoad(6, 1, 0, 1, 1)
    with pytest.raises(CurveError):
        service_couple_theorem1(ROAD, Q(3, 2))
    with pytest.raises(CurveError):
        Counts((Q(1, 2),) * 5).validate(ROAD)
