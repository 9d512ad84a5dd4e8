"""
Randomized soundness runs: simulate the ring under admissible inflows and
compare the outflow with a service couple and its delay bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .bounds import AffineArrival, delay_bound
from .ctm import CoupleGrid, delays_scaled, inflated, simulate_scaled, violations
from .curve import INF, fmt, rational
from .road import (
    Counts,
    RingRoad,
    ServiceCouple,
    fundamental_flow,
    service_couple_relaxed,
    service_couple_theorem1,
)

COUPLES = {"theorem1": service_couple_theorem1, "relaxed": service_couple_relaxed}


def random_inflow(rng: np.random.Generator, alpha: AffineArrival, dt, horizon) -> Tuple[np.ndarray, int]:
    """Piecewise-constant-rate input with bursts, shaped so alpha is an arrival curve.

    Rates are drawn from {0, r/4, ..., r}; bursts of up to sigma are spread
    over one step.  The result is min over s of U'(s) + (e (+) alpha)(t - s)
    on the grid, which stays below U' and respects alpha.  Returned as
    integers over a common scale.
    """
    dt, horizon = rational(dt), rational(horizon)
    K = int(horizon / dt)
    r, sigma = alpha.r, alpha.sigma
    den = math.lcm(4 * r.denominator, dt.denominator, 4 * Fraction(sigma).denominator)
    scale = math.lcm(den, (r * dt).denominator * 4)
    raw = np.zeros(K + 1, dtype=np.int64)
    k, level = 0, 0
    while k < K:
        length = int(rng.integers(2, 21))
        rate = r * Fraction(int(rng.integers(0, 5)), 4)
        inc = int(rate * dt * scale)
        for j in range(k + 1, min(K, k + length) + 1):
            level += inc
            raw[j] = level
        k = min(K, k + length)
        if sigma > 0 and k < K and rng.random() < 0.3:
            jump = int(sigma * Fraction(int(rng.integers(1, 5)), 4) * scale)
            k += 1
            level += jump
            raw[k] = level
    # shape: alpha'(0) = 0, alpha'(i dt) = sigma + r i dt
    A = np.array([0] + [int((sigma + r * i * dt) * scale) for i in range(1, K + 1)], dtype=np.int64)
    U = np.array([np.min(raw[: i + 1] + A[i::-1]) for i in range(K + 1)], dtype=np.int64)
    return U, scale


@dataclass
class CaseResult:
    rho: Fraction
    couple: str
    runs: int = 0
    couple_violations: int = 0
    runs_violating: int = 0
    delay_excess: int = 0
    worst_delay: Fraction = Fraction(0)
    bound: object = INF
    first: List = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.couple_violations == 0 and self.delay_excess == 0

    def to_dict(self) -> dict:
        return {
            "rho": fmt(self.rho),
            "couple": self.couple,
            "runs": self.runs,
            "couple_violations": self.couple_violations,
            "runs_violating": self.runs_violating,
            "delay_excess": self.delay_excess,
            "worst_delay": fmt(self.worst_delay),
            "delay_bound": fmt(self.bound),
            "first_violation": self.first,
        }


def run_case(
    road: RingRoad,
    rho,
    couple_name: str,
    alpha: AffineArrival,
    runs: int,
    seed: int,
    dt,
    horizon,
    negative_control: bool = False,
) -> CaseResult:
    rho, dt, horizon = rational(rho), rational(dt), rational(horizon)
    couple: ServiceCouple = COUPLES[couple_name](road, rho)
    if negative_control:
        couple = inflated(couple, 1)
    bound = delay_bound(alpha, couple)
    occ = Counts.uniform(road, rho)
    rng = np.random.default_rng(seed)
    res = CaseResult(rho, couple_name, bound=bound)
    grid = CoupleGrid(couple, dt, int(horizon / dt))
    for _ in range(runs):
        U, us = random_inflow(rng, alpha, dt, horizon)
        trace = simulate_scaled(road, occ, dt, U, us)
        bad = violations(trace, U, us, grid)
        res.runs += 1
        res.couple_violations += len(bad)
        res.runs_violating += bool(bad)
        if bad and not res.first:
            v = bad[0]
            res.first = [fmt(v.t), fmt(v.Z), fmt(v.bound)]
        if bound == INF:
            continue
        d = delays_scaled(trace, U, us, limit=bound + dt)
        reached = d[d >= 0]
        if len(reached):
            res.worst_delay = max(res.worst_delay, int(reached.max()) * dt)
        res.delay_excess += int(np.count_nonzero((d < 0) | (d * dt > bound + dt)))
    return res


def default_arrival(road: RingRoad, rho, sigma=1, fraction=Fraction(3, 4)) -> AffineArrival:
    return AffineArrival(sigma, fundamental_flow(road, rho) * rational(fraction))


def suite(
    road: RingRoad,
    densities: Sequence,
    couples: Sequence[str] = ("theorem1", "relaxed"),
    runs: int = 200,
    seed: int = 0,
    dt=Fraction(1, 2),
    horizon=120,
    sigma=1,
    fraction=Fraction(3, 4),
    negative_control: bool = False,
) -> List[CaseResult]:
    out = []
    for i, rho in enumerate(densities):
        alpha = default_arrival(road, rho, sigma, fraction)
        for j, name in enumerate(couples):
            # the same inflows for both couples at a given density
            out.append(
                run_case(road, rho, name, alpha, runs, seed + 1000 * i, dt, horizon, negative_control)
            )
    return out
