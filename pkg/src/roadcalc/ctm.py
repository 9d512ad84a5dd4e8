"""
Cell-transmission simulation of the ring road on a uniform time grid.

The recursion is evaluated in exact integer arithmetic: every count is scaled
by a common denominator so numpy can do the work without rounding.  Because
every delayed reference is at least one step in the past, one pass per step
reaches the fixed point; the loop still re-applies the update until nothing
changes, which costs a single extra comparison.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .curve import INF, CurveError, fmt, rational
from .road import Counts, RingRoad, ServiceCouple

# stand-in for +inf in scaled integer arrays; sums of two stay below 2**63
BIG = np.int64(2**61)


def _lcm_den(values) -> int:
    d = 1
    for x in values:
        if x != INF:
            d = math.lcm(d, Fraction(x).denominator)
    return d


@dataclass(frozen=True)
class SimConfig:
    dt: Fraction
    horizon: Fraction
    inflow: Tuple[Fraction, ...]

    def __post_init__(self):
        dt, H = rational(self.dt), rational(self.horizon)
        if dt <= 0 or H < 0:
            raise CurveError("dt must be positive and the horizon nonnegative")
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "horizon", H)
        u = tuple(rational(x) for x in self.inflow)
        object.__setattr__(self, "inflow", u)
        if len(u) != self.steps + 1:
            raise CurveError(f"inflow needs {self.steps + 1} samples, got {len(u)}")
        if any(b < a for a, b in zip(u, u[1:])) or (u and u[0] < 0):
            raise CurveError("inflow samples must be nonnegative and non-decreasing")

    @property
    def steps(self) -> int:
        return int(self.horizon / self.dt)

    @classmethod
    def sampled(cls, dt, horizon, U: Callable) -> "SimConfig":
        dt, horizon = rational(dt), rational(horizon)
        n = int(horizon / dt)
        return cls(dt, horizon, tuple(U(k * dt) for k in range(n + 1)))


@dataclass
class SimTrace:
    dt: Fraction
    scale: int
    Q: np.ndarray  # (steps + 1, m) scaled integers
    Y: np.ndarray
    Z: np.ndarray
    U: np.ndarray
    n: Tuple[Fraction, ...]

    @property
    def times(self) -> List[Fraction]:
        return [k * self.dt for k in range(len(self.Y))]

    def value(self, arr, k) -> Fraction:
        return Fraction(int(arr[k]), self.scale)

    def occupancy(self) -> np.ndarray:
        """Scaled occupancy of each section, n_i + Q_i - Q_{i+1} with Q_{m+1} = Y."""
        n = np.array([int(x * self.scale) for x in self.n], dtype=np.int64)
        nxt = np.concatenate([self.Q[:, 1:], self.Y[:, None]], axis=1)
        return n[None, :] + self.Q - nxt

    def to_csv(self, path) -> None:
        m = self.Q.shape[1]
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t"] + [f"Q_{i + 1}" for i in range(m)] + ["Y", "Z"])
            for k, t in enumerate(self.times):
                row = [fmt(t)] + [fmt(self.value(self.Q[:, i], k)) for i in range(m)]
                wr.writerow(row + [fmt(self.value(self.Y, k)), fmt(self.value(self.Z, k))])


def _delay_steps(road: RingRoad, dt: Fraction) -> Tuple[int, int]:
    kv, kw = road.tv / dt, road.tw / dt
    if kv.denominator != 1 or kw.denominator != 1:
        raise CurveError(f"dt = {dt} must divide dx/v = {road.tv} and dx/w = {road.tw}")
    return int(kv), int(kw)


def simulate(road: RingRoad, occ: Counts, cfg: SimConfig) -> SimTrace:
    scale = _lcm_den(cfg.inflow)
    U = np.array([int(x * scale) for x in cfg.inflow], dtype=np.int64)
    return simulate_scaled(road, occ, cfg.dt, U, scale)


def simulate_scaled(road: RingRoad, occ: Counts, dt, U: np.ndarray, uscale: int) -> SimTrace:
    """simulate() for an inflow already given as integers over ``uscale``."""
    n = occ.validate(road).n
    m = road.m
    dt = rational(dt)
    kv, kw = _delay_steps(road, dt)
    nbar = [road.n_max - x for x in n]
    scale = math.lcm(uscale, _lcm_den(list(n) + [road.n_max]))
    S = lambda x: int(x * scale)  # noqa: E731
    nv = np.array([S(x) for x in n], dtype=np.int64)
    nb = np.array([S(x) for x in nbar], dtype=np.int64)
    U = np.asarray(U, dtype=np.int64) * (scale // uscale)
    K = len(U) - 1
    Q = np.zeros((K + 1, m), dtype=np.int64)
    Y = np.zeros(K + 1, dtype=np.int64)
    zero = np.zeros(m, dtype=np.int64)
    # upstream neighbour i-1 (cyclic) feeds i with n_{i-1}; downstream i+1 leaves room nbar_i
    up = np.roll(np.arange(m), 1)
    down = np.roll(np.arange(m), -1)
    nvu = nv[up]
    for k in range(1, K + 1):
        Qv = Q[k - kv] if k >= kv else zero
        Qw = Q[k - kw] if k >= kw else zero
        new = np.minimum(Qv[up] + nvu, Qw[down] + nb)
        new[0] = min(new[0], U[k])
        while True:  # same-time terms only arise through U, so this exits after one check
            again = np.minimum(new, np.minimum(Qv[up] + nvu, Qw[down] + nb))
            again[0] = min(again[0], U[k])
            if np.array_equal(again, new):
                break
            new = again
        Q[k] = new
        Y[k] = min(Qv[m - 1] + nv[m - 1], Qw[1] + nb[0])
    N = int(nv.sum())
    Z = np.maximum(Y - N, 0)
    return SimTrace(dt, scale, Q, Y, Z, U, tuple(n))


def autonomous_counts(road: RingRoad, rho) -> Counts:
    return Counts.uniform(road, rho)


def long_run_rate(trace: SimTrace, arr: np.ndarray, start: int) -> Fraction:
    """Average slope of a scaled series from step ``start`` to the end."""
    k = len(arr) - 1
    return Fraction(int(arr[k] - arr[start]), trace.scale) / ((k - start) * trace.dt)


# -- checks against curves -------------------------------------------------


def _scaled(vals, scale: int) -> np.ndarray:
    out = np.empty(len(vals), dtype=np.int64)
    for i, x in enumerate(vals):
        out[i] = BIG if x == INF or x * scale >= BIG else int(x * scale)
    return out


@dataclass
class Violation:
    t: Fraction
    Z: Fraction
    bound: Fraction


class CoupleGrid:
    """beta and lambda sampled once on a grid, as scaled integers."""

    def __init__(self, couple: ServiceCouple, dt, K: int):
        dt = rational(dt)
        B = [couple.beta(k * dt) for k in range(K + 1)]
        L = [couple.lam(k * dt) for k in range(K + 1)]
        self.dt, self.K = dt, K
        self.scale = _lcm_den(B + L)
        self.B, self.L = _scaled(B, self.scale), _scaled(L, self.scale)

    def lower_bound(self, U: np.ndarray, uscale: int) -> Tuple[np.ndarray, int]:
        """(beta * U) (+) lambda on the grid (BIG where +inf), with its scale."""
        scale = math.lcm(self.scale, uscale)
        fb, fu = scale // self.scale, scale // uscale
        B = np.where(self.B >= BIG, BIG, self.B * fb)
        L = np.where(self.L >= BIG, BIG, self.L * fb)
        Us = np.asarray(U, dtype=np.int64) * fu
        K = len(Us) - 1
        out = np.empty(K + 1, dtype=np.int64)
        for k in range(K + 1):
            out[k] = min(int(np.min(B[: k + 1] + Us[k::-1])), int(L[k]))
        return np.minimum(out, BIG), scale


def grid_lower_bound(couple: ServiceCouple, U: Sequence[Fraction], dt: Fraction) -> List:
    """(beta * U) (+) lambda at each grid point, by brute force over grid s <= t."""
    U = [rational(x) for x in U]
    us = _lcm_den(U)
    arr, scale = CoupleGrid(couple, dt, len(U) - 1).lower_bound(
        np.array([int(x * us) for x in U], dtype=np.int64), us
    )
    return [INF if v >= BIG else Fraction(int(v), scale) for v in arr]


def violations(trace: SimTrace, U: np.ndarray, uscale: int, grid: CoupleGrid) -> List[Violation]:
    bound, scale = grid.lower_bound(U, uscale)
    scale2 = math.lcm(scale, trace.scale)
    Z = trace.Z * (scale2 // trace.scale)
    b = np.where(bound >= BIG, BIG, bound * (scale2 // scale))
    idx = np.nonzero((b < BIG) & (Z < b))[0]
    return [
        Violation(int(k) * trace.dt, Fraction(int(Z[k]), scale2), Fraction(int(b[k]), scale2)) for k in idx
    ]


def check_couple(trace: SimTrace, U: Sequence, couple: ServiceCouple) -> List[Violation]:
    """Grid points where Z < (beta * U) (+) lambda."""
    U = [rational(x) for x in U]
    us = _lcm_den(U)
    Us = np.array([int(x * us) for x in U], dtype=np.int64)
    return violations(trace, Us, us, CoupleGrid(couple, trace.dt, len(U) - 1))


def measure_virtual_delays(trace: SimTrace, U: Sequence, limit: Optional[Fraction] = None):
    """(t, d(t)) with d the smallest grid lag h such that Z(t + h) >= U(t).

    Only times t with t + limit within the trace are reported when ``limit``
    is given, so a delay cut short by the horizon is not mistaken for +inf.
    """
    U = [rational(x) for x in U]
    us = _lcm_den(U)
    d = delays_scaled(trace, np.array([int(x * us) for x in U], dtype=np.int64), us, limit)
    return [(k * trace.dt, INF if x < 0 else int(x) * trace.dt) for k, x in enumerate(d)]


def delays_scaled(trace: SimTrace, U: np.ndarray, uscale: int, limit=None) -> np.ndarray:
    """Virtual delays in steps (-1 when not reached) for an integer inflow."""
    scale = math.lcm(trace.scale, uscale)
    Z = trace.Z * (scale // trace.scale)
    Us = np.asarray(U, dtype=np.int64) * (scale // uscale)
    K = len(Z) - 1
    last = K if limit is None else K - int(math.ceil(rational(limit) / trace.dt))
    if last < 0:
        return np.empty(0, dtype=np.int64)
    # Z is non-decreasing, so the first index reaching U(t) comes from a sorted search
    idx = np.searchsorted(Z, Us[: last + 1], side="left")
    d = np.maximum(idx - np.arange(last + 1), 0)
    return np.where(idx > K, -1, d)


def inflated(couple: ServiceCouple, by=1) -> ServiceCouple:
    """A deliberately unsound couple: both curves lifted by ``by`` for t > 0."""
    from .minplus import lift

    return ServiceCouple(lift(couple.beta, by), lift(couple.lam, by))
