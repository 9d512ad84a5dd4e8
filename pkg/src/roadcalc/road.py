"""
Single-lane ring road: triangular fundamental diagram and service couples.

The road has m sections of length dx.  Cars enter at section 1 and leave at
the same point after a full loop.  Free speed is v, the backward wave speed w,
and the jam density rho_j, so a section holds at most n_max = rho_j * dx cars.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from . import minplus as mp
from .curve import Curve, CurveError, rational


@dataclass(frozen=True)
class RingRoad:
    m: int
    dx: Fraction
    v: Fraction
    w: Fraction
    rho_j: Fraction

    def __post_init__(self):
        for name in ("dx", "v", "w", "rho_j"):
            object.__setattr__(self, name, rational(getattr(self, name)))
        if int(self.m) != self.m or self.m < 3:
            raise CurveError("a ring road needs m >= 3 sections")
        object.__setattr__(self, "m", int(self.m))
        if min(self.dx, self.v, self.w, self.rho_j) <= 0:
            raise CurveError("dx, v, w and rho_j must be positive")

    @property
    def n_max(self) -> Fraction:
        return self.rho_j * self.dx

    @property
    def length(self) -> Fraction:
        return self.m * self.dx

    @property
    def tv(self) -> Fraction:
        """Time for a car to cross one section at free speed."""
        return self.dx / self.v

    @property
    def tw(self) -> Fraction:
        """Time for a backward wave to cross one section."""
        return self.dx / self.w

    @property
    def rho_c(self) -> Fraction:
        return self.rho_j * self.w / (self.v + self.w)

    def check_density(self, rho) -> Fraction:
        rho = rational(rho)
        if not 0 <= rho <= self.rho_j:
            raise CurveError(f"density {rho} outside [0, {self.rho_j}]")
        return rho


@dataclass(frozen=True)
class Density:
    rho: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rho", rational(self.rho))


@dataclass(frozen=True)
class Counts:
    n: tuple

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(rational(x) for x in self.n))

    def validate(self, road: RingRoad) -> "Counts":
        if len(self.n) != road.m:
            raise CurveError(f"expected {road.m} section counts, got {len(self.n)}")
        if any(x < 0 or x > road.n_max for x in self.n):
            raise CurveError(f"section counts must lie in [0, {road.n_max}]")
        return self

    def density(self, road: RingRoad) -> Fraction:
        return sum(self.n, Fraction(0)) / road.length

    @classmethod
    def uniform(cls, road: RingRoad, rho) -> "Counts":
        rho = road.check_density(rho)
        return cls((rho * road.dx,) * road.m)


Occupancy = Union[Density, Counts]


def occupancy_density(road: RingRoad, occ: Occupancy) -> Fraction:
    if isinstance(occ, Counts):
        return occ.validate(road).density(road)
    return road.check_density(occ.rho)


@dataclass(frozen=True)
class ServiceCouple:
    """Lower bound Y >= beta * U (+) lambda on a server's output."""

    beta: Curve
    lam: Curve

    @property
    def total(self) -> Curve:
        return mp.min_plus_add(self.beta, self.lam)

    def to_dict(self) -> dict:
        return {"beta": self.beta.to_dict(), "lambda": self.lam.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceCouple":
        return cls(Curve.from_dict(data["beta"]), Curve.from_dict(data["lambda"]))


# -- fundamental diagram ---------------------------------------------------


def fundamental_flow(road: RingRoad, rho) -> Fraction:
    rho = road.check_density(rho)
    return min(road.v * rho, road.w * (road.rho_j - rho))


def q_max(road: RingRoad) -> Fraction:
    return road.rho_j / (1 / road.v + 1 / road.w)


def _interior(road: RingRoad, rho) -> Fraction:
    rho = road.check_density(rho)
    if rho == 0 or rho == road.rho_j:
        raise CurveError(f"travel time undefined at density {rho}: the flow is zero")
    return rho


def avg_travel_time(road: RingRoad, rho) -> Fraction:
    """m dx rho / q(rho), written without the division by q."""
    rho = _interior(road, rho)
    return max(road.length / road.v, road.length / road.w * rho / (road.rho_j - rho))


def autonomous_flow(road: RingRoad, occ: Occupancy) -> Fraction:
    """Min of the three circuit rates of the closed ring."""
    rho = occupancy_density(road, occ)
    return min(road.v * rho, road.w * (road.rho_j - rho), q_max(road))


# -- exact couple from the circuit atoms ---------------------------------


def atom_a(road: RingRoad, rho) -> Curve:
    rho = road.check_density(rho)
    m, dx = road.m, road.dx
    return mp.min_all(
        [
            mp.atom(m * rho * dx, m * road.tv),
            mp.atom(road.n_max, road.tv + road.tw),
            mp.atom(m * (road.rho_j - rho) * dx, m * road.tw),
        ]
    )


def _couple(road: RingRoad, N, core: Curve, fwd: Sequence, bwd: Sequence) -> ServiceCouple:
    """beta = [gamma^-N core]^+ and lambda = beta (+) [gamma^-N (atoms (+) e)]^+."""
    m = road.m
    atoms = [mp.atom(fwd[k - 1], (m - k) * road.tv) for k in range(1, m)]
    atoms += [mp.atom(bwd[k - 1], k * road.tw) for k in range(1, m)]
    atoms.append(mp.e())
    beta = mp.positive_shift(core, N)
    lam = mp.min_plus_add(beta, mp.positive_shift(mp.min_all(atoms), N))
    return ServiceCouple(beta, lam)


def service_couple_theorem1(road: RingRoad, rho) -> ServiceCouple:
    rho = road.check_density(rho)
    m, dx, rj = road.m, road.dx, road.rho_j
    N = m * rho * dx
    fwd = [max(m * rho - k * rj, 0) * dx for k in range(1, m)]
    bwd = [max(k * rj - m * rho, 0) * dx for k in range(1, m)]
    return _couple(road, N, mp.closure(atom_a(road, rho)), fwd, bwd)


def service_couple_exact(road: RingRoad, occ: Counts) -> ServiceCouple:
    """Couple from the per-section sums rather than their density bounds.

    The 2-cycles of the ring always weigh n_i + (n_max - n_i) = n_max, so the
    circuit atom ``a`` only depends on the total count.
    """
    n = occ.validate(road).n
    m = road.m
    rho = occ.density(road)
    N = sum(n, Fraction(0))
    nbar = [road.n_max - x for x in n]
    fwd = [sum(n[k:], Fraction(0)) for k in range(1, m)]
    bwd = [sum(nbar[:k], Fraction(0)) for k in range(1, m)]
    a = atom_a(road, rho)
    core = mp.conv(mp.closure(a), a)
    return _couple(road, N, core, fwd, bwd)


def service_couple_relaxed(road: RingRoad, rho) -> ServiceCouple:
    rho = _interior(road, rho)
    beta = mp.rate_latency(fundamental_flow(road, rho), avg_travel_time(road, rho))
    T = 2 * road.m * rho * road.dx / (road.rho_j * road.w)
    lam = mp.min_plus_add(beta, mp.rate_latency(road.w * road.rho_j, T))
    return ServiceCouple(beta, lam)


EXAMPLE_ROAD = dict(m=6, dx=1, v=1, w=Fraction(1, 2), rho_j=1)


def example_road() -> RingRoad:
    """The six-section academic road used throughout the tests and demos."""
    return RingRoad(**EXAMPLE_ROAD)
