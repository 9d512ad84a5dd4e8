"""
Delay, backlog and output bounds for a flow crossing a server.

With a service couple (beta, lambda) the three classic bounds are read off
beta (+) lambda in place of a plain service curve.  Closed forms for a ring
road under a token-bucket arrival are provided alongside for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import minplus as mp
from .curve import INF, Curve, Value, fmt, rational, value
from .road import RingRoad, ServiceCouple, avg_travel_time, fundamental_flow, service_couple_relaxed


@dataclass(frozen=True)
class AffineArrival:
    """alpha(t) = sigma + r t."""

    sigma: Value
    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "sigma", value(self.sigma))
        object.__setattr__(self, "r", rational(self.r))
        if self.sigma < 0 or self.r < 0:
            raise ValueError("sigma and r must be nonnegative")

    def curve(self) -> Curve:
        return mp.token_bucket(self.sigma, self.r)


@dataclass(frozen=True)
class BoundReport:
    tau_max: Value
    b_max: Value
    output_arrival: Optional[Curve]
    note: str = field(default="")

    @property
    def bounded(self) -> bool:
        return self.tau_max != INF and self.b_max != INF

    def to_dict(self) -> dict:
        return {
            "tau_max": fmt(self.tau_max),
            "b_max": fmt(self.b_max),
            "output_arrival": self.output_arrival.to_dict() if self.output_arrival is not None else None,
            "note": self.note,
        }


def _as_curve(alpha) -> Curve:
    return alpha.curve() if isinstance(alpha, AffineArrival) else alpha


def delay_bound(alpha, couple: ServiceCouple) -> Value:
    return mp.hdev(_as_curve(alpha), couple.total)


def backlog_bound(alpha, couple: ServiceCouple) -> Value:
    return mp.vdev(_as_curve(alpha), couple.total)


def output_arrival(alpha, couple: ServiceCouple) -> Curve:
    """alpha (/) (beta (+) lambda); raises UnboundedError if that is +inf."""
    return mp.deconv(_as_curve(alpha), couple.total)


def couple_bounds(alpha, couple: ServiceCouple) -> BoundReport:
    """All three bounds; an overloaded server gives +inf instead of an error."""
    alpha = _as_curve(alpha)
    total = couple.total
    tau, b = mp.hdev(alpha, total), mp.vdev(alpha, total)
    try:
        out = mp.deconv(alpha, total)
        note = ""
    except mp.UnboundedError as exc:
        out, note = None, str(exc)
    if tau == INF or b == INF:
        note = note or f"arrival rate {fmt(alpha.rate)} exceeds service rate {fmt(total.rate)}"
    return BoundReport(tau, b, out, note)


def tau_max_density(road: RingRoad, rho) -> Fraction:
    """Worst-case travel time with no initial burst."""
    rho = rational(rho)
    tau = avg_travel_time(road, rho)
    return max(tau, 2 * road.m * rho * road.dx / (road.rho_j * road.w))


def road_bounds(road: RingRoad, rho, alpha: AffineArrival) -> BoundReport:
    """Closed-form bounds for a token bucket entering the relaxed ring couple."""
    rho = rational(rho)
    q = fundamental_flow(road, rho)
    tau = avg_travel_time(road, rho)
    T2 = 2 * road.m * rho * road.dx / (road.rho_j * road.w)
    R2 = road.w * road.rho_j
    if alpha.r > q:
        return BoundReport(INF, INF, None, f"arrival rate {fmt(alpha.r)} exceeds q(rho) = {fmt(q)}")
    s, r = alpha.sigma, alpha.r
    tau_max = max(tau + s / q, T2 + s / R2)
    b_max = max(s + r * tau, s + r * T2)
    return BoundReport(tau_max, b_max, mp.token_bucket(b_max, r))


def relaxed_bounds(road: RingRoad, rho, alpha: AffineArrival) -> BoundReport:
    """Same quantities computed by the generic operators on the relaxed couple."""
    return couple_bounds(alpha, service_couple_relaxed(road, rho))
