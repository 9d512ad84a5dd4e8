"""
Tandem roads and tree-shaped networks.

A path is a chain of servers, so its couple is the series composition of the
per-road couples.  Where the tagged flow merges with other traffic, the road
right after the merge only offers what the competing flow leaves over; how
much that is depends on the intersection's control, which is modelled by a
pluggable :class:`MergePolicy`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from typing import Dict, List, Optional, Protocol, Sequence

from . import minplus as mp
from .bounds import delay_bound
from .curve import INF, Curve, CurveError, Value
from .road import (
    RingRoad,
    ServiceCouple,
    service_couple_relaxed,
    service_couple_theorem1,
)


class NetworkError(CurveError):
    """Invalid network description or query."""


def identity_couple() -> ServiceCouple:
    """The server that forwards everything instantly: (e, eps)."""
    return ServiceCouple(mp.e(), mp.eps())


def series(c1: ServiceCouple, c2: ServiceCouple) -> ServiceCouple:
    """c2 feeds c1 (c1 is downstream): (b1 * b2, b1 * l2 (+) l1)."""
    return ServiceCouple(
        mp.conv(c1.beta, c2.beta),
        mp.min_plus_add(mp.conv(c1.beta, c2.lam), c1.lam),
    )


# -- merges ----------------------------------------------------------------


class MergePolicy(Protocol):
    name: str

    def residual(self, total: ServiceCouple, cross: Curve) -> ServiceCouple: ...


@dataclass(frozen=True)
class BlindMultiplexing:
    """Assume nothing about priorities: the competing flow may be served first.

    Each curve of the couple loses the cross traffic's arrival curve and is
    then replaced by its largest non-decreasing minorant.
    """

    name: str = "blind"

    def residual(self, total: ServiceCouple, cross: Curve) -> ServiceCouple:
        return ServiceCouple(mp.residual(total.beta, cross), mp.residual(total.lam, cross))


POLICIES: Dict[str, MergePolicy] = {"blind": BlindMultiplexing()}


def is_degenerate(couple: ServiceCouple) -> bool:
    """True if the couple never serves anything beyond what it served at t = 0+."""
    total = couple.total
    return total.rate == 0 and total.right_limit(total.horizon) == 0


def residual_merge(total: ServiceCouple, cross: Curve, policy: Optional[MergePolicy] = None) -> ServiceCouple:
    return (policy or POLICIES["blind"]).residual(total, cross)


# -- networks --------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    name: str
    src: str
    dst: str
    road: RingRoad
    rho: Fraction
    model: str = "theorem1"

    def couple(self) -> ServiceCouple:
        if self.model == "theorem1":
            return service_couple_theorem1(self.road, self.rho)
        if self.model == "relaxed":
            return service_couple_relaxed(self.road, self.rho)
        raise NetworkError(f"unknown road model {self.model!r} on edge {self.name}")


@dataclass(frozen=True)
class Merge:
    """Competing traffic joining at a node, and the rule sharing the next road."""

    node: str
    cross: Curve
    policy: str = "blind"


@dataclass
class RoadNetwork:
    edges: Dict[str, Edge]
    merges: Dict[str, Merge] = field(default_factory=dict)

    def __post_init__(self):
        graph: Dict[str, set] = {}
        for e in self.edges.values():
            graph.setdefault(e.dst, set()).add(e.src)
            graph.setdefault(e.src, set())
        try:
            self.order = list(TopologicalSorter(graph).static_order())
        except CycleError as exc:
            raise NetworkError(
                f"cyclic network {exc.args[1]}: inflows with cyclic dependencies are not supported"
            ) from None
        for node in self.merges:
            if node not in graph:
                raise NetworkError(f"merge declared at unknown node {node!r}")

    @property
    def nodes(self) -> List[str]:
        return self.order

    def check_path(self, path: Sequence[str]) -> List[Edge]:
        if not path:
            raise NetworkError("empty path")
        out = []
        for name in path:
            if name not in self.edges:
                raise NetworkError(f"unknown edge {name!r}")
            out.append(self.edges[name])
        for a, b in zip(out, out[1:]):
            if a.dst != b.src:
                raise NetworkError(f"edges {a.name} and {b.name} are not consecutive")
        return out

    def edge_service(self, edge: Edge, entering: bool) -> ServiceCouple:
        """The road's couple, reduced by any merge the flow meets when entering it."""
        c = edge.couple()
        merge = self.merges.get(edge.src)
        if entering and merge is not None:
            if merge.policy not in POLICIES:
                raise NetworkError(f"unknown merge policy {merge.policy!r} at {merge.node}")
            c = residual_merge(c, merge.cross, POLICIES[merge.policy])
        return c


def path_service(net: RoadNetwork, path: Sequence[str]) -> ServiceCouple:
    """Series of the roads along ``path``, upstream first.

    Merges are applied at every node the path goes through, including its
    origin: traffic joining there competes for the first road too.
    """
    couple = identity_couple()
    for edge in net.check_path(path):
        couple = series(net.edge_service(edge, True), couple)
    return couple


def path_travel_time_bound(net: RoadNetwork, path: Sequence[str], alpha) -> Value:
    couple = path_service(net, path)
    if is_degenerate(couple):
        return INF
    return delay_bound(alpha, couple)
