"""
Travel-time bounds on a small road tree
=======================================

Two flows, from A and from D, share the roads B->C and C->F.  Competing
traffic joins at B and C and is handled by blind multiplexing.  The same
scenario drives the command line tool:

    roadcalc compose --config demos/configs/tree.json --out out/tree
"""

from pathlib import Path

from roadcalc import INF
from roadcalc.bounds import AffineArrival
from roadcalc.composition import path_service, path_travel_time_bound
from roadcalc.config import load

cfg = load(Path(__file__).with_name("configs") / "tree.json")
net = cfg.network

print("edges:")
for e in net.edges.values():
    print(f"  {e.name}: {e.src}->{e.dst}  rho={e.rho}  model={e.model}")

for p in cfg.paths:
    spec = cfg.arrivals[p.arrival]
    alpha = AffineArrival(spec.sigma, spec.r)
    couple = path_service(net, p.edges)
    tau = path_travel_time_bound(net, p.edges, alpha)
    shown = "unbounded" if tau == INF else f"{tau} ({float(tau):.2f})"
    print(f"\npath {p.name} via {' -> '.join(p.edges)}")
    print(f"  arrival sigma={spec.sigma} r={spec.r}")
    print(f"  long-run service rate {couple.total.rate}")
    print(f"  travel time bound {shown}")
