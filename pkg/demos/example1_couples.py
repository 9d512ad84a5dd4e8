"""
Service couples of the six-section ring
=======================================

Build the couple (beta, lambda) of the academic ring at three densities and
compare it with the closed forms written with gamma/delta atoms.  Then read
the worst travel time of a small token-bucket flow off each couple.
"""

from fractions import Fraction as F

from roadcalc import atom, closure, conv, positive_shift
from roadcalc.curve import fmt
from roadcalc.bounds import AffineArrival, couple_bounds
from roadcalc.road import example_road, service_couple_theorem1

road = example_road()
print(f"ring: m={road.m}, dx={road.dx}, v={road.v}, w={road.w}, rho_j={road.rho_j}")

# closed forms: [gamma^-N (gamma^p delta^T)*]^+
s3, s6, s12 = closure(atom(1, 3)), closure(atom(1, 6)), closure(atom(3, 12))
expected = {
    F(1, 6): positive_shift(s6, 1),
    F(1, 3): positive_shift(s3, 2),
    F(1, 2): positive_shift(conv(s3, s12), 3),
}

for rho, beta in expected.items():
    c = service_couple_theorem1(road, rho)
    same = "matches" if c.beta == beta else "DIFFERS from"
    print(f"\nrho = {rho}: beta {same} the closed form")
    print("  beta  :", c.beta)
    print("  lambda:", c.lam)
    # first few values, to see the staircase
    print("  beta(t), t = 0..24 step 3:", [fmt(c.beta(t)) for t in range(0, 25, 3)])

    alpha = AffineArrival(1, F(1, 20))
    rep = couple_bounds(alpha, c)
    print(f"  flow 1 + t/20: travel time <= {fmt(rep.tau_max)}, backlog <= {fmt(rep.b_max)}")
