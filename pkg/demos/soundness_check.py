"""
Checking the couples against the simulator
==========================================

Feed the cell-transmission ring with random inflows that respect a token
bucket, then look for grid times where the outflow drops below
beta * U (+) lambda.  A couple lifted by one car is run as a control: it
must be caught.

Only the light-traffic relaxed couple comes out clean.  The exact couple
at rho = 1/6 and both couples at the denser settings are undercut because
the recursion lets cars already on the road leave ahead of the bound; see
the notes in the README.
"""

from fractions import Fraction as F

from roadcalc.road import example_road
from roadcalc.soundness import default_arrival, run_case

road = example_road()
runs = 40

print(f"{'rho':>4} {'couple':>9} {'bad points':>10} {'bad runs':>9} {'late':>5} {'bound':>6}")
for i, rho in enumerate([F(1, 6), F(1, 3), F(1, 2)]):
    alpha = default_arrival(road, rho)
    for name in ("theorem1", "relaxed"):
        r = run_case(road, rho, name, alpha, runs, seed=1000 * i, dt=F(1, 2), horizon=120)
        print(f"{str(rho):>4} {name:>9} {r.couple_violations:>10} {r.runs_violating:>6}/{runs} "
              f"{r.delay_excess:>5} {str(r.bound):>6}")

ctl = run_case(road, F(1, 6), "relaxed", default_arrival(road, F(1, 6)), 10, 0, F(1, 2), 120, negative_control=True)
print(f"\ncontrol (couple lifted by one car): {ctl.couple_violations} violations, first at t={ctl.first[0]}")
