"""
Average versus worst travel time
================================

Sweep the density over k/60 and compare the average loop time m dx / q(rho)
with the worst-case bound of the relaxed couple for a flow with no burst.
The two only part ways between 1/4 and 1/2, where the backward-wave term
takes over.  Writes travel_time.svg next to this script.
"""

from fractions import Fraction as F
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from roadcalc.bounds import tau_max_density
from roadcalc.road import avg_travel_time, example_road

road = example_road()
rhos = [F(k, 60) for k in range(1, 60)]
tau = [avg_travel_time(road, r) for r in rhos]
tau_max = [tau_max_density(road, r) for r in rhos]

gap = [r for r, a, b in zip(rhos, tau, tau_max) if b > a]
print(f"worst case above average for {len(gap)} densities: {gap[0]} .. {gap[-1]}")
for r in (F(1, 6), F(1, 4), F(1, 3), F(5, 12), F(1, 2), F(2, 3)):
    print(f"  rho={str(r):>5}  tau={str(avg_travel_time(road, r)):>5}  tau_max={tau_max_density(road, r)}")

fig, ax = plt.subplots(figsize=(5.5, 3.8))
ax.plot([float(r) for r in rhos], [float(x) for x in tau], label="average")
ax.plot([float(r) for r in rhos], [float(x) for x in tau_max], ls="--", label="worst case")
ax.axvspan(0.25, 0.5, color="0.9", zorder=0)
ax.set_xlabel("density")
ax.set_ylabel("travel time")
ax.legend()
fig.tight_layout()
out = Path(__file__).with_name("travel_time.svg")
fig.savefig(out)
print("wrote", out)
