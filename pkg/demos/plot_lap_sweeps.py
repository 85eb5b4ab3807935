"""
Weighted resolvent norms as eps goes to zero
============================================

A bound state produces a clean 1/eps pole.  In the continuum the finite
box caps how small eps can usefully get, so the sweep starts at ten
times the level-spacing floor.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from shiftmourre.grid import make_grid
from shiftmourre.lap import ResolventProbe, eps_floor, eps_sweep
from shiftmourre.operators import hamiltonian
from shiftmourre.potentials import Well, build_potential

###############################################################################
# Deep square well: sweep at its ground-state energy.
gw = make_grid(1, 32.0, 256, 1.0)
well = ResolventProbe(hamiltonian(gw, build_potential(Well(-5.0, 2.0), gw)), gamma=1.0)
e0 = well.energies[0]
pole = eps_sweep(well, e0, 1.0, "position", np.geomspace(1e-1, 1e-4, 7))
print(f"E0 = {e0:.4f}: {pole.classification}")

###############################################################################
# Free case inside the window, above the floor.
gf = make_grid(1, 128.0, 1024, 1.0)
free = ResolventProbe(hamiltonian(gf), gamma=1.0)
floor = eps_floor(free.energies, 1.0)
cont = eps_sweep(free, 1.0, 1.0, "position", np.geomspace(10 * floor, floor, 5), floor=floor)
print(f"lambda = 1: {cont.classification}, change over the last decade {cont.last_decade_change:.1%}")

###############################################################################
# Below the spectrum nothing happens at all.
below = eps_sweep(free, -1.0, 1.0, "position", np.geomspace(1e-1, 1e-4, 7))
print(f"lambda = -1: {below.classification}")

fig, ax = plt.subplots(figsize=(5, 3.5))
for curve, label in ((pole, "bound state"), (cont, "continuum"), (below, "below spectrum")):
    e, v = zip(*curve.rows)
    ax.loglog(e, v, "o-", ms=3, label=label)
ax.set_xlabel("eps")
ax.set_ylabel("|<x>^-1 R <x>^-1|")
ax.legend()
fig.tight_layout()
fig.savefig("lap_sweeps.svg")
