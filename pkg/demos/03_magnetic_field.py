"""Turning on a field of half a flux quantum per cell leaves the clusters in place.

2-D, V = sin^2(pi x1) + sin^2(pi x2), mu = 0.02.  The field needs a 2 x 1
magnetic supercell; the lowest cluster near 2 pi barely moves, while the
degenerate 4 pi cluster may split inside its window.
"""
import math

from maggaps.experiment import Experiment
from maggaps.grid import SupercellGrid
from maggaps.group_cocycle import GaugeData
from maggaps.potential import MorsePotential

V = MorsePotential.sin2(2)
cases = {
    "flux 0  ": Experiment(V, GaugeData(2), SupercellGrid(2, (1, 1), 32), 16.0, theta_points=4),
    "flux 1/2": Experiment(V, GaugeData(2, math.pi), SupercellGrid(2, (2, 1), 32), 16.0, theta_points=4),
}
for name, ex in cases.items():
    _, rep = ex.report(0.02)
    bands = ", ".join(f"[{a:.4f}, {b:.4f}]" for a, b in rep.bands)
    print(f"{name}: {bands}")
print("model levels:", ", ".join(f"{a:.4f} (x{r})" for a, r in cases["flux 0  "].model()))
