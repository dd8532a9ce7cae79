"""Cut-off oscillator states as approximate eigenfunctions.

phi = J(mu^-kappa x) psi_0(x) has Rayleigh quotient within O(mu^(3 kappa - 1))
of the model level pi.  The observed decay is faster than that bound.
"""
import numpy as np

from maggaps import gap_analysis as ga
from maggaps.grid import SupercellGrid
from maggaps.group_cocycle import GaugeData
from maggaps.model_operator import build_wells
from maggaps.potential import MorsePotential, find_zeros

V = MorsePotential.sin2(1)
well = build_wells(find_zeros(V))[0]
grid = SupercellGrid(1, (2,), 2048)
mus = np.geomspace(1e-3, 1e-1, 5)
res = []
for mu in mus:
    q = ga.quasimode_check(well, 0, mu, 0.45, GaugeData(1), V, grid)
    res.append(q.residual)
    print(f"mu = {mu:.2e}   <phi, H phi> = {q.rayleigh:.8f}   residual {q.residual:.3e}")
print(f"log-log slope {ga.power_slope(mus, res):.3f}  (bound predicts >= {3 * 0.45 - 1:.2f})")
