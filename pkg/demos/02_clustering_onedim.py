"""Bands of H(mu) = mu (-d^2/dx^2) + sin^2(pi x) / mu gather around pi, 3 pi, 5 pi.

The window half-width is C mu^(1/5); C is fitted at the largest mu and then
reused.  Watch the band widths collapse and the gaps open.
"""
import numpy as np

from maggaps import gap_analysis as ga
from maggaps.experiment import Experiment
from maggaps.grid import SupercellGrid
from maggaps.group_cocycle import GaugeData
from maggaps.potential import MorsePotential

ex = Experiment(MorsePotential.sin2(1), GaugeData(1), SupercellGrid(1, (1,), 128), 20.0, theta_points=8)
model = ex.model()
lams = np.linspace(0, 20, 401)

runs = {mu: ex.report(mu) for mu in (0.1, 0.05, 0.02, 0.01)}
res0, rep0 = runs[0.1]
C = ga.fit_cluster_constant(rep0, model, 0.1, ex.ids_function(res0), lams)
print(f"fitted C = {C:.4f}\n")

for mu, (res, rep) in runs.items():
    asg = ga.cluster_check(rep, model, mu, C)
    viol = ga.sandwich_check(ex.ids_function(res), model, mu, C, lams)
    print(f"mu = {mu:g}   window {ga.window(mu, C):.3f}   sandwich violation {viol:.3f}")
    for (a, b), p in zip(rep.bands, asg.level):
        print(f"   [{a:9.5f}, {b:9.5f}]  width {b - a:.2e}  -> alpha = {model.alphas[p]:.5f}")
    print(f"   gaps below 20: {len(rep.gaps_below(20))}")

rows = ga.multiplicity_check(ex.ids_function(runs[0.01][0]), model, 0.01, 5.0)
print("\nIDS jumps across the first two windows at mu = 0.01:", [round(r.jump, 4) for r in rows])
