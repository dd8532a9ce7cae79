"""Magnetic translations and gauge changes.

At flux 1/3 per cell the translations form a projective representation with
multiplier sigma.  Random instances check the algebraic identities; a gauge
change A -> A + d sin(2 pi x1) leaves the Bloch spectra untouched.
"""
import math

import numpy as np

from maggaps.discrete_hamiltonian import gauge_transform
from maggaps.grid import SupercellGrid
from maggaps.group_cocycle import GaugeData, identity_defects, multiplier
from maggaps.potential import MorsePotential
from maggaps.spectral_engine import bloch_sweep, theta_grid
from maggaps.trigpoly import TrigPolynomial

gauge = GaugeData(2, 2 * math.pi / 3)
grid = SupercellGrid(2, (3, 1), 8)
sigma = multiplier(gauge)
print("sigma((1,0),(0,1)) =", np.round(sigma((1, 0), (0, 1)), 12))
print("sigma((0,1),(1,0)) =", np.round(sigma((0, 1), (1, 0)), 12))

for name, d in identity_defects(gauge, np.random.default_rng(42), 200, grid=grid).items():
    print(f"{name:>22}: {d:.2e}")

phi = TrigPolynomial.from_terms(2, [((1, 0), "sin", 1.0)])
new, _ = gauge_transform(gauge, phi, grid)
V = MorsePotential.sin2(2)
a = bloch_sweep(0.05, gauge, V, grid, theta_grid(2, 2), count=6)
b = bloch_sweep(0.05, new, V, grid, theta_grid(2, 2), count=6)
print("max spectral change under the gauge transform:",
      max(float(np.abs(x.eigenvalues - y.eigenvalues).max()) for x, y in zip(a, b)))
