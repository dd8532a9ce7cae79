"""Harmonic model levels for V = sin^2(pi x) and its 2-D sum.

Each zero of V contributes an oscillator with frequencies sqrt(eig(G Q)),
Q = Hess V / 2.  The model levels sum_k w_k (2 m_k + 1) do not depend on mu:
we check this by discretising K(mu) on a shrinking box.
"""
import math

from maggaps.model_operator import build_wells, enumerate_spectrum, model_levels
from maggaps.potential import MorsePotential, find_zeros

for n in (1, 2):
    V = MorsePotential.sin2(n)
    wells = build_wells(find_zeros(V))
    spec = enumerate_spectrum(wells, 6 * math.pi + 0.5)
    print(f"{n}-D: {len(wells)} well(s), frequencies {wells[0].frequencies.round(6).tolist()}")
    for a, r in spec:
        print(f"   alpha = {a / math.pi:.6f} pi   mult {r}")

well = build_wells(find_zeros(MorsePotential.sin2(1)))[0]
print("\nK(mu) on [-6 sqrt(mu), 6 sqrt(mu)], lowest three levels / pi:")
for mu in (1.0, 0.1, 0.01):
    vals, _ = model_levels(well, mu, 3, L=6 * math.sqrt(mu), m=400)
    print(f"   mu={mu:<5g}", "  ".join(f"{v / math.pi:.8f}" for v in vals))
