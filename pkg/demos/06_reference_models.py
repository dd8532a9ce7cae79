"""Two exactly solvable neighbours of the problem.

Landau levels on the hyperbolic plane (field theta) and the Harper model,
whose band count at flux p/q is q.
"""
from fractions import Fraction

from maggaps.reference_models import comtet_houston, harper_gap_table, harper_spectrum

for theta in (Fraction(1, 2), 1, 2, Fraction(7, 2)):
    print(f"theta = {theta}:  {comtet_houston(theta).format()}")

h = harper_spectrum(1, 3)
print("\nHarper 1/3:", ", ".join(f"[{a:.4f}, {b:.4f}]" for a, b in h.bands), f"({h.gap_count} gaps)")
print("\np/q  open gaps")
for p, q, g in harper_gap_table(6):
    print(f"{p}/{q}  {g}")
