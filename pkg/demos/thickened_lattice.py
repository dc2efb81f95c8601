"""Positive density alone does not force every large distance.

Thicken Z^2 by linf-balls of radius 1/8: every distance is within 1/4 of an
integer, so no half-integer distance occurs.

    python3 demos/thickened_lattice.py
"""
from fractions import Fraction

from distavoid import NormSpec, SamplerConfig, thickened_lattice_demo

for norm in ("linf", "l1"):
    for t in (Fraction(1, 16), Fraction(1, 8), Fraction(3, 16)):
        rep = thickened_lattice_demo(NormSpec.parse(norm, 2), t, SamplerConfig(seed=0, samples=20_000))
        print(f"{norm:>4} t={str(t):<5} min distance to a half-integer {rep.min_half_distance:.4f} "
              f"(bound {rep.bound}), density {rep.cell_density}")
