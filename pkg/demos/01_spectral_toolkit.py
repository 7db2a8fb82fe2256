"""Tour of the spectral toolkit: grids, transforms, the half-Laplacian,
and the norm family (Lebesgue, Sobolev, Besov, weighted).

Run:  python demos/01_spectral_toolkit.py
"""

import numpy as np

from semirelax import (
    LittlewoodPaleyPartition,
    SobolevSpec,
    besov_norm,
    gaussian_field,
    half_laplacian,
    l2_norm,
    lp_norm,
    make_grid,
    mode_field,
    sobolev_norm,
    to_physical,
    to_spectral,
    weighted_norm,
)

print("=== periodic grid and transform round trip ===")
grid = make_grid(1, 256, 40.0)
print(f"grid: n={grid.n}, N={grid.N}, L={grid.L}, dx={grid.dx}")
f = gaussian_field(grid)
roundtrip = to_physical(to_spectral(f))
print(f"round-trip max error: {np.max(np.abs(roundtrip.values - f.values)):.3e}")

print("\n=== plane waves are eigenfunctions of D = (-Lap)^(1/2) ===")
g2pi = make_grid(1, 64, 2 * np.pi)
for k in (1, 2, 5):
    mode = mode_field(g2pi, k)
    out = to_physical(half_laplacian(mode))
    err = np.max(np.abs(out.values - abs(k) * mode.values))
    print(f"D e^(i{k}x) = {k} e^(i{k}x)   (max error {err:.2e})")

print("\n=== gaussian norms against continuum values ===")
# for u = exp(-x^2): transform sqrt(pi) exp(-xi^2/4)
print(f"||u||_L2      = {l2_norm(f):.12f}   (exact {(np.pi / 2) ** 0.25:.12f})")
print(f"||u||_L4      = {lp_norm(f, 4.0):.12f}   (exact {(np.sqrt(np.pi) / 2) ** 0.25:.12f})")
print(f"||D u||_L2    = {l2_norm(half_laplacian(f)):.12f}")
h1 = sobolev_norm(f, SobolevSpec(1.0))
print(f"||u||_H1      = {h1:.12f}   (exact {(2 * np.pi) ** 0.25:.12f})")

print("\n=== dyadic decomposition and the Besov norm ===")
part = LittlewoodPaleyPartition(grid)
print(f"partition-of-unity residual: {part.partition_residual():.1e}")
print(f"shells present: {part.shell_indices}")
s = 0.8
c, C = part.frame_bounds(s)
b = besov_norm(f, s, 2.0)
h = sobolev_norm(f, SobolevSpec(s))
print(f"frame bounds at s={s}: c={c:.4f}, C={C:.4f}")
print(f"besov {b:.6f} within [c*H, C*H] = [{c * h:.6f}, {C * h:.6f}]")

print("\n=== weighted norms with the bracket weight ===")
g3 = make_grid(3, 32, 16.0)
f3 = gaussian_field(g3)
for delta in (0.25, 0.5, 1.0):
    w = weighted_norm(f3, delta, 2.0, sign=-1)
    print(f"|| [x]_{delta}^(-1/2) u ||_L2 = {w:.6f}")
