"""
Invariants of a marked sphere
=============================

The simplest flag is the unit sphere with its equator marked. Everything is
known in closed form here, so it's a good place to see what the grid
discretization gets right and where the error lives.
"""

# %%
import numpy as np

from flagmetric.shapes import sphere

flag = sphere(1.0, n_u=128, n_v=65)
print(flag.grid.shape, "equator row", flag.equator_row)

# %%
# Both principal curvatures should be -1 with our normal pointing outward.
# The error is largest next to the poles, where the one-sided stencils take over.
surf = flag.surface
err = np.abs(surf.k1 + 1)
row = np.unravel_index(err.argmax(), err.shape)[1] + 1
print(f"max |k1 + 1| = {err.max():.2e}, worst row {row} of {flag.n_v - 1}")

# %%
# Along the equator the curve is a great circle, so it has no geodesic
# curvature and no geodesic torsion, and its normal curvature is -1.
c = flag.curvatures
print("kappa_g", np.abs(c.kappa_g).max())
print("tau_g  ", np.abs(c.tau_g).max())
print("kappa_n", c.kappa_n.min(), c.kappa_n.max())

# %%
# Moving the marked row up to v = pi/3 turns it into a small circle.
# Its geodesic curvature is cot(pi/3) in magnitude.
lat = sphere(1.0, 128, 61, equator_row=20)
print("kappa_g on v = pi/3:", lat.curvatures.kappa_g.mean(), "expected", 1 / np.tan(np.pi / 3))

# %%
# Convergence. Doubling the resolution shrinks the curvature error by about
# 2^6 until roundoff takes over.
prev = None
for n_u in (32, 64, 128, 256):
    f = sphere(1.0, n_u, n_u // 2 + 1)
    e = max(np.abs(f.surface.k1 + 1).max(), np.abs(f.surface.k2 + 1).max())
    ratio = "" if prev is None else f"  ({prev / e:.1f}x)"
    print(f"{n_u:4d} x {n_u // 2 + 1:<4d} {e:.2e}{ratio}")
    prev = e
