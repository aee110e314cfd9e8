"""
What the metric ignores
=======================

Two kinds of motion should be invisible to the flag metric:

* reparameterizing the grid (as long as the marked row stays the marked row),
* deformations that only slide points along the surface and along the curve.

We try both on a bumpy sphere.
"""

# %%
import numpy as np

from flagmetric.metrics import (
    Reparameterization,
    TangentVector,
    apply_reparameterization,
    flag_metric,
    psi_project,
)
from flagmetric.shapes import bumpy_sphere
from flagmetric.validation import random_vertical_field

flag = bumpy_sphere(1.0, 0.05, 4, 128, 65)
rng = np.random.default_rng(1)


def speeds(f):
    # the same ambient functions, evaluated wherever the samples happen to be
    x, p = f.curve_points, f.interior
    return TangentVector(0.3 + x[:, 0] * x[:, 1], 1 + 0.4 * p[..., 0] - 0.3 * p[..., 2] ** 2)


G0 = flag_metric(flag, speeds(flag))
print("G =", G0)

# %%
# Random smooth reparameterizations. The grid gets resampled with cubic
# splines, so the metric only agrees to interpolation accuracy.
for k in range(5):
    g = apply_reparameterization(flag, Reparameterization.random(rng))
    print(f"gamma {k}: relative change {abs(flag_metric(g, speeds(g)) / G0 - 1):.1e}")

# %%
# Vertical fields: tangent to the surface, and tangent to the curve on the
# marked row. Their projection is zero up to rounding.
X_nu = np.zeros_like(flag.grid)
X_nu[:, 1:-1] = flag.surface.normal
ref = flag_metric(flag, psi_project(flag, X_nu))
ratios = [flag_metric(flag, psi_project(flag, random_vertical_field(flag, rng))) / ref for _ in range(20)]
print("largest G(vertical) / G(normal):", max(ratios))

# %%
# Rotating the whole flag doesn't change anything either, but the distance
# between a shape and its rotated copy is positive. Rigid motions are not
# factored out.
q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
rot = flag.with_grid(flag.grid @ q.T)
print("rotated:", abs(flag_metric(rot, speeds(flag)) / G0 - 1))
