"""
Checking variation formulas numerically
=======================================

When a flag moves with normal speeds ``h1`` (sliding the curve inside the
surface) and ``h2`` (pushing the surface along its normal), the speed of
the curve and the unit tangent change at rates given by closed formulas.
Here we compare those formulas with brute-force central differences on an
ellipsoid.
"""

# %%
import numpy as np

from flagmetric.geomcore import surface_gradient
from flagmetric.shapes import ellipsoid
from flagmetric.variations import (
    analytic_curve_variation,
    analytic_surface_variation,
    numeric_curve_variation,
    numeric_surface_variation,
    relative_error,
)

flag = ellipsoid(1.0, 1.0, 2.0, 128, 65)
u = flag.u

# %%
# Curve first. ``h2`` is only needed on the marked row here.
h1 = 0.3 + np.cos(2 * u)
h2 = np.sin(u) + 0.5 * np.cos(3 * u)
exact = analytic_curve_variation(flag, h1, h2)
approx = numeric_curve_variation(flag, h1, h2, eps=1e-5)
print("dr:", relative_error(approx.dr, exact.dr))
print("dt:", relative_error(approx.dt, exact.dt, axis=-1))

# %%
# The surface normal. Its rate of change has the same length as the surface
# gradient of ``h2``; with ``h2 = z`` the gradient is nonzero almost everywhere.
h = flag.interior[..., 2]
num = numeric_surface_variation(flag, h, eps=1e-5)
grad2 = surface_gradient(h, flag.surface).sqnorm
print("|dnu|^2 vs |grad h|^2:", relative_error(np.sum(num.dnu**2, -1), grad2))

# %%
# And the metric: ``g^-1 dg`` should be ``-2 h L`` node by node.
B = np.linalg.solve(flag.surface.g, num.dg)
print("shape operator:", relative_error(B, -2 * h[..., None, None] * flag.surface.shape_operator, axis=(-2, -1)))

# %%
# Shrinking eps stops paying off around 1e-4. What's left is discretization
# error: the formula uses curvatures computed on the grid, while the finite
# difference differentiates the sampled curve directly.
for eps in (1e-3, 1e-4, 1e-5, 1e-6, 1e-7):
    a = numeric_curve_variation(flag, h1, h2, eps=eps)
    print(f"eps={eps:.0e}  dr err {relative_error(a.dr, exact.dr):.2e}")

# %%
# The analytic surface variation is what the metric actually uses.
sv = analytic_surface_variation(flag, h)
print("closed form vs gradient:", relative_error(np.sum(sv.dnu**2, -1), grad2))
