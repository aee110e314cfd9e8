"""First variations of curve and surface geometry under normal deformations.

Each analytic formula has a finite-difference counterpart that perturbs the
samples by ``+-eps`` along the deformation, rebuilds the geometry from
scratch and takes a central difference. The two routes share only the
discrete flag, not the variation formulas.
"""

from dataclasses import dataclass

import numpy as np

from .geomcore import (
    arc_length_derivative,
    curve_samples,
    fundamental_forms,
    surface_gradient,
)

__all__ = [
    "CurveVariation",
    "SurfaceVariation",
    "analytic_curve_variation",
    "numeric_curve_variation",
    "curve_variation_from_field",
    "analytic_surface_variation",
    "numeric_surface_variation",
    "relative_error",
    "default_curve_eps",
    "default_surface_eps",
]


@dataclass(frozen=True, eq=False)
class CurveVariation:
    """Variation ``dr`` of the speed and ``dt`` of the unit tangent."""

    dr: np.ndarray
    dt: np.ndarray


@dataclass(frozen=True, eq=False)
class SurfaceVariation:
    """Variation ``dg`` of the induced metric and ``dnu`` of the unit normal."""

    dg: np.ndarray
    dnu: np.ndarray


def _as_curve_field(flag, h):
    h = np.asarray(h, dtype=float)
    return np.broadcast_to(h, (flag.n_u,)) if h.ndim == 0 else h


def _as_surface_field(flag, h):
    h = np.asarray(h, dtype=float)
    return np.broadcast_to(h, flag.interior_shape) if h.ndim == 0 else h


def analytic_curve_variation(flag, h1, h2_on_curve):
    """Speed and tangent variation for ``df = h1 n + h2 nu`` along the marked curve.

    ``dr = -r (h1 kg + h2 kn)`` and
    ``dt = (Ds h1 - h2 tg) n + (Ds h2 + h1 tg) nu``.
    """
    h1 = _as_curve_field(flag, h1)
    h2 = _as_curve_field(flag, h2_on_curve)
    curve, fr, ci = flag.curve, flag.frame, flag.curvatures
    r = curve.speed
    dr = -r * (h1 * ci.kappa_g + h2 * ci.kappa_n)
    cn = arc_length_derivative(h1, curve) - h2 * ci.tau_g
    cnu = arc_length_derivative(h2, curve) + h1 * ci.tau_g
    return CurveVariation(dr=dr, dt=cn[:, None] * fr.n + cnu[:, None] * fr.nu)


def default_curve_eps(flag):
    """1e-5 times the curve's length scale (length / 2 pi)."""
    curve = flag.curve
    return 1e-5 * float(np.sum(curve.speed * curve.weights)) / (2 * np.pi)


def numeric_curve_variation(flag, h1, h2_on_curve, eps=None):
    """Central-difference estimate of ``(dr, dt)``; default ``eps`` is 1e-5 x length scale."""
    h1 = _as_curve_field(flag, h1)
    h2 = _as_curve_field(flag, h2_on_curve)
    eps = default_curve_eps(flag) if eps is None else eps
    fr = flag.frame
    df = h1[:, None] * fr.n + h2[:, None] * fr.nu
    f = flag.curve_points
    plus = curve_samples(f + eps * df, flag.du, flag.periodic, flag.order)
    minus = curve_samples(f - eps * df, flag.du, flag.periodic, flag.order)
    return CurveVariation(
        dr=(plus.speed - minus.speed) / (2 * eps),
        dt=(plus.tangent - minus.tangent) / (2 * eps),
    )


def curve_variation_from_field(curve, df):
    """Linearized ``(dr, dt)`` of the discrete speed and tangent for any ``df``."""
    d = curve.d_du(np.asarray(df, dtype=float))
    t = curve.tangent
    dr = np.einsum("ik,ik->i", d, t)
    dt = (d - dr[:, None] * t) / curve.speed[:, None]
    return CurveVariation(dr=dr, dt=dt)


def analytic_surface_variation(flag, h2):
    """``dg = -2 h2 II`` (so ``g^{-1} dg = -2 h2 L``) and ``dnu = -(h_u, h_v) g^{-1} (F_u, F_v)^T``."""
    inv = flag.surface
    h2 = _as_surface_field(flag, h2)
    dg = -2 * h2[..., None, None] * inv.second
    grad = surface_gradient(h2, inv)
    return SurfaceVariation(dg=dg, dnu=-grad.vector)


def default_surface_eps(flag):
    return 1e-5 * flag.length_scale


def numeric_surface_variation(flag, h2, eps=None):
    """Central-difference estimate of ``(dg, dnu)`` for ``dF = h2 nu``."""
    h2 = _as_surface_field(flag, h2)
    eps = default_surface_eps(flag) if eps is None else eps
    dF = np.zeros_like(flag.grid)
    dF[:, 1:-1] = h2[..., None] * flag.surface.normal
    # pole rows never enter a stencil, so leaving them fixed is harmless
    def geometry(grid):
        return fundamental_forms(flag.with_grid(grid, validate=False))

    plus = geometry(flag.grid + eps * dF)
    minus = geometry(flag.grid - eps * dF)
    return SurfaceVariation(
        dg=(plus.g - minus.g) / (2 * eps),
        dnu=(plus.normal - minus.normal) / (2 * eps),
    )


def relative_error(approx, exact, axis=None, scale=None):
    """Max pointwise error ``|a - e| / (|e| + scale)`` with ``scale = max |e|``.

    ``axis`` names trailing axes reduced by a norm first (vectors, matrices).
    A numerically zero ``exact`` (max below 1e-14) falls back to ``scale = 1``.
    """
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    diff = approx - exact
    if axis is not None:
        diff = np.sqrt(np.sum(diff**2, axis=axis))
        mag = np.sqrt(np.sum(exact**2, axis=axis))
    else:
        diff, mag = np.abs(diff), np.abs(exact)
    if scale is None:
        scale = float(mag.max()) if mag.size else 0.0
        if scale < 1e-14:
            scale = 1.0
    return float(np.max(diff / (mag + scale)))
