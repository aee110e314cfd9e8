"""Elastic metrics on curves and surfaces and the 6-parameter flag metric.

The flag metric evaluates a tangent vector ``(h1, h2)`` of the shape space,
with ``h1`` a function on the marked curve (motion along the in-surface
normal ``n``) and ``h2`` a function on the surface (motion along ``nu``)::

    G(h1, h2) = a1 int_C (h1 kg + h2 kn)^2       + a2 int_S h2^2 (k1 - k2)^2
              + b1 int_C (Ds h1 - h2 tg)^2       + b2 int_S h2^2 (k1 + k2)^2
              + c1 int_C (Ds h2 + h1 tg)^2       + c2 int_S |grad h2|^2

Restricting the curve elastic metric with weights ``(a, b)`` and the surface
elastic metric with weights ``(a', b', c')`` to normal variations gives this
form with ``(a1, b1, c1, a2, b2, c2) = (a, b, b, 2a', 4b', c')``.
"""

from dataclasses import dataclass, field, fields
from typing import Callable

import numpy as np

from .errors import BadDimensions, NotADiffeo, NotSymmetric
from .geomcore import (
    arc_length_derivative,
    integrate_curve,
    integrate_surface,
    surface_gradient,
)

__all__ = [
    "MetricParams",
    "TangentVector",
    "psi_project",
    "curve_elastic_metric",
    "curve_elastic_energy",
    "surface_elastic_energy",
    "normal_curve_energy",
    "normal_surface_energy",
    "flag_metric",
    "Reparameterization",
    "apply_reparameterization",
    "transport_tangent",
]


def _dot(a, b):
    return np.einsum("...k,...k->...", a, b)


@dataclass(frozen=True)
class MetricParams:
    """Weights of the flag metric, optionally tagged with the elastic weights.

    ``a1, b1, c1`` weight the curve terms and ``a2, b2, c2`` the surface
    terms. ``elastic`` holds ``(a, b, a', b', c')`` when the instance was made
    by :meth:`from_elastic`, and is ``None`` otherwise.
    """

    a1: float = 1.0
    b1: float = 1.0
    c1: float = 1.0
    a2: float = 1.0
    b2: float = 1.0
    c2: float = 1.0
    elastic: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        for f in fields(self):
            if f.name == "elastic":
                continue
            if getattr(self, f.name) < 0:
                raise ValueError(f"weight {f.name} must be >= 0")
        if self.elastic is not None and min(self.elastic) < 0:
            raise ValueError("elastic weights must be >= 0")

    @classmethod
    def from_elastic(cls, a, b, a_prime, b_prime, c_prime):
        """Flag weights obtained by restricting the elastic metrics to normal variations."""
        return cls(
            a1=a,
            b1=b,
            c1=b,
            a2=2 * a_prime,
            b2=4 * b_prime,
            c2=c_prime,
            elastic=(a, b, a_prime, b_prime, c_prime),
        )

    @classmethod
    def from_sequence(cls, weights):
        weights = [float(w) for w in weights]
        if len(weights) != 6:
            raise ValueError(f"expected 6 weights a1,b1,c1,a2,b2,c2, got {len(weights)}")
        return cls(*weights)

    @property
    def curve_weights(self):
        return self.a1, self.b1, self.c1

    @property
    def surface_weights(self):
        return self.a2, self.b2, self.c2

    def as_tuple(self):
        return self.a1, self.b1, self.c1, self.a2, self.b2, self.c2


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Shape-space tangent vector: ``h1`` on curve samples, ``h2`` on interior nodes."""

    h1: np.ndarray
    h2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h1", np.asarray(self.h1, dtype=float))
        object.__setattr__(self, "h2", np.asarray(self.h2, dtype=float))

    def check(self, flag):
        if self.h1.shape != (flag.n_u,) or self.h2.shape != flag.interior_shape:
            raise BadDimensions(
                f"tangent vector shapes {self.h1.shape}, {self.h2.shape} do not match "
                f"flag ({flag.n_u},), {flag.interior_shape}"
            )
        return self

    def restrict_to_curve(self, flag):
        return self.h2[:, flag.curve_index]

    def __add__(self, other):
        return TangentVector(self.h1 + other.h1, self.h2 + other.h2)

    def __sub__(self, other):
        return TangentVector(self.h1 - other.h1, self.h2 - other.h2)

    def __mul__(self, s):
        return TangentVector(s * self.h1, s * self.h2)

    __rmul__ = __mul__

    def __neg__(self):
        return TangentVector(-self.h1, -self.h2)


def psi_project(flag, X):
    """Normal components ``(h1, h2)`` of a deformation field ``X`` (N_u, N_v, 3).

    ``h2 = <X, nu>`` at interior nodes and ``h1 = <X, n>`` on the marked row.
    Deformations tangent to the surface whose restriction to the curve is
    tangent to the curve are exactly the kernel.
    """
    X = np.asarray(X, dtype=float)
    if X.shape != flag.grid.shape:
        raise BadDimensions(f"deformation field shape {X.shape} != grid shape {flag.grid.shape}")
    h2 = _dot(X[:, 1:-1], flag.surface.normal)
    h1 = _dot(X[:, flag.equator_row], flag.frame.n)
    return TangentVector(h1, h2)


def curve_elastic_metric(curve, df1, df2, a, b):
    """Elastic inner product of two curve perturbations (per-sample R^3 vectors).

    Stretching (``a``) pairs the components of ``D_s df`` along ``t``;
    bending (``b``) pairs the components orthogonal to ``t``.
    """
    t = curve.tangent
    d1 = arc_length_derivative(df1, curve)
    d2 = arc_length_derivative(df2, curve)
    par1, par2 = _dot(d1, t), _dot(d2, t)
    perp1 = d1 - par1[:, None] * t
    perp2 = d2 - par2[:, None] * t
    return a * integrate_curve(par1 * par2, curve) + b * integrate_curve(_dot(perp1, perp2), curve)


def curve_elastic_energy(curve, dr, dt, a, b):
    """``a int (dr/r)^2 dl + b int |dt|^2 dl`` for speed/tangent variations."""
    dr = np.asarray(dr, dtype=float)
    dt = np.asarray(dt, dtype=float)
    stretch = integrate_curve((dr / curve.speed) ** 2, curve)
    bend = integrate_curve(_dot(dt, dt), curve)
    return a * stretch + b * bend


def surface_elastic_energy(inv, dg, dnu, a_prime, b_prime, c_prime, symmetrize=False):
    """Elastic energy of a surface perturbation given ``(dg, dnu)`` per node.

    ``a'`` weights ``Tr(B_0^2)`` where ``B = g^{-1} dg`` and ``B_0`` is its
    traceless part, ``b'`` weights ``Tr(B)^2`` and ``c'`` weights ``|dnu|^2``.

    Raises
    ------
    NotSymmetric
        If ``dg`` is not symmetric and ``symmetrize`` is false.
    """
    dg = np.asarray(dg, dtype=float)
    dnu = np.asarray(dnu, dtype=float)
    if dg.shape != inv.g.shape:
        raise BadDimensions(f"dg shape {dg.shape} != {inv.g.shape}")
    asym = np.abs(dg[..., 0, 1] - dg[..., 1, 0])
    if np.any(asym > 1e-12 * (1 + np.abs(dg).max())):
        if not symmetrize:
            raise NotSymmetric("dg must be symmetric (pass symmetrize=True to force)")
        dg = 0.5 * (dg + np.swapaxes(dg, -1, -2))
    B = inv.g_inv @ dg
    tr = B[..., 0, 0] + B[..., 1, 1]
    B0 = B - 0.5 * tr[..., None, None] * np.eye(2)
    tr_B0_sq = np.einsum("...ab,...ba->...", B0, B0)
    return (
        a_prime * integrate_surface(tr_B0_sq, inv)
        + b_prime * integrate_surface(tr**2, inv)
        + c_prime * integrate_surface(_dot(dnu, dnu), inv)
    )


def normal_curve_energy(flag, h1, h2_on_curve, a1, b1, c1):
    """Curve part of the flag metric for normal variation ``h1 n + h2 nu``."""
    curve, ci = flag.curve, flag.curvatures
    h1 = np.asarray(h1, dtype=float)
    h2c = np.asarray(h2_on_curve, dtype=float)
    if h1.shape != (curve.n,) or h2c.shape != (curve.n,):
        raise BadDimensions("h1 and h2|_C must have one value per curve sample")
    stretch = h1 * ci.kappa_g + h2c * ci.kappa_n
    in_surface = arc_length_derivative(h1, curve) - h2c * ci.tau_g
    out_surface = arc_length_derivative(h2c, curve) + h1 * ci.tau_g
    total = 0.0
    if a1:
        total += a1 * integrate_curve(stretch**2, curve)
    if b1:
        total += b1 * integrate_curve(in_surface**2, curve)
    if c1:
        total += c1 * integrate_curve(out_surface**2, curve)
    return total


def normal_surface_energy(inv, h2, a2, b2, c2):
    """Surface part of the flag metric for normal variation ``h2 nu``."""
    h2 = np.asarray(h2, dtype=float)
    if h2.shape != inv.k1.shape:
        raise BadDimensions(f"h2 shape {h2.shape} != {inv.k1.shape}")
    h2sq = h2 * h2
    total = 0.0
    if a2:
        total += a2 * integrate_surface(h2sq * (inv.k1 - inv.k2) ** 2, inv)
    if b2:
        total += b2 * integrate_surface(h2sq * (inv.k1 + inv.k2) ** 2, inv)
    if c2:
        total += c2 * integrate_surface(surface_gradient(h2, inv).sqnorm, inv)
    return total


def flag_metric(flag, tv, params=None):
    """Squared norm ``G(h1, h2)`` of a shape-space tangent vector."""
    params = MetricParams() if params is None else params
    tv.check(flag)
    h2c = tv.restrict_to_curve(flag)
    return normal_curve_energy(flag, tv.h1, h2c, *params.curve_weights) + normal_surface_energy(
        flag.surface, tv.h2, *params.surface_weights
    )


@dataclass(frozen=True)
class Reparameterization:
    """Equator-preserving grid diffeomorphism ``(u, v) -> (alpha(u), beta(u, v))``.

    ``alpha`` must be a lift of an orientation-preserving circle diffeomorphism
    (``alpha(u + 2 pi) = alpha(u) + 2 pi``). ``beta`` must fix the poles and the
    marked row and be increasing in ``v``. Both take and return arrays.
    """

    alpha: Callable = lambda u: u
    beta: Callable = lambda u, v: v

    @classmethod
    def random(cls, rng, v_eq=np.pi / 2, strength=0.3, modes=3):
        """Random smooth member of the group, with Jacobian bounded away from 0."""
        ks = np.arange(1, modes + 1)
        amp_a = rng.uniform(-1, 1, modes) / ks**2
        phase_a = rng.uniform(0, 2 * np.pi, modes)
        amp_a *= strength / np.sum(np.abs(amp_a) * ks)
        amp_b = rng.uniform(-1, 1, modes) / ks**2
        phase_b = rng.uniform(0, 2 * np.pi, modes)
        amp_b *= strength / np.sum(np.abs(amp_b))
        offset_b = rng.uniform(-1, 1) * strength / 2

        def alpha(u):
            u = np.asarray(u, dtype=float)
            return u + np.sum(amp_a * np.sin(np.multiply.outer(u, ks) + phase_a), axis=-1)

        def beta(u, v):
            u = np.asarray(u, dtype=float)
            v = np.asarray(v, dtype=float)
            c = offset_b + np.sum(amp_b * np.cos(np.multiply.outer(u, ks) + phase_b), axis=-1)
            # vanishes at both poles and on the marked row
            return v + 0.5 * c * np.sin(v) * np.sin(v - v_eq)

        return cls(alpha, beta)

    @classmethod
    def shift(cls, cells, n_u):
        du = 2 * np.pi / n_u
        return cls(lambda u: np.asarray(u, dtype=float) + cells * du)


def _check_diffeo(gamma, flag, A, B):
    wrap = gamma.alpha(np.array([0.0, 2 * np.pi]))
    if not np.isclose(wrap[1] - wrap[0], 2 * np.pi, rtol=0, atol=1e-9):
        raise NotADiffeo("alpha does not wrap once around the circle")
    da = np.diff(np.append(A[:, 0], A[0, 0] + 2 * np.pi))
    if np.any(da <= 0):
        raise NotADiffeo("alpha is not increasing on the grid")
    if np.any(np.diff(B, axis=1) <= 0):
        raise NotADiffeo("beta is not increasing in v on the grid")
    v = flag.v
    if not np.allclose(B[:, flag.equator_row], v[flag.equator_row], rtol=0, atol=1e-12):
        raise NotADiffeo("beta moves the marked row")
    if np.any(B < -1e-12) or np.any(B > np.pi + 1e-12):
        raise NotADiffeo("beta leaves the parameter domain")


def _pad_for_spline(values, n_u, pad, pole_fill):
    """Extend a (n_u, n_rows, ...) array periodically in u and across the poles in v.

    Across a pole ``F(u, -v) = F(u + pi, v)``; this needs an even ``n_u``.
    Otherwise rows are clamped.
    """
    wrapped = np.concatenate([values[-pad:], values, values[:pad]], axis=0)
    if n_u % 2 == 0 and pole_fill:
        half = n_u // 2
        flipped = np.roll(values, -half, axis=0)
        flipped = np.concatenate([flipped[-pad:], flipped, flipped[:pad]], axis=0)
        top = flipped[:, 1 : pad + 1][:, ::-1]
        bottom = flipped[:, -pad - 1 : -1][:, ::-1]
    else:
        top = np.repeat(wrapped[:, :1], pad, axis=1)
        bottom = np.repeat(wrapped[:, -1:], pad, axis=1)
    return np.concatenate([top, wrapped, bottom], axis=1)


def _resample(values, coords_u, coords_v, n_u, pole_fill=True, pad=16):
    """Cubic B-spline interpolation at fractional grid indices."""
    from scipy.ndimage import map_coordinates

    padded = _pad_for_spline(values, n_u, pad, pole_fill)
    cu = coords_u + pad
    cv = coords_v + pad
    if padded.ndim == 2:
        return map_coordinates(padded, [cu, cv], order=3, mode="nearest")
    return np.stack(
        [map_coordinates(padded[..., k], [cu, cv], order=3, mode="nearest") for k in range(padded.shape[-1])],
        axis=-1,
    )


def _gamma_on_grid(gamma, flag):
    U, V = np.meshgrid(flag.u, flag.v, indexing="ij")
    A = np.broadcast_to(gamma.alpha(U[:, 0])[:, None], U.shape)
    B = np.asarray(gamma.beta(U, V), dtype=float)
    return A, B


def apply_reparameterization(flag, gamma):
    """Resample ``flag`` at ``gamma(u_i, v_j)``, i.e. return ``F o gamma``.

    Exact when ``gamma`` is the identity or a shift by whole cells in ``u``;
    otherwise cubic-spline interpolation, periodic in ``u`` and continued
    across the poles in ``v``.

    Raises
    ------
    NotADiffeo
        If ``gamma`` fails to be an equator-preserving diffeomorphism on the grid.
    """
    if not flag.periodic:
        raise NotADiffeo("reparameterization needs a periodic flag")
    A, B = _gamma_on_grid(gamma, flag)
    _check_diffeo(gamma, flag, A, B)

    cells = (A[:, 0] - flag.u) / flag.du
    shift = np.round(cells[0])
    if np.allclose(cells, shift, rtol=0, atol=1e-10) and np.allclose(B, flag.v[None, :], rtol=0, atol=1e-14):
        return flag.with_grid(np.roll(flag.grid, -int(shift), axis=0))

    grid = _resample(flag.grid, A / flag.du, B / flag.dv, flag.n_u)
    return flag.with_grid(grid)


def transport_tangent(flag, tv, gamma):
    """Pull ``tv`` back along ``gamma``: ``(h1 o alpha, h2 o gamma)``.

    ``h2`` is only known on interior rows; the pole values needed by the
    spline are filled with the mean of the adjacent row.
    """
    A, B = _gamma_on_grid(gamma, flag)
    n_u = flag.n_u
    h2 = np.asarray(tv.h2, dtype=float)
    full = np.concatenate(
        [h2[:, :1].mean() * np.ones((n_u, 1)), h2, h2[:, -1:].mean() * np.ones((n_u, 1))], axis=1
    )
    h2_new = _resample(full, A / flag.du, B / flag.dv, n_u)[:, 1:-1]
    h1_wrapped = np.concatenate([tv.h1, tv.h1, tv.h1])
    from scipy.interpolate import CubicSpline

    u_ext = np.concatenate([flag.u - 2 * np.pi, flag.u, flag.u + 2 * np.pi])
    h1_new = CubicSpline(u_ext, h1_wrapped)(A[:, 0] % (2 * np.pi))
    return TangentVector(h1_new, h2_new)
