"""Discrete parameterized flags and their first/second-order invariants.

A flag is sampled on a longitude/colatitude grid ``grid[i, j] = F(u_i, v_j)``
with ``u`` periodic and ``v`` running pole to pole. Rows ``0`` and ``N_v - 1``
are the pole rows; they are stored but never enter a stencil, so every
invariant lives on the interior rows ``1 .. N_v - 2``. The marked curve is the
interior row ``equator_row``.

Sign conventions
----------------
``nu = F_v x F_u / |F_v x F_u|``. For the standard sphere parameterization
``(sin v cos u, sin v sin u, cos v)`` this is the outward normal, and the
second fundamental form ``II_ab = <F_ab, nu>`` then gives ``kappa_1 =
kappa_2 = -1/R`` on a sphere of radius ``R``. The curve tangent points in
the ``+u`` direction and ``n = nu x t``; the sign of ``kappa_g`` depends on
that choice. Only squares of signed quantities enter the metrics.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BadDimensions, DegenerateGrid
from .stencils import apply_along, diff_matrix

__all__ = [
    "ParameterizedFlag",
    "CurveSamples",
    "DarbouxFrame",
    "SurfaceInvariants",
    "CurveInvariants",
    "SurfaceGradient",
    "build_flag",
    "curve_samples",
    "fundamental_forms",
    "darboux_frame",
    "curve_invariants",
    "arc_length_derivative",
    "surface_gradient",
    "integrate_curve",
    "integrate_surface",
    "immersion_tolerance",
    "GridOps",
]


def _parameter_steps(n_u, n_v, periodic):
    du = 2 * np.pi / n_u if periodic else 2 * np.pi / (n_u - 1)
    dv = np.pi / (n_v - 1)
    return du, dv


@dataclass(frozen=True, eq=False)
class ParameterizedFlag:
    """Sampled embedding of the sphere with a marked curve row.

    Use :func:`build_flag` to construct a validated instance.

    Attributes
    ----------
    grid : ndarray, shape (N_u, N_v, 3)
        Samples ``F(u_i, v_j)``; read-only copy.
    equator_row : int
        Row index of the marked curve, ``0 < equator_row < N_v - 1``.
    periodic : bool
        ``False`` only for open test patches; then ``u`` uses one-sided
        stencils at the ends.
    order : int
        Accuracy order of the finite-difference stencils. Rows next to the
        poles (and the ends of open rows) use one-sided stencils of the same
        order.
    """

    grid: np.ndarray
    equator_row: int
    periodic: bool = True
    order: int = 6

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        if grid.ndim != 3 or grid.shape[2] != 3:
            raise BadDimensions(f"grid must have shape (N_u, N_v, 3), got {grid.shape}")
        n_u, n_v = grid.shape[:2]
        if n_u < 8 or n_v < 5:
            raise BadDimensions(f"need N_u >= 8 and N_v >= 5, got {n_u}x{n_v}")
        if not 0 < self.equator_row < n_v - 1:
            raise BadDimensions(f"equator_row must lie in (0, {n_v - 1}), got {self.equator_row}")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "equator_row", int(self.equator_row))

    @property
    def n_u(self):
        return self.grid.shape[0]

    @property
    def n_v(self):
        return self.grid.shape[1]

    @property
    def du(self):
        return _parameter_steps(self.n_u, self.n_v, self.periodic)[0]

    @property
    def dv(self):
        return _parameter_steps(self.n_u, self.n_v, self.periodic)[1]

    @property
    def u(self):
        return np.arange(self.n_u) * self.du

    @property
    def v(self):
        return np.arange(self.n_v) * self.dv

    @property
    def interior_shape(self):
        return (self.n_u, self.n_v - 2)

    @property
    def interior(self):
        """Grid restricted to the interior rows, shape (N_u, N_v - 2, 3)."""
        return self.grid[:, 1:-1]

    @property
    def curve_index(self):
        """Index of the marked row within :attr:`interior`."""
        return self.equator_row - 1

    @property
    def curve_points(self):
        return self.grid[:, self.equator_row]

    @property
    def length_scale(self):
        """RMS distance of the samples from their centroid."""
        pts = self.grid.reshape(-1, 3)
        return float(np.sqrt(np.mean(np.sum((pts - pts.mean(axis=0)) ** 2, axis=1))))

    @property
    def options(self):
        """Discretization options, for rebuilding a flag with the same layout."""
        return dict(periodic=self.periodic, order=self.order)

    def with_grid(self, grid, validate=True):
        """Same layout, new samples."""
        if validate:
            return build_flag(grid, self.equator_row, **self.options)
        return ParameterizedFlag(grid, self.equator_row, **self.options)

    @cached_property
    def ops(self):
        return GridOps.for_flag(self)

    @cached_property
    def surface(self):
        return fundamental_forms(self)

    @cached_property
    def curve(self):
        return curve_samples(self.curve_points, self.du, self.periodic, self.order)

    @cached_property
    def frame(self):
        return darboux_frame(self)

    @cached_property
    def curvatures(self):
        return curve_invariants(self)


@dataclass(frozen=True, eq=False)
class CurveSamples:
    """Points, speed and unit tangent along a sampled closed curve."""

    points: np.ndarray
    velocity: np.ndarray
    speed: np.ndarray
    tangent: np.ndarray
    du: float
    periodic: bool = True
    order: int = 6

    @property
    def n(self):
        return len(self.points)

    @cached_property
    def _D(self):
        return diff_matrix(self.n, self.du, 1, self.order, self.periodic)

    def d_du(self, values):
        """Derivative with respect to the curve parameter, along axis 0."""
        return apply_along(self._D, values, 0)

    @cached_property
    def weights(self):
        """Quadrature weights in the curve parameter."""
        w = np.full(self.n, self.du)
        if not self.periodic:
            w[[0, -1]] *= 0.5
        return w


class GridOps:
    """Derivatives of interior-node fields, shape (N_u, N_v - 2, ...)."""

    def __init__(self, n_u, m, du, dv, order=6, periodic=True):
        self.periodic = periodic
        self.D_u = diff_matrix(n_u, du, 1, order, periodic)
        self.D_uu = diff_matrix(n_u, du, 2, order, periodic)
        self.D_v = diff_matrix(m, dv, 1, order, False)
        self.D_vv = diff_matrix(m, dv, 2, order, False)

    @classmethod
    def for_flag(cls, flag):
        return cls(
            flag.n_u,
            flag.n_v - 2,
            flag.du,
            flag.dv,
            flag.order,
            flag.periodic,
        )

    def _centered(self, values):
        # Near a pole each row is a tiny circle around an O(1) offset; removing
        # the row mean avoids cancellation (the derivative of a constant is 0).
        values = np.asarray(values, dtype=float)
        return values - values.mean(axis=0) if self.periodic else values

    def d_u(self, values):
        return apply_along(self.D_u, self._centered(values), 0)

    def d_uu(self, values):
        return apply_along(self.D_uu, self._centered(values), 0)

    def d_v(self, values):
        return apply_along(self.D_v, values, 1)

    def d_vv(self, values):
        return apply_along(self.D_vv, values, 1)


@dataclass(frozen=True, eq=False)
class DarbouxFrame:
    """Orthonormal frame ``(t, n, nu)`` per curve sample, ``n = nu x t``."""

    t: np.ndarray
    n: np.ndarray
    nu: np.ndarray


@dataclass(frozen=True, eq=False)
class SurfaceInvariants:
    """Per-interior-node geometry of the sampled surface.

    All arrays are indexed ``[i, j]`` over ``N_u x (N_v - 2)`` interior nodes.
    ``g``, ``second`` and ``shape_operator`` have trailing shape (2, 2) in the
    coordinate order ``(u, v)``.
    """

    F_u: np.ndarray
    F_v: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    second: np.ndarray
    shape_operator: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    normal: np.ndarray
    sqrt_det_g: np.ndarray
    area_weights: np.ndarray
    ops: GridOps

    @property
    def mean_curvature(self):
        return 0.5 * (self.k1 + self.k2)

    @property
    def gauss_curvature(self):
        return self.k1 * self.k2

    def d_u(self, values):
        return self.ops.d_u(values)

    def d_v(self, values):
        return self.ops.d_v(values)


@dataclass(frozen=True, eq=False)
class CurveInvariants:
    kappa_g: np.ndarray
    kappa_n: np.ndarray
    tau_g: np.ndarray


@dataclass(frozen=True, eq=False)
class SurfaceGradient:
    """Gradient of a scalar field with respect to the induced metric.

    ``coords`` holds ``g^{-1} (h_u, h_v)``, ``vector`` its image
    ``coords[..., 0] F_u + coords[..., 1] F_v`` in R^3 and ``sqnorm`` the
    squared length ``(h_u, h_v) g^{-1} (h_u, h_v)^T``.
    """

    h_u: np.ndarray
    h_v: np.ndarray
    coords: np.ndarray
    vector: np.ndarray
    sqnorm: np.ndarray


def _dot(a, b):
    return np.einsum("...k,...k->...", a, b)


def _inv2(m):
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    inv = np.empty_like(m)
    inv[..., 0, 0] = m[..., 1, 1]
    inv[..., 1, 1] = m[..., 0, 0]
    inv[..., 0, 1] = -m[..., 0, 1]
    inv[..., 1, 0] = -m[..., 1, 0]
    return inv / det[..., None, None], det


def _gram(a, b):
    g = np.empty(a.shape[:-1] + (2, 2))
    g[..., 0, 0] = _dot(a, a)
    g[..., 0, 1] = g[..., 1, 0] = _dot(a, b)
    g[..., 1, 1] = _dot(b, b)
    return g


def _principal_curvatures(g, II):
    """Eigenvalues of ``g^{-1} II``, largest first.

    Computed from the symmetric matrix ``R^{-T} II R^{-1}`` (``g = R^T R``)
    so the discriminant is a sum of squares; the closed form on ``L`` itself
    loses half the digits at umbilics.
    """
    r11 = np.sqrt(g[..., 0, 0])
    r12 = g[..., 0, 1] / r11
    r22 = np.sqrt(g[..., 1, 1] - r12 * r12)
    s11 = II[..., 0, 0] / (r11 * r11)
    s12 = (II[..., 0, 1] - r12 * s11 * r11) / (r11 * r22)
    s22 = (II[..., 1, 1] - 2 * r12 * r11 * s12 * r22 / r11 - r12 * r12 * s11) / (r22 * r22)
    mean = 0.5 * (s11 + s22)
    disc = np.hypot(0.5 * (s11 - s22), s12)
    return mean + disc, mean - disc


def immersion_tolerance(grid):
    """Scale-aware degeneracy threshold: 1e-12 * (median edge length)**4."""
    inner = grid[:, 1:-1]
    edges = np.concatenate(
        [
            np.linalg.norm(np.diff(inner, axis=0), axis=-1).ravel(),
            np.linalg.norm(np.diff(inner, axis=1), axis=-1).ravel(),
        ]
    )
    return 1e-12 * float(np.median(edges)) ** 4


def _check_immersion(flag, F_u, F_v):
    eps = immersion_tolerance(flag.grid)
    # det(g) scaled to edge units so it compares against eps (length**4)
    det = _dot(F_u, F_u) * _dot(F_v, F_v) - _dot(F_u, F_v) ** 2
    det = det * (flag.du * flag.dv) ** 2
    if not np.all(det > eps):
        i, j = np.unravel_index(np.argmin(det), det.shape)
        raise DegenerateGrid(f"det(g) <= {eps:.3g} at interior node ({i}, {j + 1})")
    # Centered stencils cannot see a repeated row; every grid cell between
    # interior rows must also have non-vanishing diagonals' cross product.
    inner = flag.interior
    nxt = np.roll(inner, -1, axis=0) if flag.periodic else inner[1:]
    cur = inner if flag.periodic else inner[:-1]
    d1 = nxt[:, 1:] - cur[:, :-1]
    d2 = cur[:, 1:] - nxt[:, :-1]
    area2 = np.sum(np.cross(d1, d2) ** 2, axis=-1)
    if not np.all(area2 > eps):
        i, j = np.unravel_index(np.argmin(area2), area2.shape)
        raise DegenerateGrid(f"collapsed grid cell at ({i}, {j + 1})")


def build_flag(grid, equator_row, periodic=True, order=6):
    """Validate samples and return a :class:`ParameterizedFlag`.

    Raises
    ------
    BadDimensions
        If ``grid`` is not ``(N_u, N_v, 3)`` with ``N_u >= 8``, ``N_v >= 5``, or
        ``equator_row`` is not an interior row.
    DegenerateGrid
        If the sampled map is not an immersion at some interior node or cell.
    """
    flag = ParameterizedFlag(grid, equator_row, periodic=periodic, order=order)
    flag.surface  # noqa: B018  (computing the forms runs the immersion check)
    return flag


def fundamental_forms(flag):
    """First and second fundamental forms, shape operator and principal curvatures."""
    Fi = flag.interior
    n_u = Fi.shape[0]
    ops = flag.ops

    F_u = ops.d_u(Fi)
    F_v = ops.d_v(Fi)
    _check_immersion(flag, F_u, F_v)
    F_uu = ops.d_uu(Fi)
    F_vv = ops.d_vv(Fi)
    F_uv = ops.d_v(F_u)

    N = np.cross(F_v, F_u)
    nu = N / np.linalg.norm(N, axis=-1, keepdims=True)

    g = _gram(F_u, F_v)
    g_inv, det_g = _inv2(g)
    II = np.empty_like(g)
    II[..., 0, 0] = _dot(F_uu, nu)
    II[..., 0, 1] = II[..., 1, 0] = _dot(F_uv, nu)
    II[..., 1, 1] = _dot(F_vv, nu)
    L = g_inv @ II

    k1, k2 = _principal_curvatures(g, II)

    sqrt_det = np.sqrt(det_g)
    w_u = np.full(n_u, flag.du)
    if not flag.periodic:
        w_u[[0, -1]] *= 0.5
    area_weights = sqrt_det * w_u[:, None] * flag.dv

    return SurfaceInvariants(
        F_u=F_u,
        F_v=F_v,
        g=g,
        g_inv=g_inv,
        second=II,
        shape_operator=L,
        k1=k1,
        k2=k2,
        normal=nu,
        sqrt_det_g=sqrt_det,
        area_weights=area_weights,
        ops=ops,
    )


def curve_samples(points, du, periodic=True, order=6):
    """Speed and unit tangent of a sampled curve ``points[i] = f(u_i)``."""
    points = np.asarray(points, dtype=float)
    D = diff_matrix(len(points), du, 1, order, periodic)
    vel = D @ points
    speed = np.linalg.norm(vel, axis=-1)
    return CurveSamples(
        points=points,
        velocity=vel,
        speed=speed,
        tangent=vel / speed[:, None],
        du=du,
        periodic=periodic,
        order=order,
    )


def darboux_frame(flag):
    """Darboux frame along the marked row.

    ``t`` comes from the curve itself, ``nu`` is the surface normal on that
    row, re-orthogonalized against ``t``, and ``n = nu x t``.
    """
    t = flag.curve.tangent
    nu = flag.surface.normal[:, flag.curve_index]
    nu = nu - _dot(nu, t)[:, None] * t
    nu = nu / np.linalg.norm(nu, axis=-1, keepdims=True)
    n = np.cross(nu, t)
    return DarbouxFrame(t=t, n=n, nu=nu)


def curve_invariants(flag):
    """Geodesic curvature, normal curvature and geodesic torsion of the marked curve."""
    curve, fr = flag.curve, flag.frame
    r = curve.speed
    t_dot = curve.d_du(fr.t)
    n_dot = curve.d_du(fr.n)
    return CurveInvariants(
        kappa_g=_dot(t_dot, fr.n) / r,
        kappa_n=_dot(t_dot, fr.nu) / r,
        tau_g=_dot(n_dot, fr.nu) / r,
    )


def arc_length_derivative(h, curve):
    """``D_s h = h' / r`` for a field sampled along ``curve``."""
    h = np.asarray(h, dtype=float)
    if h.shape[0] != curve.n:
        raise BadDimensions(f"field has {h.shape[0]} samples, curve has {curve.n}")
    d = curve.d_du(h)
    r = curve.speed.reshape((-1,) + (1,) * (h.ndim - 1))
    return d / r


def surface_gradient(h, inv):
    """Gradient of ``h`` (interior-node field) in the induced metric."""
    h = np.asarray(h, dtype=float)
    if h.shape != inv.k1.shape:
        raise BadDimensions(f"field shape {h.shape} != interior shape {inv.k1.shape}")
    h_u, h_v = inv.d_u(h), inv.d_v(h)
    dh = np.stack([h_u, h_v], axis=-1)
    coords = np.einsum("...ab,...b->...a", inv.g_inv, dh)
    vector = coords[..., :1] * inv.F_u + coords[..., 1:] * inv.F_v
    return SurfaceGradient(
        h_u=h_u, h_v=h_v, coords=coords, vector=vector, sqnorm=_dot(dh, coords)
    )


def integrate_curve(w, curve):
    """``int_C w dl`` with the periodic trapezoidal rule."""
    w = np.asarray(w, dtype=float)
    if w.shape != (curve.n,):
        raise BadDimensions(f"field shape {w.shape} != ({curve.n},)")
    return float(np.sum(w * curve.speed * curve.weights))


def integrate_surface(w, inv):
    """``int_Sigma w dA`` over the interior nodes."""
    w = np.asarray(w, dtype=float)
    if w.shape != inv.area_weights.shape:
        raise BadDimensions(f"field shape {w.shape} != {inv.area_weights.shape}")
    return float(np.sum(w * inv.area_weights))
