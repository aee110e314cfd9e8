"""Analytic flag fixtures on the longitude/colatitude grid."""

import numpy as np

from .errors import UnknownShape
from .geomcore import build_flag

__all__ = [
    "parameter_grid",
    "sample",
    "sphere",
    "ellipsoid",
    "bumpy_sphere",
    "plane_patch",
    "SHAPES",
    "make_shape",
    "default_equator_row",
]


def parameter_grid(n_u, n_v):
    """Meshgrid ``(U, V)`` of shape (n_u, n_v); ``u`` periodic, ``v`` pole to pole."""
    u = 2 * np.pi * np.arange(n_u) / n_u
    v = np.pi * np.arange(n_v) / (n_v - 1)
    return np.meshgrid(u, v, indexing="ij")


def sample(fn, n_u, n_v):
    """Evaluate ``fn(U, V) -> (x, y, z)`` on the parameter grid."""
    U, V = parameter_grid(n_u, n_v)
    return np.stack(fn(U, V), axis=-1)


def default_equator_row(n_v):
    return int(round((n_v - 1) / 2))


def _ellipsoid_map(a, b, c):
    def fn(U, V):
        return a * np.sin(V) * np.cos(U), b * np.sin(V) * np.sin(U), c * np.cos(V)

    return fn


def sphere(radius=1.0, n_u=64, n_v=33, equator_row=None, **kw):
    return ellipsoid(radius, radius, radius, n_u, n_v, equator_row, **kw)


def ellipsoid(a=1.0, b=1.0, c=2.0, n_u=64, n_v=33, equator_row=None, **kw):
    if equator_row is None:
        equator_row = default_equator_row(n_v)
    return build_flag(sample(_ellipsoid_map(a, b, c), n_u, n_v), equator_row, **kw)


def bumpy_sphere(radius=1.0, amplitude=0.05, frequency=4, n_u=64, n_v=33, equator_row=None, **kw):
    """Sphere with a smooth radial bump ``1 + A (sin^k v cos k u + cos k v)``.

    Both bump terms are polynomials in the Cartesian coordinates of the
    unit sphere, so the surface stays smooth at the poles.
    """
    k = int(frequency)

    def fn(U, V):
        rho = radius * (1 + amplitude * (np.sin(V) ** k * np.cos(k * U) + np.cos(k * V)))
        return rho * np.sin(V) * np.cos(U), rho * np.sin(V) * np.sin(U), rho * np.cos(V)

    if equator_row is None:
        equator_row = default_equator_row(n_v)
    return build_flag(sample(fn, n_u, n_v), equator_row, **kw)


def plane_patch(n_u=16, n_v=12, equator_row=None, tilt=None, **kw):
    """Open planar test patch with a straight marked row.

    The patch is the image of ``(u, v) -> u e1 + v e2`` under an optional
    rotation ``tilt`` (3x3). It is not closed, so it is built with
    ``periodic=False``.
    """
    u = 2 * np.pi * np.arange(n_u) / (n_u - 1)
    v = np.pi * np.arange(n_v) / (n_v - 1)
    U, V = np.meshgrid(u, v, indexing="ij")
    grid = np.stack([U, V, np.zeros_like(U)], axis=-1)
    if tilt is not None:
        grid = grid @ np.asarray(tilt).T
    if equator_row is None:
        equator_row = default_equator_row(n_v)
    return build_flag(grid, equator_row, periodic=False, **kw)


SHAPES = {
    "sphere": sphere,
    "ellipsoid": ellipsoid,
    "bumpy_sphere": bumpy_sphere,
}


def make_shape(name, params=(), n_u=64, n_v=33, **kw):
    """Build a named analytic shape; ``params`` are its positional parameters."""
    try:
        fn = SHAPES[name]
    except KeyError:
        raise UnknownShape(f"unknown shape {name!r}; choose from {sorted(SHAPES)}") from None
    return fn(*params, n_u=n_u, n_v=n_v, **kw)
