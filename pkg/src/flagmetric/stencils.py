"""Finite-difference differentiation matrices on uniform 1D grids."""

from functools import lru_cache
from fractions import Fraction

import numpy as np


def fd_weights(offsets, deriv):
    """Weights w such that sum(w[k] f(x + offsets[k] h)) ~ h**deriv f^(deriv)(x).

    Fornberg's recursion in exact rational arithmetic: a floating-point
    Vandermonde solve leaves the weights of wide one-sided stencils with a
    nonzero sum, which shows up as an O(eps / h**deriv) consistency error.
    """
    xs = [Fraction(o).limit_denominator(10**6) for o in offsets]
    n = len(xs)
    c = [[Fraction(0)] * (deriv + 1) for _ in range(n)]
    c[0][0] = Fraction(1)
    c1 = Fraction(1)
    c4 = xs[0]
    for i in range(1, n):
        mn = min(i, deriv)
        c2 = Fraction(1)
        c5 = c4
        c4 = xs[i]
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2
            for k in range(mn, 0, -1):
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3
            c[j][0] = c4 * c[j][0] / c3
        c1 = c2
    return np.array([float(row[deriv]) for row in c])


@lru_cache(maxsize=64)
def _diff_matrix(n, deriv, order, periodic):
    if periodic:
        half = (deriv + 1) // 2 + order // 2 - 1
        offsets = np.arange(-half, half + 1)
        w = fd_weights(offsets, deriv)
        D = np.zeros((n, n))
        for o, wk in zip(offsets, w):
            D[np.arange(n), (np.arange(n) + o) % n] += wk
        return D

    central_half = (deriv + 1) // 2 + order // 2 - 1
    # one-sided stencil width; tiny grids fall back to whatever fits
    width = min(deriv + order, n)
    if width <= deriv:
        raise ValueError(f"need more than {deriv} samples, got {n}")
    D = np.zeros((n, n))
    for i in range(n):
        if central_half <= i < n - central_half and 2 * central_half + 1 <= n:
            offsets = np.arange(-central_half, central_half + 1)
        else:
            lo = min(max(i - width // 2, 0), n - width)
            offsets = np.arange(lo, lo + width) - i
        D[i, i + offsets] = fd_weights(offsets, deriv)
    D.setflags(write=False)
    return D


def diff_matrix(n, h, deriv=1, order=6, periodic=False):
    """Dense (n, n) matrix approximating d^deriv/dx^deriv with the given accuracy.

    Periodic grids use centered stencils everywhere. Open grids use centered
    stencils in the bulk and one-sided stencils of width ``deriv + order`` at
    the ends, so no sample outside ``[0, n)`` is ever touched.
    """
    if order % 2:
        raise ValueError("order must be even")
    return _diff_matrix(int(n), int(deriv), int(order), bool(periodic)) / h**deriv


def apply_along(D, values, axis):
    """Apply a differentiation matrix along one axis of ``values``."""
    values = np.asarray(values, dtype=float)
    moved = np.moveaxis(values, axis, 0)
    out = np.tensordot(D, moved, axes=(1, 0))
    return np.moveaxis(out, 0, axis)

