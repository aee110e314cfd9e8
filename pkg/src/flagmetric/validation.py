"""Self-checks comparing analytic formulas against independent numerics.

Every suite returns a list of :class:`Check` records. ``validate_flag`` runs
them all; the CLI turns a failed check into exit code 2.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .geomcore import surface_gradient
from .metrics import (
    MetricParams,
    Reparameterization,
    TangentVector,
    apply_reparameterization,
    flag_metric,
    psi_project,
    transport_tangent,
)
from .variations import (
    analytic_curve_variation,
    analytic_surface_variation,
    numeric_curve_variation,
    numeric_surface_variation,
    relative_error,
)

__all__ = [
    "Check",
    "DEFAULT_TOLERANCES",
    "test_fields",
    "curve_variation_suite",
    "normal_variation_suite",
    "shape_operator_suite",
    "gauge_suite",
    "kernel_suite",
    "random_vertical_field",
    "validate_flag",
]

DEFAULT_TOLERANCES = {
    "curve_variation": 1e-4,
    "normal_variation": 1e-4,
    "normal_variation_algebraic": 1e-12,
    "shape_operator": 1e-4,
    "gauge": 1e-3,
    "kernel": 1e-18,
}


@dataclass
class Check:
    name: str
    value: float
    tol: float

    @property
    def passed(self):
        return bool(np.isfinite(self.value) and self.value <= self.tol)

    def as_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def test_fields(flag):
    """The three surface fields used by the normal-variation checks: 1, z and sin 2u sin v."""
    U, V = np.meshgrid(flag.u, flag.v[1:-1], indexing="ij")
    return {
        "const": np.ones_like(U),
        "z": flag.interior[..., 2].copy(),
        "sin2u_sinv": np.sin(2 * U) * np.sin(V),
    }


test_fields.__test__ = False  # not a pytest test


def curve_variation_suite(flag, eps=None, tol=None):
    tol = DEFAULT_TOLERANCES["curve_variation"] if tol is None else tol
    u = flag.u
    h1 = 0.3 + np.cos(2 * u)
    h2 = np.sin(u) + 0.5 * np.cos(3 * u)
    exact = analytic_curve_variation(flag, h1, h2)
    approx = numeric_curve_variation(flag, h1, h2, eps)
    return [
        Check("curve_variation.dr", relative_error(approx.dr, exact.dr), tol),
        Check("curve_variation.dt", relative_error(approx.dt, exact.dt, axis=-1), tol),
    ]


def normal_variation_suite(flag, eps=None, tol=None, tol_algebraic=None):
    """``|dnu|^2`` by finite differences, and from the closed form, against ``|grad h2|^2``."""
    tol = DEFAULT_TOLERANCES["normal_variation"] if tol is None else tol
    tol_alg = DEFAULT_TOLERANCES["normal_variation_algebraic"] if tol_algebraic is None else tol_algebraic
    out = []
    for name, h2 in test_fields(flag).items():
        grad2 = surface_gradient(h2, flag.surface).sqnorm
        numeric = numeric_surface_variation(flag, h2, eps)
        closed = analytic_surface_variation(flag, h2)
        out.append(Check(f"normal_variation.{name}", relative_error(np.sum(numeric.dnu**2, -1), grad2), tol))
        out.append(
            Check(f"normal_variation_algebraic.{name}", relative_error(np.sum(closed.dnu**2, -1), grad2), tol_alg)
        )
    return out


def shape_operator_suite(flag, eps=None, tol=None):
    """Finite-difference ``g^-1 dg`` against ``-2 h2 L``, Frobenius norm per node."""
    tol = DEFAULT_TOLERANCES["shape_operator"] if tol is None else tol
    inv = flag.surface
    out = []
    for name, h2 in test_fields(flag).items():
        numeric = numeric_surface_variation(flag, h2, eps)
        B = np.linalg.solve(inv.g, numeric.dg)
        expected = -2 * h2[..., None, None] * inv.shape_operator
        out.append(Check(f"shape_operator.{name}", relative_error(B, expected, axis=(-2, -1)), tol))
    return out


def _ambient_fields(points):
    x, y, z = points[..., 0], points[..., 1], points[..., 2]
    return 0.3 + x * y + 0.5 * z, 1 + 0.4 * x - 0.3 * z * z + 0.2 * y


def gauge_suite(flag, n_trials=10, seed=0, params=None, tol=None):
    """Relative change of G under random equator-preserving reparameterizations.

    The tangent vector comes from fixed ambient functions, so evaluating them
    on the resampled grid gives the transported vector directly.
    """
    tol = DEFAULT_TOLERANCES["gauge"] if tol is None else tol
    rng = np.random.default_rng(seed)
    v_eq = float(flag.v[flag.equator_row])

    def tangent(f):
        return TangentVector(_ambient_fields(f.curve_points)[0], _ambient_fields(f.interior)[1])

    base = flag_metric(flag, tangent(flag), params)
    worst = worst_transport = 0.0
    for _ in range(n_trials):
        gamma = Reparameterization.random(rng, v_eq=v_eq)
        moved = apply_reparameterization(flag, gamma)
        worst = max(worst, abs(flag_metric(moved, tangent(moved), params) / base - 1))
        carried = transport_tangent(flag, tangent(flag), gamma)
        worst_transport = max(worst_transport, abs(flag_metric(moved, carried, params) / base - 1))
    return [
        Check("gauge.ambient_fields", worst, tol),
        Check("gauge.transported", worst_transport, tol),
    ]


def random_vertical_field(flag, rng, modes=3):
    """``X = a F_u + b F_v`` with random smooth ``a, b`` and ``b = 0`` on the marked row.

    Tangent to the surface everywhere and tangent to the curve on it.
    """
    inv = flag.surface
    U, V = np.meshgrid(flag.u, flag.v[1:-1], indexing="ij")
    v_eq = flag.v[flag.equator_row]

    def smooth():
        c = rng.normal(size=(modes, modes, 2))
        out = np.zeros_like(U)
        for k in range(modes):
            for l in range(modes):
                out += c[k, l, 0] * np.cos(k * U + l * V) + c[k, l, 1] * np.sin(k * U + l * V)
        return out

    a = smooth()
    b = smooth() * np.sin(V - v_eq)
    b[:, flag.curve_index] = 0.0
    X = np.zeros_like(flag.grid)
    X[:, 1:-1] = a[..., None] * inv.F_u + b[..., None] * inv.F_v
    return X


def kernel_suite(flag, n_trials=100, seed=0, params=None, tol=None):
    """Largest ``G(Psi(X)) / G(unit normal)`` over random vertical fields."""
    tol = DEFAULT_TOLERANCES["kernel"] if tol is None else tol
    rng = np.random.default_rng(seed)
    X_nu = np.zeros_like(flag.grid)
    X_nu[:, 1:-1] = flag.surface.normal
    ref = flag_metric(flag, psi_project(flag, X_nu), params)
    worst = max(
        flag_metric(flag, psi_project(flag, random_vertical_field(flag, rng)), params) / ref
        for _ in range(n_trials)
    )
    return [Check("kernel.vertical_fields", worst, tol)]


def validate_flag(flag, eps=None, tolerances=None, seed=0, params=None, gauge_trials=10, kernel_trials=100):
    tols = dict(DEFAULT_TOLERANCES)
    tols.update(tolerances or {})
    params = MetricParams() if params is None else params
    checks = []
    checks += curve_variation_suite(flag, eps, tols["curve_variation"])
    checks += normal_variation_suite(flag, eps, tols["normal_variation"], tols["normal_variation_algebraic"])
    checks += shape_operator_suite(flag, eps, tols["shape_operator"])
    if flag.periodic:
        checks += gauge_suite(flag, gauge_trials, seed, params, tols["gauge"])
    checks += kernel_suite(flag, kernel_trials, seed, params, tols["kernel"])
    return checks
