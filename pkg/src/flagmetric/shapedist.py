"""Path energy and geodesic-distance estimates by discrete path straightening.

A path is a list of flags ``F_0 .. F_K`` on one grid layout. Its energy is
the forward-difference sum

    E = sum_k G_{F_k}(Psi_{F_k}((F_{k+1} - F_k) / dt)) dt,   dt = 1 / K,

and the distance estimate is ``sqrt(E)`` after minimizing ``E`` over the
interior flags with the endpoints held fixed.
"""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BadDimensions, DegenerateGrid, LineSearchFailed
from .metrics import MetricParams, flag_metric, psi_project

__all__ = [
    "FlagPath",
    "StraightenOptions",
    "StraightenResult",
    "linear_path",
    "path_energy",
    "step_energy",
    "normal_basis",
    "straighten",
    "distance",
]

log = logging.getLogger(__name__)


def _default_workers():
    try:
        return max(1, int(os.environ.get("FLAGMETRIC_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class FlagPath:
    """Time-ordered flags sharing one grid layout; ``dt = 1 / K``."""

    flags: tuple

    def __post_init__(self):
        flags = tuple(self.flags)
        if len(flags) < 2:
            raise BadDimensions("a path needs at least two flags")
        first = flags[0]
        for f in flags[1:]:
            if f.grid.shape != first.grid.shape or f.equator_row != first.equator_row:
                raise BadDimensions("all flags on a path must share grid shape and equator row")
        object.__setattr__(self, "flags", flags)

    @property
    def K(self):
        return len(self.flags) - 1

    @property
    def dt(self):
        return 1.0 / self.K

    def __len__(self):
        return len(self.flags)

    def __getitem__(self, k):
        return self.flags[k]

    def reversed(self):
        return FlagPath(self.flags[::-1])


@dataclass
class StraightenOptions:
    """Optimizer settings for :func:`straighten`.

    ``u_modes``/``v_modes`` size the reduced basis of normal perturbations;
    ``curve_modes`` the number of Fourier modes sliding the marked curve.
    """

    max_iters: int = 20
    step: float = 1.0
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 30
    tol: float = 1e-6
    probe_eps: float = 1e-4
    u_modes: int = 2
    v_modes: int = 4
    curve_modes: int = 2
    workers: int = field(default_factory=_default_workers)


@dataclass
class StraightenResult:
    path: FlagPath
    energy_history: list
    iterations: int
    converged: bool
    line_search_failed: bool = False
    message: str = ""

    @property
    def energy(self):
        return self.energy_history[-1]


def linear_path(flag_a, flag_b, K=16):
    """Straight-line interpolation of the grids.

    Intermediate flags that fail the immersion check are replaced by a blend
    of normal offsets from both endpoints.
    """
    if flag_a.grid.shape != flag_b.grid.shape or flag_a.equator_row != flag_b.equator_row:
        raise BadDimensions("endpoint flags must share grid shape and equator row")
    A, B = flag_a.grid, flag_b.grid
    flags = [flag_a]
    for k in range(1, K):
        s = k / K
        try:
            flags.append(flag_a.with_grid((1 - s) * A + s * B))
        except DegenerateGrid:
            flags.append(flag_a.with_grid(_normal_blend(flag_a, flag_b, s)))
    flags.append(flag_b)
    return FlagPath(flags)


def _normal_offset(flag, target):
    X = np.zeros_like(flag.grid)
    nu = flag.surface.normal
    X[:, 1:-1] = np.einsum("ijk,ijk->ij", target[:, 1:-1] - flag.interior, nu)[..., None] * nu
    return X


def _normal_blend(flag_a, flag_b, s):
    A = flag_a.grid + s * _normal_offset(flag_a, flag_b.grid)
    B = flag_b.grid + (1 - s) * _normal_offset(flag_b, flag_a.grid)
    return (1 - s) * A + s * B


def step_energy(flag, next_flag, K, params):
    """``G_F(Psi_F((F' - F) K)) / K`` for one forward step."""
    X = (next_flag.grid - flag.grid) * K
    return flag_metric(flag, psi_project(flag, X), params) / K


def path_energy(path, params=None):
    """Discrete energy of ``path`` under the flag metric."""
    params = MetricParams() if params is None else params
    K = path.K
    return float(sum(step_energy(path[k], path[k + 1], K, params) for k in range(K)))


def normal_basis(flag, u_modes=2, v_modes=4, curve_modes=2):
    """Smooth deformation fields spanning normal surface and in-surface curve motion.

    Surface modes are ``sin^m v {cos mu, sin mu} cos lv`` times ``nu`` (these
    are smooth at the poles). Curve modes ``{cos mu, sin mu}`` move the marked
    row along ``n``, tapered off towards the poles by ``sin^2 v``. Returns an
    array of shape (n_modes, N_u, N_v, 3); pole rows follow the mean of the
    adjacent row.
    """
    U, V = np.meshgrid(flag.u, flag.v[1:-1], indexing="ij")
    surf = flag.surface
    nu = surf.normal
    fields = []

    def add(interior_field):
        X = np.zeros_like(flag.grid)
        X[:, 1:-1] = interior_field
        X[:, 0] = interior_field[:, 0].mean(axis=0)
        X[:, -1] = interior_field[:, -1].mean(axis=0)
        fields.append(X)

    for m in range(u_modes + 1):
        trig = [np.ones_like(U)] if m == 0 else [np.cos(m * U), np.sin(m * U)]
        for tr in trig:
            for l in range(v_modes):
                psi = np.sin(V) ** m * tr * np.cos(l * V)
                add(psi[..., None] * nu)

    v_eq = flag.v[flag.equator_row]
    taper = (np.sin(V) / np.sin(v_eq)) ** 2
    t_ext = surf.F_u / np.linalg.norm(surf.F_u, axis=-1, keepdims=True)
    n_ext = np.cross(nu, t_ext)
    for m in range(curve_modes + 1):
        trig = [np.ones_like(U)] if m == 0 else [np.cos(m * U), np.sin(m * U)]
        for tr in trig:
            add((tr * taper)[..., None] * n_ext)
    return np.stack(fields)


def _local_energy(flags, k, K, params, grid_k):
    """Energy terms touching flag ``k`` when its samples are ``grid_k``."""
    f = flags[k].with_grid(grid_k, validate=False)
    return step_energy(flags[k - 1], f, K, params) + step_energy(f, flags[k + 1], K, params)


def _gradient(flags, K, params, bases, eps, workers):
    jobs = [(k, m) for k in range(1, K) for m in range(len(bases[k]))]

    def probe(job):
        k, m = job
        G = flags[k].grid
        phi = bases[k][m]
        ep = _local_energy(flags, k, K, params, G + eps * phi)
        em = _local_energy(flags, k, K, params, G - eps * phi)
        return (ep - em) / (2 * eps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(probe, jobs))
    else:
        values = [probe(j) for j in jobs]
    grad = {k: np.zeros(len(bases[k])) for k in range(1, K)}
    for (k, m), val in zip(jobs, values):
        grad[k][m] = val
    return grad


def _moved(flags, bases, grad, alpha):
    new = [flags[0]]
    for k in range(1, len(flags) - 1):
        step = np.tensordot(grad[k], bases[k], axes=(0, 0))
        new.append(flags[k].with_grid(flags[k].grid - alpha * step))
    new.append(flags[-1])
    return new


def straighten(path, params=None, opts=None):
    """Minimize the path energy over interior flags with endpoints fixed.

    Gradient descent in the coefficients of :func:`normal_basis`, rebuilt at
    the current flags every iteration, with Armijo backtracking. Steps that
    produce a degenerate flag are rejected and halved. The energy history is
    non-increasing by construction.

    Returns a :class:`StraightenResult`; a failed line search is reported in
    ``line_search_failed`` together with the best path found.
    """
    params = MetricParams() if params is None else params
    opts = StraightenOptions() if opts is None else opts
    flags = list(path.flags)
    K = path.K
    energy = path_energy(path, params)
    history = [energy]
    if K < 2 or energy == 0.0:
        return StraightenResult(FlagPath(flags), history, 0, True, message="nothing to optimize")

    alpha = opts.step
    eps = opts.probe_eps * flags[0].length_scale
    converged = failed = False
    message = "max_iters reached"
    it = 0
    for it in range(1, opts.max_iters + 1):
        t0 = time.perf_counter()
        bases = {
            k: normal_basis(flags[k], opts.u_modes, opts.v_modes, opts.curve_modes) for k in range(1, K)
        }
        grad = _gradient(flags, K, params, bases, eps, opts.workers)
        gnorm2 = float(sum(np.dot(g, g) for g in grad.values()))
        if gnorm2 == 0.0:
            converged, message = True, "zero gradient"
            it -= 1
            break

        accepted = None
        a = alpha
        for _ in range(opts.max_backtracks):
            try:
                trial = _moved(flags, bases, grad, a)
            except DegenerateGrid:
                a *= opts.backtrack
                continue
            e_trial = path_energy(FlagPath(trial), params)
            if e_trial <= energy - opts.armijo_c * a * gnorm2:
                accepted = (trial, e_trial)
                break
            a *= opts.backtrack
        if accepted is None:
            failed, message = True, "line search failed"
            it -= 1
            break

        flags, e_new = accepted
        rel = (energy - e_new) / energy
        energy = e_new
        history.append(energy)
        log.debug("iter %d: E=%.12g step=%.3g (%.2fs)", it, energy, a, time.perf_counter() - t0)
        # allow the step to grow again after an easy acceptance
        alpha = min(a / opts.backtrack, 1e6 * opts.step) if a == alpha else a
        if rel < opts.tol:
            converged, message = True, "relative decrease below tol"
            break

    if failed and len(history) > 1:
        # progress was made; a stalled line search near the optimum is convergence
        converged = (history[-2] - history[-1]) / history[-2] < 1e3 * opts.tol
        failed = not converged
        if converged:
            message = "line search stalled near optimum"
    return StraightenResult(FlagPath(flags), history, it, converged, failed, message)


def distance(flag_a, flag_b, params=None, opts=None, K=16, strict=False):
    """Distance estimate ``sqrt(E)`` of the straightened linear path from A to B.

    Use :func:`straighten` directly to get the path and energy history.

    Raises
    ------
    LineSearchFailed
        Only with ``strict=True``, when the optimizer flagged a failure.
    """
    result = straighten(linear_path(flag_a, flag_b, K), params, opts)
    if strict and result.line_search_failed:
        raise LineSearchFailed(result.message)
    return float(np.sqrt(result.energy))
