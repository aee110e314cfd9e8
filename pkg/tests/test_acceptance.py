"""Acceptance run: one test and one printed PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v`` (the lines are printed
even when pytest captures output) or ``python tests/test_acceptance.py``.
"""

import sys
import time

import numpy as np
import pytest

from flagmetric.metrics import (
    MetricParams,
    TangentVector,
    curve_elastic_energy,
    flag_metric,
    surface_elastic_energy,
)
from flagmetric.shapedist import StraightenOptions, linear_path, straighten
from flagmetric.shapes import ellipsoid, sphere
from flagmetric.validation import (
    curve_variation_suite,
    gauge_suite,
    kernel_suite,
    normal_variation_suite,
    shape_operator_suite,
)
from flagmetric.variations import analytic_curve_variation, analytic_surface_variation

EPS = 1e-5
ROUNDOFF = 1e-12  # errors already at this level cannot shrink further


def report(capsys, number, title, ok, detail):
    line = f"criterion {number} [{title}]: {'PASS' if ok else 'FAIL'}  {detail}"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


@pytest.fixture(scope="module")
def fixtures():
    return {"sphere": sphere(1.0, 128, 65), "ellipsoid(1,1,2)": ellipsoid(1.0, 1.0, 2.0, 128, 65)}


def _sphere_errors(n_u, n_v):
    f = sphere(1.0, n_u, n_v)
    ci, s = f.curvatures, f.surface
    return {
        "kappa_g": np.abs(ci.kappa_g).max(),
        "tau_g": np.abs(ci.tau_g).max(),
        "kappa_n": np.abs(np.abs(ci.kappa_n) - 1).max(),
        "k1,k2": max(np.abs(s.k1 + 1).max(), np.abs(s.k2 + 1).max()),
    }


def test_criterion_1_curvatures(capsys):
    t0 = time.perf_counter()
    fine = _sphere_errors(128, 65)
    elapsed = time.perf_counter() - t0
    coarse = _sphere_errors(64, 33)
    finer = _sphere_errors(256, 129)
    accurate = all(v <= 1e-3 for v in fine.values())
    shrink = {}
    for key in fine:
        pairs = [(coarse[key], fine[key]), (fine[key], finer[key])]
        shrink[key] = min(np.inf if b <= ROUNDOFF else a / b for a, b in pairs)
    converging = all(r >= 3.5 for r in shrink.values())
    ok = accurate and converging and elapsed < 1.0
    detail = (
        "errors@128x65 " + " ".join(f"{k}={v:.1e}" for k, v in fine.items())
        + " | min shrink per doubling " + " ".join(f"{k}={'exact' if np.isinf(r) else f'{r:.1f}x'}" for k, r in shrink.items())
        + f" | {elapsed:.3f}s"
    )
    report(capsys, 1, "curvature correctness", ok, detail)


def test_criterion_2_curve_variation(fixtures, capsys):
    checks = [(name, c) for name, f in fixtures.items() for c in curve_variation_suite(f, eps=EPS, tol=1e-4)]
    worst = max(c.value for _, c in checks)
    detail = " ".join(f"{n}:{c.name.split('.')[-1]}={c.value:.1e}" for n, c in checks) + " (tol 1e-4)"
    report(capsys, 2, "speed and tangent variation", all(c.passed for _, c in checks) and worst <= 1e-4, detail)


def test_criterion_3_normal_variation(fixtures, capsys):
    checks = [(n, c) for n, f in fixtures.items() for c in normal_variation_suite(f, eps=EPS, tol=1e-4, tol_algebraic=1e-12)]
    fd = max(c.value for _, c in checks if "algebraic" not in c.name)
    alg = max(c.value for _, c in checks if "algebraic" in c.name)
    detail = f"worst finite-difference={fd:.1e} (tol 1e-4), worst fixed-g algebraic={alg:.1e} (tol 1e-12)"
    report(capsys, 3, "normal variation norm", all(c.passed for _, c in checks), detail)


def test_criterion_4_shape_operator(fixtures, capsys):
    checks = [(n, c) for n, f in fixtures.items() for c in shape_operator_suite(f, eps=EPS, tol=1e-4)]
    detail = " ".join(f"{n}:{c.name.split('.')[-1]}={c.value:.1e}" for n, c in checks) + " (tol 1e-4)"
    report(capsys, 4, "metric variation vs shape operator", all(c.passed for _, c in checks), detail)


def test_criterion_5_consistency(fixtures, capsys):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for f in fixtures.values():
        U, V = np.meshgrid(f.u, f.v[1:-1], indexing="ij")
        for _ in range(20):
            c = rng.normal(size=9)
            h1 = c[0] + c[1] * np.cos(f.u) + c[2] * np.sin(2 * f.u)
            h2 = c[3] + c[4] * np.cos(V) + c[5] * np.sin(V) * np.cos(U) + c[6] * np.sin(V) ** 2 * np.sin(2 * U)
            h2 = h2 + c[7] * f.interior[..., 2] ** 2 + c[8] * f.interior[..., 0]
            a, b, ap, bp, cp = rng.uniform(0.1, 3.0, size=5)
            params = MetricParams.from_elastic(a, b, ap, bp, cp)
            G = flag_metric(f, TangentVector(h1, h2), params)
            cv = analytic_curve_variation(f, h1, h2[:, f.curve_index])
            sv = analytic_surface_variation(f, h2)
            E = curve_elastic_energy(f.curve, cv.dr, cv.dt, a, b) + surface_elastic_energy(f.surface, sv.dg, sv.dnu, ap, bp, cp)
            worst = max(worst, abs(G - E) / abs(E))
    report(capsys, 5, "flag metric = restricted elastic energies", worst <= 1e-10, f"worst relative={worst:.1e} over 2x20 draws (tol 1e-10)")


def test_criterion_6_gauge(fixtures, capsys):
    checks = [(n, c) for n, f in fixtures.items() for c in gauge_suite(f, n_trials=10, seed=6, tol=1e-3)]
    detail = " ".join(f"{n}:{c.name.split('.')[-1]}={c.value:.1e}" for n, c in checks) + " (tol 1e-3)"
    report(capsys, 6, "gauge invariance", all(c.passed for _, c in checks), detail)


def test_criterion_7_kernel(fixtures, capsys):
    checks = [(n, c) for n, f in fixtures.items() for c in kernel_suite(f, n_trials=100, seed=7, tol=1e-18)]
    detail = " ".join(f"{n}={c.value:.1e}" for n, c in checks) + " (tol 1e-18)"
    report(capsys, 7, "vertical fields in the kernel", all(c.passed for _, c in checks), detail)


def test_criterion_8_closed_form(fixtures, capsys):
    f = fixtures["sphere"]
    worst_value = worst_h1 = 0.0
    for h2 in (0.5, 1.0, 2.0):
        base = flag_metric(f, TangentVector(np.zeros(f.n_u), np.full(f.interior_shape, h2)))
        worst_value = max(worst_value, abs(base / (18 * np.pi * h2**2) - 1))
        for h1 in (-3.0, 1.0, 7.5):
            G = flag_metric(f, TangentVector(np.full(f.n_u, h1), np.full(f.interior_shape, h2)))
            worst_h1 = max(worst_h1, abs(G - base) / base)
    ok = worst_value <= 0.02 and worst_h1 <= 1e-10
    report(capsys, 8, "sphere with constant speeds", ok, f"vs 18*pi*h2^2: {worst_value:.2%} (tol 2%), h1 dependence {worst_h1:.1e} (tol 1e-10)")


def test_criterion_9_straightening(capsys):
    a, b = sphere(1.0, 64, 33), ellipsoid(1.0, 1.0, 1.3, 64, 33)
    t0 = time.perf_counter()
    ab = straighten(linear_path(a, b, 8), opts=StraightenOptions())
    ba = straighten(linear_path(b, a, 8), opts=StraightenOptions())
    elapsed = time.perf_counter() - t0
    monotone = all(np.all(np.diff(r.energy_history) <= 0) for r in (ab, ba))
    strict = all(r.energy_history[-1] < r.energy_history[0] for r in (ab, ba))
    d_ab, d_ba = np.sqrt(ab.energy), np.sqrt(ba.energy)
    asym = abs(d_ab - d_ba) / max(d_ab, d_ba)
    ok = monotone and strict and elapsed < 60 and asym <= 0.05
    detail = (
        f"E {ab.energy_history[0]:.6f}->{ab.energy:.6f} in {ab.iterations} it, "
        f"reverse {ba.energy_history[0]:.6f}->{ba.energy:.6f} in {ba.iterations} it; "
        f"monotone={monotone} strict={strict}; d(A,B)={d_ab:.5f} d(B,A)={d_ba:.5f} asym={asym:.2%} (tol 5%); "
        f"{elapsed:.1f}s for both (limit 60s)"
    )
    report(capsys, 9, "path straightening", ok, detail)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
