import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flagmetric.stencils import apply_along, diff_matrix, fd_weights


def test_textbook_weights():
    np.testing.assert_allclose(fd_weights([-1, 0, 1], 1), [-0.5, 0, 0.5])
    np.testing.assert_allclose(fd_weights([-1, 0, 1], 2), [1, -2, 1])
    np.testing.assert_allclose(fd_weights([0, 1, 2], 1), [-1.5, 2, -0.5])


def test_weights_annihilate_constants():
    for deriv in (1, 2):
        for offsets in ([0, 1, 2, 3, 4, 5, 6, 7], [-3, -2, -1, 0, 1, 2, 3]):
            assert abs(fd_weights(offsets, deriv).sum()) < 1e-13


@pytest.mark.parametrize("deriv", [1, 2])
def test_open_matrix_exact_on_low_degree_polynomials(deriv):
    # every row, one-sided ones included, is exact up to degree `order`
    n, h = 20, 0.1
    x = np.arange(n) * h
    D = diff_matrix(n, h, deriv=deriv, order=6)
    for p in range(7):
        f = x**p
        exact = p * x ** max(p - 1, 0) if deriv == 1 else p * (p - 1) * x ** max(p - 2, 0)
        np.testing.assert_allclose(D @ f, exact, atol=1e-8 * max(1.0, np.abs(exact).max()))


def test_periodic_matrix_converges_at_sixth_order():
    errs = []
    for n in (32, 64):
        h = 2 * np.pi / n
        x = np.arange(n) * h
        D = diff_matrix(n, h, deriv=1, periodic=True)
        errs.append(np.abs(D @ np.sin(3 * x) - 3 * np.cos(3 * x)).max())
    assert errs[0] / errs[1] > 50


def test_odd_order_rejected():
    with pytest.raises(ValueError):
        diff_matrix(10, 0.1, order=3)


@given(st.integers(min_value=0, max_value=2))
def test_apply_along_matches_matrix_product(axis):
    rng = np.random.default_rng(axis)
    values = rng.normal(size=(9, 10, 11))
    D = diff_matrix(values.shape[axis], 0.3, periodic=True)
    out = apply_along(D, values, axis)
    expected = np.moveaxis(np.tensordot(D, np.moveaxis(values, axis, 0), axes=(1, 0)), 0, axis)
    np.testing.assert_allclose(out, expected)
    assert out.shape == values.shape
