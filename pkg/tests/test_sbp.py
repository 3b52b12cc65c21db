import numpy as np
import pytest

from halfplane.sbp import closed_ops, min_points, periodic_ops


def boundary_matrix(n):
    B = np.zeros((n, n))
    B[0, 0], B[-1, -1] = -1.0, 1.0
    return B


def s_matrix(ops):
    n = ops.n
    S = np.zeros((n, n))
    k = len(ops.s_row)
    S[0, :k] = ops.s_row
    S[-1, n - k:] = -ops.s_row[::-1]
    return S


@pytest.mark.parametrize("order", [2, 4])
class TestClosed:
    def test_first_derivative_sbp(self, order):
        ops = closed_ops(20, 0.1, order)
        HD = np.diag(ops.hdiag) @ ops.dense("d1")
        assert np.allclose(HD + HD.T, boundary_matrix(20), atol=1e-13)

    def test_second_derivative_symmetric_semidefinite(self, order):
        n = 24
        ops = closed_ops(n, 0.1, order)
        H = np.diag(ops.hdiag)
        M = -H @ ops.dense("d2") + boundary_matrix(n) @ s_matrix(ops)
        assert np.allclose(M, M.T, atol=1e-11)
        assert np.linalg.eigvalsh(M).min() > -1e-10
        D1 = ops.dense("d1")
        assert np.linalg.eigvalsh(M - D1.T @ H @ D1).min() > -1e-10

    def test_exact_on_polynomials(self, order):
        x = np.linspace(0, 1, 30)
        ops = closed_ops(30, x[1], order)
        q = order // 2
        for p in range(q + 1):
            f = x**p
            df = p * x ** max(p - 1, 0) if p else 0 * x
            assert np.allclose(ops.dense("d1") @ f, df, atol=1e-9)
        f = x ** (q + 1)
        d2 = (q + 1) * q * x ** (q - 1)
        assert np.allclose(ops.dense("d2") @ f, d2, atol=1e-8)

    def test_boundary_derivative(self, order):
        x = np.linspace(0, 1, 30)
        ops = closed_ops(30, x[1], order)
        k = len(ops.s_row)
        for p in range(k):
            exact = 1.0 if p == 1 else 0.0
            assert ops.s_row @ x[:k] ** p == pytest.approx(exact, abs=1e-9)

    def test_quadrature_integrates_constants(self, order):
        ops = closed_ops(21, 0.05, order)
        assert ops.hdiag.sum() == pytest.approx(1.0)

    def test_too_few_points(self, order):
        with pytest.raises(ValueError):
            closed_ops(min_points(order) - 1, 0.1, order)


@pytest.mark.parametrize("order,rate", [(2, 2.0), (4, 4.0)])
def test_periodic_accuracy(order, rate):
    errs = []
    for n in (32, 64):
        h = 2 * np.pi / n
        x = h * np.arange(n)
        ops = periodic_ops(n, h, order)
        errs.append(np.abs(ops.dense("d2") @ np.sin(x) + np.sin(x)).max())
    assert np.log2(errs[0] / errs[1]) == pytest.approx(rate, abs=0.1)


def test_periodic_is_skew_and_symmetric():
    ops = periodic_ops(16, 0.25, 4)
    D1, D2 = ops.dense("d1"), ops.dense("d2")
    assert np.allclose(D1, -D1.T)
    assert np.allclose(D2, D2.T)


def test_rejects_order():
    with pytest.raises(ValueError):
        periodic_ops(10, 0.1, 3)
