"""Summation-by-parts difference operators stored as stencil tables.

A one-dimensional operator on ``n`` points is a pair ``(coef, idx)`` of
``(n, w)`` arrays with ``(D f)[i] = sum_k coef[i, k] * f[idx[i, k]]``.
The same layout covers boundary-closed operators and periodic ones, which
lets a single kernel apply either.

For the closed operators ``H D1 + (H D1)^T = diag(-1, 0, ..., 0, 1)`` and
``-H D2 + B S`` is symmetric with ``-H D2 + B S - D1^T H D1`` positive
semidefinite, so the elastic operator built from them has a
non-increasing discrete energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_H2 = np.array([0.5])
_D1_2 = np.array([[-1.0, 1.0, 0.0]])
_D2_2 = np.array([[1.0, -2.0, 1.0]])
_S_2 = np.array([-1.5, 2.0, -0.5])

_H4 = np.array([17 / 48, 59 / 48, 43 / 48, 49 / 48])
_D1_4 = np.array(
    [
        [-24 / 17, 59 / 34, -4 / 17, -3 / 34, 0.0, 0.0],
        [-1 / 2, 0.0, 1 / 2, 0.0, 0.0, 0.0],
        [4 / 43, -59 / 86, 0.0, 59 / 86, -4 / 43, 0.0],
        [3 / 98, 0.0, -59 / 98, 0.0, 32 / 49, -4 / 49],
    ]
)
_D2_4 = np.array(
    [
        [2.0, -5.0, 4.0, -1.0, 0.0, 0.0],
        [1.0, -2.0, 1.0, 0.0, 0.0, 0.0],
        [-4 / 43, 59 / 43, -110 / 43, 59 / 43, -4 / 43, 0.0],
        [-1 / 49, 0.0, 59 / 49, -118 / 49, 64 / 49, -4 / 49],
    ]
)
_S_4 = np.array([-11 / 6, 3.0, -3 / 2, 1 / 3])

_INTERIOR = {
    2: (np.array([-0.5, 0.0, 0.5]), np.array([1.0, -2.0, 1.0])),
    4: (
        np.array([1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12]),
        np.array([-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12]),
    ),
}


@dataclass(frozen=True)
class Operators1D:
    """Difference operators on ``n`` points with spacing ``h``.

    ``hdiag`` holds the quadrature weights (already multiplied by ``h``).
    ``s_row`` is the one-sided boundary derivative at the first point; it
    is ``None`` for periodic operators.
    """

    n: int
    h: float
    order: int
    periodic: bool
    hdiag: np.ndarray
    d1: tuple
    d2: tuple
    s_row: np.ndarray = None

    def dense(self, which: str) -> np.ndarray:
        coef, idx = {"d1": self.d1, "d2": self.d2}[which]
        out = np.zeros((self.n, self.n))
        for i in range(self.n):
            np.add.at(out[i], idx[i], coef[i])
        return out


def _check(order: int):
    if order not in (2, 4):
        raise ValueError(f"order must be 2 or 4, got {order}")


def min_points(order: int) -> int:
    _check(order)
    return 4 if order == 2 else 10


def periodic_ops(n: int, h: float, order: int) -> Operators1D:
    """Centered operators on ``n`` distinct points of a periodic grid."""
    _check(order)
    c1, c2 = _INTERIOR[order]
    r = len(c1) // 2
    if n < len(c1):
        raise ValueError(f"periodic grid needs at least {len(c1)} points, got {n}")
    offs = np.arange(-r, r + 1)
    idx = (np.arange(n)[:, None] + offs[None, :]) % n
    d1 = (np.tile(c1 / h, (n, 1)), idx)
    d2 = (np.tile(c2 / h**2, (n, 1)), idx.copy())
    return Operators1D(n, h, order, True, np.full(n, h), d1, d2)


def closed_ops(n: int, h: float, order: int) -> Operators1D:
    """Boundary-closed operators on ``n`` points including both ends."""
    _check(order)
    if n < min_points(order):
        raise ValueError(f"need at least {min_points(order)} points for order {order}, got {n}")
    c1, c2 = _INTERIOR[order]
    r = len(c1) // 2
    if order == 2:
        hb, b1, b2, srow = _H2, _D1_2, _D2_2, _S_2
    else:
        hb, b1, b2, srow = _H4, _D1_4, _D2_4, _S_4
    nb, w = b1.shape
    w = max(w, len(c1))

    hdiag = np.ones(n)
    hdiag[:nb] = hb
    hdiag[n - nb :] = hb[::-1]

    def table(block, interior, sign):
        coef = np.zeros((n, w))
        idx = np.zeros((n, w), dtype=np.int64)
        for i in range(n):
            if i < nb:
                k = block.shape[1]
                coef[i, :k] = block[i]
                idx[i, :k] = np.arange(k)
            elif i >= n - nb:
                row = block[n - 1 - i][::-1] * sign
                k = block.shape[1]
                coef[i, :k] = row
                idx[i, :k] = np.arange(n - k, n)
            else:
                coef[i, : 2 * r + 1] = interior
                idx[i, : 2 * r + 1] = np.arange(i - r, i + r + 1)
        return coef, idx

    c, i = table(b1, c1, -1.0)
    d1 = (c / h, i)
    c, i = table(b2, c2, 1.0)
    d2 = (c / h**2, i)
    return Operators1D(n, h, order, False, hdiag * h, d1, d2, srow / h)
