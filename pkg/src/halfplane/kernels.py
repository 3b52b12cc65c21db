"""Compiled stencil kernel for the elastic acceleration.

Fields are ``(nx, m)`` arrays, rows along x and the periodic y direction
along the contiguous axis. The x operators arrive as stencil tables (see
:mod:`halfplane.sbp`); the y operators as a centered stencil plus a
precomputed wrap-around index table.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _dy(f, cy, jidx, out):
    nx, m = f.shape
    w = cy.shape[0]
    for i in range(nx):
        for j in range(m):
            acc = 0.0
            for k in range(w):
                acc += cy[k] * f[i, jidx[j, k]]
            out[i, j] = acc


@njit(cache=True)
def acceleration(
    u, v, au, av, nrow,
    c2x, i2x, c1x, i1x, cy1, cy2, jidx,
    lam, mu, free, s_row, h00_inv, g1, g2,
    dyu, dyv,
):
    """Fill ``au``, ``av`` on rows ``0 .. nrow-1`` with the discrete operator.

    ``free`` switches on the weakly imposed traction terms on row 0 with
    data ``g1``, ``g2``. ``dyu`` and ``dyv`` are scratch arrays.
    """
    nx, m = u.shape
    lp = lam + 2.0 * mu
    lm = lam + mu
    _dy(u, cy1, jidx, dyu)
    _dy(v, cy1, jidx, dyv)
    wx2 = c2x.shape[1]
    wx1 = c1x.shape[1]
    wy = cy2.shape[0]
    for i in range(nrow):
        for j in range(m):
            uxx = 0.0
            vxx = 0.0
            for k in range(wx2):
                c = c2x[i, k]
                r = i2x[i, k]
                uxx += c * u[r, j]
                vxx += c * v[r, j]
            uyy = 0.0
            vyy = 0.0
            for k in range(wy):
                c = cy2[k]
                q = jidx[j, k]
                uyy += c * u[i, q]
                vyy += c * v[i, q]
            uxy = 0.0
            vxy = 0.0
            for k in range(wx1):
                c = c1x[i, k]
                r = i1x[i, k]
                uxy += c * dyu[r, j]
                vxy += c * dyv[r, j]
            au[i, j] = lp * uxx + mu * uyy + lm * vxy
            av[i, j] = lp * vyy + mu * vxx + lm * uxy
    if free:
        ns = s_row.shape[0]
        for j in range(m):
            su = 0.0
            sv = 0.0
            for k in range(ns):
                su += s_row[k] * u[k, j]
                sv += s_row[k] * v[k, j]
            au[0, j] += h00_inv * (lp * (su - g1[j]) + lam * dyv[0, j])
            av[0, j] += h00_inv * mu * (sv + dyu[0, j] - g2[j])


@njit(cache=True)
def leapfrog_update(u_now, u_old, acc, dt2, nrow):
    """``u_old <- 2 u_now - u_old + dt2 * acc`` on the first ``nrow`` rows."""
    m = u_now.shape[1]
    for i in range(nrow):
        for j in range(m):
            u_old[i, j] = 2.0 * u_now[i, j] - u_old[i, j] + dt2 * acc[i, j]


@njit(cache=True)
def modified_update(u_now, u_old, acc, acc2, dt2, dt4_12, nrow):
    m = u_now.shape[1]
    for i in range(nrow):
        for j in range(m):
            u_old[i, j] = 2.0 * u_now[i, j] - u_old[i, j] + dt2 * acc[i, j] + dt4_12 * acc2[i, j]


def wrap_index(m: int, r: int) -> np.ndarray:
    offs = np.arange(-r, r + 1)
    return ((np.arange(m)[:, None] + offs[None, :]) % m).astype(np.int64)
