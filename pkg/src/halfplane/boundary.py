"""Laplace-Fourier boundary response and truncation-error perturbations.

The half-plane problem with only boundary forcing is solved mode by mode:
for Laplace dual ``s`` and Fourier dual ``omega`` the solution is a
combination of a shear mode (decay ``kappa_1``) and a compressional mode
(decay ``kappa_2``) whose amplitudes ``u01``, ``u02`` follow from a 2x2
system with determinant ``phi(s_tilde)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .dispersion import (
    Material,
    RayleighMode,
    _mu_ratio,
    branch_sqrt,
    find_rayleigh_mode,
    kappa,
    phi_prime,
)

SINGULAR_PHI_TOL = 1e-10


class BoundarySingularity(ArithmeticError):
    """The boundary system is singular (s sits on a generalized eigenvalue)."""

    def __init__(self, phi_abs: float, distance: float):
        self.phi_abs = phi_abs
        self.distance = distance
        super().__init__(
            f"|phi(s~)| = {phi_abs:.3e} below {SINGULAR_PHI_TOL:g}; "
            f"|s~ - s~0| = {distance:.3e}"
        )


@dataclass(frozen=True)
class BoundaryData:
    g1_hat: complex
    g2_hat: complex
    s: complex
    omega: float

    def __post_init__(self):
        if self.s == 0 and self.omega == 0:
            raise ValueError("(s, omega) = (0, 0) is excluded")

    def s_tilde(self, material: Material) -> complex:
        return complex(self.s) / (abs(self.omega) * math.sqrt(material.mu))


@dataclass(frozen=True)
class BoundaryResponse:
    u01_hat: complex
    u02_hat: complex
    u_at_0: complex
    v_at_0: complex
    phi: complex


def _scaled_roots(s_t: complex, material: Material):
    r = _mu_ratio(material.lam_over_mu)
    s2 = s_t * s_t
    a = complex(branch_sqrt(1.0 + s2))
    b = complex(branch_sqrt(1.0 + r * s2))
    c = 1.0 + 0.5 * s2
    return a, b, c


def solve_boundary_system(data: BoundaryData, material: Material) -> BoundaryResponse:
    """Mode amplitudes and boundary traces for boundary forcing ``(g1, g2)``."""
    w = float(data.omega)
    if w == 0.0:
        raise ValueError("omega must be nonzero; use omega_zero_asymptotics")
    lam, mu = material.lam, material.mu
    s_t = data.s_tilde(material)
    a, b, c = _scaled_roots(s_t, material)
    det = a * b - c * c
    if abs(det) < SINGULAR_PHI_TOL:
        mode = find_rayleigh_mode(material)
        dist = min(abs(s_t - 1j * mode.xi0_tilde), abs(s_t + 1j * mode.xi0_tilde))
        raise BoundarySingularity(abs(det), dist)

    aw = abs(w)
    f1 = (lam + 2.0 * mu) * data.g1_hat / (2.0 * mu * aw) * b
    f2 = 1j * data.g2_hat / (2.0 * w)
    u01 = (-f1 + f2 * c) / det
    u02 = (f1 * c - f2 * a * b) / det
    sgn = aw / w
    u0 = u01 + u02
    v0 = -1j * sgn * a * u01 - 1j * sgn * u02 / b
    return BoundaryResponse(u01, u02, u0, v0, det)


def boundary_residual(data: BoundaryData, material: Material, resp: BoundaryResponse):
    """Residuals of the transformed boundary conditions at ``x = 0``.

    The solution ``u(x) = u01 e^{-k1 x} + u02 e^{-k2 x}`` and
    ``v(x) = -i k1/w u01 e^{-k1 x} - i w/k2 u02 e^{-k2 x}`` is
    differentiated analytically, independent of the scaled elimination
    used by :func:`solve_boundary_system`. Returned relative to the size
    of the individual terms.
    """
    w = float(data.omega)
    lam, mu = material.lam, material.mu
    k1 = complex(kappa(data.s, w, mu))
    k2 = complex(kappa(data.s, w, lam + 2.0 * mu))
    u01, u02 = resp.u01_hat, resp.u02_hat
    g2s = material.gamma_sq
    # each boundary condition as a list of mode contributions
    terms1 = [-k1 * u01, -k2 * u02, g2s * k1 * u01, g2s * w * w / k2 * u02, -data.g1_hat]
    terms2 = [1j * w * u01, 1j * w * u02, 1j * k1 * k1 / w * u01, 1j * w * u02, -data.g2_hat]
    out = []
    for terms in (terms1, terms2):
        scale = sum(abs(x) for x in terms)
        out.append(abs(sum(terms)) / max(scale, 1e-300))
    return out[0], out[1]


def boundary_estimate_bound(
    data: BoundaryData, material: Material, eta: float, K: float = 1.0
) -> Tuple[float, float]:
    """Right-hand side of the near-eigenvalue boundary estimate.

    ``(K / eta) * ((2 mu + lam) / sqrt(mu) |g1| + sqrt(mu) |g2|)``, the same
    expression bounding both ``|u(0)|`` and ``|v(0)|``. ``K`` has no
    closed form and is a calibration constant.
    """
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    lam, mu = material.lam, material.mu
    sq = math.sqrt(mu)
    bound = (K / eta) * ((2.0 * mu + lam) / sq * abs(data.g1_hat) + sq * abs(data.g2_hat))
    return bound, bound


def omega_zero_asymptotics(data: BoundaryData, material: Material):
    """Leading-order boundary traces as ``omega -> 0`` at fixed ``s != 0``.

    At ``omega = 0`` the two components decouple into 1-D problems, so
    ``u(0) = -sqrt(lam + 2 mu) g1 / s`` and ``v(0) = -sqrt(mu) g2 / s``.
    """
    s = complex(data.s)
    if s == 0:
        raise ValueError("s must be nonzero for the omega -> 0 limit")
    u0 = -math.sqrt(material.lam + 2.0 * material.mu) * data.g1_hat / s
    v0 = -math.sqrt(material.mu) * data.g2_hat / s
    return u0, v0


# -- truncation-error perturbation ------------------------------------------------


@dataclass(frozen=True)
class TruncationCoeffs:
    """Principal truncation error of the discrete normal-stress condition.

    Order 2: ``g1 = alpha1 h^2 u_xxx + alpha2 h^2 v_yyy``.
    Order 4: ``g1 = alpha1p h^4 d^5u/dx^5 + alpha2p h^4 d^5v/dy^5``.
    ``beta1``, ``beta2`` are the shear-condition analogues
    (``g2 = beta1 h^2 v_xxx + beta2 h^2 u_yyy``); they only enter through
    :func:`theta_general`. ``extra`` holds additional terms as
    ``(coef, row, component, nx, ny)`` tuples with ``coef`` already
    multiplied by the power of ``h``.
    """

    h: float
    order: int = 2
    alpha1: float = 0.0
    alpha2: float = 0.0
    alpha1p: float = 0.0
    alpha2p: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0
    extra: Tuple[Tuple[float, int, str, int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.order not in (2, 4):
            raise ValueError("order must be 2 or 4")

    def terms(self):
        """All perturbation terms as ``(coef, row, component, nx, ny)``."""
        h = self.h
        out = []
        if self.order == 2:
            out += [(self.alpha1 * h**2, 1, "u", 3, 0), (self.alpha2 * h**2, 1, "v", 0, 3)]
            out += [(self.beta1 * h**2, 2, "v", 3, 0), (self.beta2 * h**2, 2, "u", 0, 3)]
        else:
            out += [(self.alpha1p * h**4, 1, "u", 5, 0), (self.alpha2p * h**4, 1, "v", 0, 5)]
        out += list(self.extra)
        return [t for t in out if t[0] != 0.0]


def scheme_truncation_coeffs(material: Material, h: float) -> TruncationCoeffs:
    """Boundary truncation error of the package's second-order free surface.

    Taylor expansion of the half-weight boundary rows, with the interior
    equation used to eliminate ``u_tt``, gives

    ``g1 = -h^2 (u_xxx/6 + gamma^2 v_yyy/6 + (lam+mu)/(4(lam+2mu)) v_xxy)``
    ``g2 = -h^2 (v_xxx/6 + u_yyy/6 + (lam+mu)/(4 mu) u_xxy)``.

    The mixed shear term carries ``lam/mu`` and dominates the phase error
    of the scheme when ``mu`` is small, so it is kept even though the
    closed-form ``theta`` ignores shear-condition errors.
    """
    g2s = material.gamma_sq
    lam, mu = material.lam, material.mu
    mix1 = (lam + mu) / (4.0 * (lam + 2.0 * mu))
    mix2 = (lam + mu) / (4.0 * mu)
    return TruncationCoeffs(
        h=h,
        order=2,
        alpha1=-1.0 / 6.0,
        alpha2=-g2s / 6.0,
        beta1=-1.0 / 6.0,
        beta2=-1.0 / 6.0,
        extra=((-mix1 * h**2, 1, "v", 2, 1), (-mix2 * h**2, 2, "u", 2, 1)),
    )


def _mode_symbols(component: str, nx: int, ny: int, k1: float, k2: float, w: float):
    """Symbols of ``d^nx/dx^nx d^ny/dy^ny`` acting on the two modes at x = 0."""
    dx1 = (-k1) ** nx
    dx2 = (-k2) ** nx
    dy = (1j * w) ** ny
    if component == "u":
        return dx1 * dy, dx2 * dy
    if component == "v":
        return dx1 * dy * (-1j * k1 / w), dx2 * dy * (-1j * w / k2)
    raise ValueError(f"component must be 'u' or 'v', got {component!r}")


def theta_general(mode: RayleighMode, material: Material, omega: float, terms) -> complex:
    """First-order eigenvalue perturbation for arbitrary boundary terms.

    Each term ``(coef, row, component, nx, ny)`` adds
    ``coef * d^nx_x d^ny_y component`` to the data of boundary condition
    ``row`` (1: normal stress, 2: shear stress). The perturbed determinant
    is linearised around the generalized eigenvalue ``s_tilde_0 = +i xi0``.
    """
    w = float(omega)
    aw = abs(w)
    lam, mu = material.lam, material.mu
    k1 = mode.kappa10_over_w * aw
    k2 = mode.kappa20_over_w * aw
    a = mode.kappa10_over_w
    b = mode.kappa20_over_w
    c = 1.0 - 0.5 * mode.xi0_sq
    G = np.zeros((2, 2), dtype=complex)
    for coef, row, comp, nx, ny in terms:
        m1, m2 = _mode_symbols(comp, nx, ny, k1, k2, w)
        G[row - 1] += coef * np.array([m1, m2])
    P = np.empty((2, 2), dtype=complex)
    P[0] = (lam + 2.0 * mu) * b / (2.0 * mu * aw) * G[0]
    P[1] = 1j / (2.0 * w) * G[1]
    return complex(-(P[0, 0] + a * b * P[1, 1] - c * (P[0, 1] + P[1, 0])))


def theta(mode: RayleighMode, material: Material, omega: float, coeffs: TruncationCoeffs):
    """Perturbation ``theta(s0~^2)`` of the Rayleigh determinant.

    The second-order path evaluates the closed form in ``alpha1``, ``alpha2``
    with the shear-condition error set to zero; other configurations go
    through :func:`theta_general`.
    """
    if coeffs.order != 2 or coeffs.beta1 or coeffs.beta2 or coeffs.extra:
        return theta_general(mode, material, omega, coeffs.terms())
    aw = abs(float(omega))
    lam, mu = material.lam, material.mu
    k1 = mode.kappa10_over_w * aw
    k2 = mode.kappa20_over_w * aw
    c = 1.0 - 0.5 * mode.xi0_sq
    a1, a2, h = coeffs.alpha1, coeffs.alpha2, coeffs.h
    bracket = a1 * k1**3 + a2 * aw**2 * k1 - c * (a1 * k2**3 + a2 * aw**4 / k2)
    return complex((lam + 2.0 * mu) * h**2 / (2.0 * mu * aw) * (k2 / aw) * bracket)


def theta_large_ratio(material: Material, omega: float, coeffs: TruncationCoeffs) -> float:
    """Rounded-constant approximation of ``theta`` valid for ``lam/mu >> 1``."""
    a1, a2 = coeffs.alpha1, coeffs.alpha2
    pref = material.lam * coeffs.h**2 * omega**2 / (2.0 * material.mu)
    return pref * (0.027 * a1 + 0.3 * a2 - 0.55 * (a1 + a2))


def perturbed_eigenvalue(
    mode: RayleighMode,
    material: Material,
    omega: float,
    coeffs: TruncationCoeffs = None,
    theta_value: complex = None,
) -> complex:
    """Shifted generalized eigenvalue ``s0~ + theta / phi'(s0~)``.

    ``theta_value`` overrides the truncation model, which is how complex
    perturbations are studied.
    """
    if theta_value is None:
        theta_value = theta(mode, material, omega, coeffs)
    s0 = mode.s0_tilde
    dphi = complex(phi_prime(s0, mode.lam_over_mu))
    if abs(theta_value) > 0.1 * abs(dphi):
        warnings.warn(
            f"|theta|={abs(theta_value):.3g} is not small next to |phi'|={abs(dphi):.3g}; "
            "first-order shift is unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    return s0 + theta_value / dphi


def composite_alpha0(coeffs: TruncationCoeffs) -> float:
    """Lumped truncation coefficient entering the resolution rule.

    Order 2 uses the rounded large-``lam/mu`` constants; order 4 uses the
    same limit evaluated with the incompressible Rayleigh mode.
    """
    if coeffs.order == 2:
        a1, a2 = coeffs.alpha1, coeffs.alpha2
        return abs(0.027 * a1 + 0.3 * a2 - 0.55 * (a1 + a2)) / 2.0
    m = find_rayleigh_mode(math.inf)
    k1, c = m.kappa10_over_w, 1.0 - 0.5 * m.xi0_sq
    a1, a2 = coeffs.alpha1p, coeffs.alpha2p
    # fifth derivatives: u -> -k^5, v_yyyyy -> w^4 k1 and w^6/k2 (k2 = 1 in the limit)
    return abs(a1 * (k1**5 - c) - a2 * (k1 - c)) / 2.0


def required_points_per_wavelength(
    material: Material,
    eps: float,
    coeffs: TruncationCoeffs = None,
    *,
    alpha0: float = None,
    order: int = None,
) -> float:
    """Grid points per wavelength keeping the relative phase error at ``eps``.

    Either ``coeffs`` or an explicit ``alpha0`` (with ``order``) is required.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if alpha0 is None:
        if coeffs is None:
            raise ValueError("pass coeffs or alpha0")
        alpha0 = composite_alpha0(coeffs)
        order = coeffs.order
    order = order or 2
    ratio = abs(alpha0) * material.lam / (eps * material.mu)
    if order == 2:
        return 2.0 * math.pi * math.sqrt(ratio)
    if order == 4:
        return 2.0 * math.pi * ratio**0.25
    raise ValueError("order must be 2 or 4")


def boundary_sweep(material: Material, re_s: Sequence[float], im_s: Sequence[float],
                   omega: float, g1: complex = 1.0, g2: complex = 0.0):
    """Boundary traces over a rectangle of ``s`` values.

    Rows ``(re_s, im_s, omega, |u(0)|, |v(0)|, |phi|)``; singular points
    are reported with infinite traces.
    """
    rows = []
    for a in re_s:
        for b in im_s:
            d = BoundaryData(g1, g2, complex(a, b), omega)
            try:
                r = solve_boundary_system(d, material)
                rows.append((a, b, omega, abs(r.u_at_0), abs(r.v_at_0), abs(r.phi)))
            except BoundarySingularity as exc:
                rows.append((a, b, omega, math.inf, math.inf, exc.phi_abs))
    return rows
