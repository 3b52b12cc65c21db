"""Rayleigh dispersion relation of the free-surface half-plane.

The boundary determinant is evaluated in the scaled Laplace variable
``s_tilde = s / (|omega| sqrt(mu))``. Every quantity that depends on the
material only through ``mu / (lam + 2 mu)`` accepts the ratio
``lam_over_mu = inf`` as the incompressible limit (mu -> 0, lam fixed).

Complex square roots follow the branch cut ``-pi < arg(z) <= pi`` with
``arg(sqrt(z)) = arg(z) / 2``, so that ``Re(sqrt(z)) >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

ROOT_BRACKET_DELTA = 1e-9
PSI_TOL = 1e-14
MAX_NEWTON = 10


class RootNotBracketed(RuntimeError):
    """Raised when psi shows no sign change on the search interval."""


@dataclass(frozen=True)
class Material:
    """Isotropic material with unit density.

    ``lam`` is the first Lame parameter and ``mu`` the shear modulus.
    ``lam = 0`` is accepted because the dispersion tables start there.
    """

    lam: float
    mu: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and math.isfinite(self.mu)):
            raise ValueError(f"Lame parameters must be finite, got {self.lam}, {self.mu}")
        if self.mu <= 0.0:
            raise ValueError(f"shear modulus must be positive, got mu={self.mu}")
        if self.lam < 0.0:
            raise ValueError(f"first Lame parameter must be non-negative, got lam={self.lam}")

    @property
    def cp(self) -> float:
        return math.sqrt(self.lam + 2.0 * self.mu)

    @property
    def cs(self) -> float:
        return math.sqrt(self.mu)

    @property
    def gamma_sq(self) -> float:
        return self.lam / (2.0 * self.mu + self.lam)

    @property
    def lam_over_mu(self) -> float:
        return self.lam / self.mu


def _mu_ratio(lam_over_mu: float) -> float:
    """mu / (lam + 2 mu) written in terms of lam/mu; zero in the limit."""
    if math.isinf(lam_over_mu):
        return 0.0
    if lam_over_mu < 0.0:
        raise ValueError(f"lam/mu must be non-negative, got {lam_over_mu}")
    return 1.0 / (lam_over_mu + 2.0)


def _as_ratio(material_or_ratio: Union[Material, float]) -> float:
    if isinstance(material_or_ratio, Material):
        return material_or_ratio.lam_over_mu
    return float(material_or_ratio)


def branch_sqrt(z):
    """Square root with ``-pi < arg(z) <= pi`` and ``arg(sqrt z) = arg(z)/2``.

    Works on scalars and arrays. A negative real axis value with a signed
    zero imaginary part (``-4 - 0j``) is mapped to ``+2j``, as the branch
    convention puts the negative real axis on the ``arg = pi`` side.
    """
    z = np.asarray(z, dtype=complex)
    # signed zeros: -0.0 + 0.0 == +0.0
    z = z.real + 1j * (z.imag + 0.0)
    out = np.sqrt(z)
    return out[()] if out.ndim == 0 else out


def kappa(s, omega, speed_sq):
    """Decay rate ``sqrt(omega^2 + s^2 / speed_sq)`` on the principal branch.

    Pass ``speed_sq = mu`` for the shear root and ``lam + 2 mu`` for the
    compressional root.
    """
    if np.any(np.asarray(speed_sq) <= 0):
        raise ValueError("speed_sq must be positive")
    s = np.asarray(s, dtype=complex)
    return branch_sqrt(np.asarray(omega, dtype=float) ** 2 + s * s / speed_sq)


def phi(s_tilde, lam_over_mu):
    """Scaled boundary determinant.

    ``phi(s) = sqrt(1 + s^2) sqrt(1 + r s^2) - (1 + s^2/2)^2`` with
    ``r = mu / (lam + 2 mu)``.
    """
    r = _mu_ratio(float(lam_over_mu))
    s2 = np.asarray(s_tilde, dtype=complex) ** 2
    return branch_sqrt(1.0 + s2) * branch_sqrt(1.0 + r * s2) - (1.0 + 0.5 * s2) ** 2


def phi_prime(s_tilde, lam_over_mu):
    """Derivative of :func:`phi` with respect to ``s_tilde``."""
    r = _mu_ratio(float(lam_over_mu))
    s = np.asarray(s_tilde, dtype=complex)
    s2 = s * s
    a = branch_sqrt(1.0 + s2)
    b = branch_sqrt(1.0 + r * s2)
    return s * b / a + s * r * a / b - 2.0 * s * (1.0 + 0.5 * s2)


def psi(sigma, lam_tilde):
    """Real polynomial with the same roots as ``phi(i sqrt(sigma))`` on (0, 1)."""
    r = 0.0 if math.isinf(lam_tilde) else 1.0 / (2.0 + lam_tilde)
    sigma = np.asarray(sigma, dtype=float)
    out = (1.0 - sigma) * (1.0 - r * sigma) - (1.0 - 0.5 * sigma) ** 4
    return out[()] if out.ndim == 0 else out


def psi_prime(sigma, lam_tilde):
    r = 0.0 if math.isinf(lam_tilde) else 1.0 / (2.0 + lam_tilde)
    sigma = np.asarray(sigma, dtype=float)
    out = -(1.0 + r) + 2.0 * r * sigma + 2.0 * (1.0 - 0.5 * sigma) ** 3
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class RayleighMode:
    """Generalized eigenvalue ``s_tilde_0 = +-i xi0_tilde`` and derived data.

    ``kappa10_over_w`` and ``kappa20_over_w`` are the two decay rates scaled
    by ``|omega|``; ``coeff`` multiplies the compressional part of the
    eigenfunction. ``c_r`` is only known when a :class:`Material` (and thus
    ``mu``) was supplied.
    """

    lam_over_mu: float
    xi0_tilde: float
    kappa10_over_w: float
    kappa20_over_w: float
    phi_prime_abs: float
    coeff: float
    c_r: Optional[float] = None

    @property
    def xi0_sq(self) -> float:
        return self.xi0_tilde**2

    @property
    def s0_tilde(self) -> complex:
        return 1j * self.xi0_tilde


def _bisect_psi(lam_tilde: float, lo: float, hi: float) -> float:
    flo, fhi = psi(lo, lam_tilde), psi(hi, lam_tilde)
    if not (flo > 0.0 > fhi):
        raise RootNotBracketed(
            f"psi({lo})={flo:.3e}, psi({hi})={fhi:.3e} for lam/mu={lam_tilde}"
        )
    # 40 halvings leave a bracket of width ~1e-12; Newton finishes the job.
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if psi(mid, lam_tilde) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_rayleigh_mode(material: Union[Material, float]) -> RayleighMode:
    """Locate the Rayleigh root ``sigma* = xi0_tilde^2`` in (0, 1).

    Parameters
    ----------
    material : Material or float
        Either a material or the ratio ``lam/mu`` (``math.inf`` allowed).
    """
    lam_tilde = _as_ratio(material)
    r = _mu_ratio(lam_tilde)
    sigma = _bisect_psi(lam_tilde, ROOT_BRACKET_DELTA, 1.0 - ROOT_BRACKET_DELTA)
    for _ in range(MAX_NEWTON):
        f = psi(sigma, lam_tilde)
        if abs(f) <= PSI_TOL:
            break
        sigma -= f / psi_prime(sigma, lam_tilde)

    k1 = math.sqrt(1.0 - sigma)
    k2 = math.sqrt(1.0 - r * sigma)
    s0_sq = -sigma
    c0 = 1.0 + r * s0_sq + r * (1.0 + s0_sq) - 2.0 * (1.0 + 0.5 * s0_sq) ** 3
    phi_prime_abs = abs(c0) * math.sqrt(sigma) / (k1 * k2)
    c_r = None
    if isinstance(material, Material):
        c_r = math.sqrt(sigma) * math.sqrt(material.mu)
    return RayleighMode(
        lam_over_mu=lam_tilde,
        xi0_tilde=math.sqrt(sigma),
        kappa10_over_w=k1,
        kappa20_over_w=k2,
        phi_prime_abs=phi_prime_abs,
        coeff=0.5 * sigma - 1.0,
        c_r=c_r,
    )


def determinant_delta(s, omega: float, material: Material):
    """Unscaled boundary determinant in terms of ``kappa_1``, ``kappa_2``."""
    if omega == 0:
        raise ValueError("omega must be nonzero")
    lam, mu = material.lam, material.mu
    g2 = material.gamma_sq
    k1 = kappa(s, omega, mu)
    k2 = kappa(s, omega, lam + 2.0 * mu)
    w2 = omega * omega
    return 2.0 * w2 * (1.0 - g2) * k1 * k2 - (k2 * k2 - g2 * w2) * (k1 * k1 + w2)


def dispersion_table(ratios=(0.0, 1.0, 4.0, 8.0, math.inf)):
    """Rows ``(lam/mu, xi0~^2, kappa10/|w|, kappa20/|w|, |phi'(s0)|)``; note ``s0~^2 = -xi0~^2``."""
    rows = []
    for q in ratios:
        m = find_rayleigh_mode(q)
        rows.append((q, m.xi0_sq, m.kappa10_over_w, m.kappa20_over_w, m.phi_prime_abs))
    return rows
