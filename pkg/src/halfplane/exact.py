"""Closed-form elastic waves used as initial, boundary and reference data.

All fields are real-valued and vectorised over numpy arrays of ``x``, ``y``
and ``t``. Plane waves use the phase convention ``exp(i(xi t + k x + w y))``
and the real part is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import Material, RayleighMode, find_rayleigh_mode

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RayleighWaveSpec:
    material: Material
    omega: float
    mode: RayleighMode

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("the surface wave is defined for omega > 0")

    @classmethod
    def create(cls, material: Material, omega: float = TWO_PI) -> "RayleighWaveSpec":
        return cls(material, omega, find_rayleigh_mode(material))

    @property
    def c_r(self) -> float:
        return self.mode.xi0_tilde * math.sqrt(self.material.mu)

    @property
    def period(self) -> float:
        return TWO_PI / (self.omega * self.c_r)

    @property
    def wavelength(self) -> float:
        return TWO_PI / self.omega


def rayleigh_field(spec: RayleighWaveSpec, x, y, t):
    """Surface wave traveling in the negative y direction, ``x >= 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("the half-plane is x >= 0")
    w = spec.omega
    m = spec.mode
    k1 = m.kappa10_over_w
    k2 = m.kappa20_over_w
    arg = w * (np.asarray(y, dtype=float) + spec.c_r * np.asarray(t, dtype=float))
    c, s = np.cos(arg), np.sin(arg)
    e1 = np.exp(-w * k1 * x)
    e2 = m.coeff * np.exp(-w * k2 * x)
    u = e1 * c + e2 * c
    v = e1 * k1 * s + e2 * s / k2
    return u, v


def rayleigh_period(spec: RayleighWaveSpec) -> float:
    return spec.period


# -- plane waves and mode conversion -----------------------------------------------


def plane_wave(material: Material, kx: float, ky: float, kind: str, x, y, t, phase: float = 0.0):
    """Unit-amplitude plane P or S wave ``Re(d exp(i(k.x - c|k| t)))``.

    ``kind='P'`` is polarised along the wave vector and ``kind='S'``
    perpendicular to it. Used for the periodic-torus checks.
    """
    kn = math.hypot(kx, ky)
    if kind == "P":
        speed, d = material.cp, (kx / kn, ky / kn)
    elif kind == "S":
        speed, d = material.cs, (-ky / kn, kx / kn)
    else:
        raise ValueError(f"kind must be 'P' or 'S', got {kind!r}")
    arg = kx * np.asarray(x, float) + ky * np.asarray(y, float) - speed * kn * np.asarray(t, float) + phase
    c = np.cos(arg)
    return d[0] * c, d[1] * c


@dataclass(frozen=True)
class ModeConversionSpec:
    """Incident P wave reflected at the free surface into P and S waves.

    ``k = cos(phi)`` and ``omega_y = sin(phi)`` are the incident wave
    numbers (unit wave vector); ``alpha k`` is the x wave number of the
    reflected shear wave.
    """

    material: Material
    phi_angle: float
    k: float
    omega_y: float
    xi: float
    alpha: float
    Rp: complex
    Rs: complex

    @property
    def s_norm(self) -> float:
        return math.sqrt(self.alpha**2 * self.k**2 + self.omega_y**2)

    @property
    def period(self) -> float:
        return TWO_PI / self.xi

    @property
    def domain(self):
        """``(L_x, L_y)`` holding two incident wavelengths in each direction."""
        return 4.0 * math.pi / math.cos(self.phi_angle), 4.0 * math.pi / math.sin(self.phi_angle)

    # complex amplitudes (au, av) and x wave number of each partial wave
    def _waves(self):
        k, w, a = self.k, self.omega_y, self.alpha
        n = self.s_norm
        return {
            "in": ((k, w), k),
            "P": ((-k * self.Rp, w * self.Rp), -k),
            "S": ((-w * self.Rs / n, -a * k * self.Rs / n), -a * k),
        }

    def wave(self, name: str, x, y, t, deriv: str = ""):
        """Real part of one partial wave or of one of its first derivatives.

        ``deriv`` is ``''``, ``'x'``, ``'y'`` or ``'t'``.
        """
        (au, av), kx = self._waves()[name]
        ph = np.exp(1j * (self.xi * np.asarray(t, float) + kx * np.asarray(x, float)
                          + self.omega_y * np.asarray(y, float)))
        fac = {"": 1.0, "x": 1j * kx, "y": 1j * self.omega_y, "t": 1j * self.xi}[deriv]
        return np.real(fac * au * ph), np.real(fac * av * ph)

    def total(self, x, y, t):
        parts = [self.wave(n, x, y, t) for n in ("in", "P", "S")]
        return sum(p[0] for p in parts), sum(p[1] for p in parts)

    def shear(self, x, y, t):
        """The outgoing shear wave, which is what the solver computes."""
        return self.wave("S", x, y, t)


def _reflection_matrix(material: Material, k: float, w: float, alpha: float):
    """Boundary conditions at x = 0 as a real 2x2 system for (Rp, Rs)."""
    g2s = material.gamma_sq
    n = math.sqrt(alpha**2 * k**2 + w**2)
    # every term carries a common factor i, divided out
    A = np.array(
        [
            [k * k + g2s * w * w, alpha * k * w * (1.0 - g2s) / n],
            [-2.0 * k * w, (alpha**2 * k**2 - w * w) / n],
        ]
    )
    rhs = np.array([-(k * k + g2s * w * w), -2.0 * k * w])
    return A, rhs


def solve_reflection(material: Material, phi_angle: float) -> ModeConversionSpec:
    """Reflection amplitudes of a unit P wave at incidence angle ``phi_angle``."""
    if not 0.0 <= phi_angle < 0.5 * math.pi:
        raise ValueError("incidence angle must lie in [0, pi/2)")
    lam, mu = material.lam, material.mu
    k = math.cos(phi_angle)
    w = math.sin(phi_angle)
    xi = math.sqrt(lam + 2.0 * mu)
    alpha = math.sqrt(1.0 + (lam + mu) / (mu * k * k))
    A, rhs = _reflection_matrix(material, k, w, alpha)
    if abs(np.linalg.det(A)) < 1e-14 * np.abs(A).max() ** 2:
        raise np.linalg.LinAlgError(f"reflection system singular at phi={phi_angle}")
    rp, rs = np.linalg.solve(A, rhs)
    return ModeConversionSpec(material, phi_angle, k, w, xi, alpha, complex(rp), complex(rs))


def mode_conversion_forcing(spec: ModeConversionSpec, y, t):
    """Boundary data making the shear wave alone satisfy the stress conditions."""
    g2s = spec.material.gamma_sq
    x0 = np.zeros_like(np.asarray(y, float))
    ux_i, vx_i = spec.wave("in", x0, y, t, "x")
    uy_i, vy_i = spec.wave("in", x0, y, t, "y")
    ux_p, vx_p = spec.wave("P", x0, y, t, "x")
    uy_p, vy_p = spec.wave("P", x0, y, t, "y")
    g1 = -(ux_i + ux_p) - g2s * (vy_i + vy_p)
    g2 = -(uy_i + uy_p + vx_i + vx_p)
    return g1, g2


def wavelengths(material: Material, xi: float = None):
    """Compressional and shear wavelengths at temporal frequency ``xi``.

    The default ``xi = sqrt(lam + 2 mu)`` gives the incident P wave a unit
    wave vector, hence ``L_p = 2 pi``.
    """
    if xi is None:
        xi = material.cp
    return TWO_PI * material.cp / xi, TWO_PI * material.cs / xi
