"""Explicit finite-difference solvers for the elastic wave equation.

The semi-discretisation is ``W u_tt = -K u + (boundary data) + W F`` where
``W`` is the diagonal quadrature and ``K`` the symmetric positive
semidefinite discrete elastic energy. The free surface at ``x = 0`` is a
natural condition of the energy and enters as a weakly imposed traction
term on the first grid row. The far boundary ``x = Lx`` carries Dirichlet
data by injection, and ``y`` is periodic. Order 2 uses leapfrog in time,
order 4 the modified-equation correction ``dt^4/12 L(L u)``.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .config import ExperimentConfig
from .dispersion import Material
from .exact import (
    RayleighWaveSpec,
    mode_conversion_forcing,
    plane_wave,
    rayleigh_field,
    solve_reflection,
    wavelengths,
)
from .sbp import Operators1D, closed_ops, min_points, periodic_ops

DEFAULT_CFL = {2: 0.9, 4: 1.3}
GROWTH_LIMIT = 1e6
CHECK_EVERY = 20

FieldFn = Callable[[np.ndarray, np.ndarray, float], tuple]
TractionFn = Callable[[np.ndarray, float], tuple]


class NumericalInstability(RuntimeError):
    """The discrete solution blew up or stopped being finite."""


@dataclass(frozen=True)
class SchemeOrder:
    order: int = 2
    cfl_const: Optional[float] = None

    def __post_init__(self):
        if self.order not in (2, 4):
            raise ValueError(f"order must be 2 or 4, got {self.order}")
        if self.cfl_const is None:
            object.__setattr__(self, "cfl_const", DEFAULT_CFL[self.order])
        if not self.cfl_const > 0:
            raise ValueError("cfl_const must be positive")


@dataclass(frozen=True)
class Grid:
    """Uniform grid with spacing ``h`` in both directions.

    ``m`` distinct columns cover the periodic width ``Ly = m h``; the
    duplicated column ``y = Ly`` is only materialised on output, so
    ``ny = m + 1``. Along x there are ``nx`` points from 0 to ``Lx``, or
    ``nx`` distinct points of a period ``Lx = nx h`` when ``x_periodic``.
    """

    h: float
    nx: int
    m: int
    x_periodic: bool = False

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.m < 5:
            raise ValueError("need at least 5 points across the periodic width")

    @property
    def ny(self) -> int:
        return self.m + 1

    @property
    def Lx(self) -> float:
        return self.h * (self.nx if self.x_periodic else self.nx - 1)

    @property
    def Ly(self) -> float:
        return self.h * self.m

    @property
    def x(self) -> np.ndarray:
        return self.h * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.h * np.arange(self.m)

    @classmethod
    def strip(cls, h: float, Lx: float, Ly: float) -> "Grid":
        """Half-plane strip; ``Ly / h`` must be an integer to 1e-12."""
        m = round(Ly / h)
        if abs(m * h - Ly) > 1e-12 * max(1.0, Ly):
            raise ValueError(f"Ly={Ly} is not a multiple of h={h}")
        return cls(h, int(round(Lx / h)) + 1, int(m))

    @classmethod
    def torus(cls, n: int, L: float = 1.0) -> "Grid":
        return cls(L / n, n, n, x_periodic=True)


@dataclass
class WaveField:
    """Displacement at time levels ``t`` and ``t - dt``, distinct columns only."""

    u: np.ndarray
    v: np.ndarray
    u_old: np.ndarray
    v_old: np.ndarray
    t: float
    step_index: int
    grid: Grid

    def full(self, arr: np.ndarray) -> np.ndarray:
        """Append the periodic image column ``y = Ly``."""
        return np.concatenate([arr, arr[:, :1]], axis=1)

    @property
    def u_full(self) -> np.ndarray:
        return self.full(self.u)

    @property
    def v_full(self) -> np.ndarray:
        return self.full(self.v)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.u).all() and np.isfinite(self.v).all())


@dataclass
class BoundaryConfig:
    """Data hooks; ``None`` means homogeneous data.

    ``traction(y, t) -> (g1, g2)`` feeds the free surface and
    ``dirichlet(x, y, t) -> (u, v)`` is evaluated at ``x = Lx``. Both are
    ignored on a torus.
    """

    traction: Optional[TractionFn] = None
    dirichlet: Optional[FieldFn] = None


def cfl_dt(material: Material, h: float, scheme: SchemeOrder, t_final: Optional[float] = None,
           multiple: int = 1) -> float:
    """Time step ``K_C h / sqrt(lam + 3 mu)``.

    With ``t_final`` given the step is reduced so that ``t_final`` is a
    whole number of steps and that number is divisible by ``multiple``.
    """
    dt = scheme.cfl_const * h / math.sqrt(material.lam + 3.0 * material.mu)
    if t_final is None:
        return dt
    n = multiple * math.ceil(t_final / (dt * multiple) - 1e-9)
    return t_final / n


class Solver:
    """Two-level explicit time stepper on a :class:`Grid`."""

    def __init__(
        self,
        material: Material,
        grid: Grid,
        scheme: SchemeOrder,
        dt: float,
        bc: Optional[BoundaryConfig] = None,
        forcing: Optional[FieldFn] = None,
    ):
        self.material = material
        self.grid = grid
        self.scheme = scheme
        self.dt = float(dt)
        self.bc = bc or BoundaryConfig()
        self.forcing = forcing
        order = scheme.order
        if grid.x_periodic:
            self.xops: Operators1D = periodic_ops(grid.nx, grid.h, order)
            self.nrow = grid.nx
        else:
            if grid.nx < min_points(order) + 2:
                raise ValueError(f"nx={grid.nx} too small for order {order}")
            self.xops = closed_ops(grid.nx, grid.h, order)
            self.nrow = grid.nx - 1
        self.yops = periodic_ops(grid.m, grid.h, order)
        r = self.yops.d1[0].shape[1] // 2
        self._cy1 = np.ascontiguousarray(self.yops.d1[0][0])
        self._cy2 = np.ascontiguousarray(self.yops.d2[0][0])
        self._jidx = kernels.wrap_index(grid.m, r)
        self._free = not grid.x_periodic
        self._s_row = self.xops.s_row if self._free else np.zeros(1)
        self._h00_inv = 1.0 / self.xops.hdiag[0]
        shape = (grid.nx, grid.m)
        self._scratch = [np.zeros(shape) for _ in range(6)]
        self._zero_row = np.zeros(grid.m)
        self._X = grid.x[:, None]
        self._Y = grid.y[None, :]
        self.field: Optional[WaveField] = None
        self._init_max = None

    # -- operator ------------------------------------------------------------------

    def apply(self, u, v, au, av, g1=None, g2=None):
        """Spatial operator on rows that are not Dirichlet rows."""
        xo = self.xops
        z = self._zero_row
        kernels.acceleration(
            u, v, au, av, self.nrow,
            xo.d2[0], xo.d2[1], xo.d1[0], xo.d1[1], self._cy1, self._cy2, self._jidx,
            self.material.lam, self.material.mu, self._free, self._s_row, self._h00_inv,
            z if g1 is None else g1, z if g2 is None else g2,
            self._scratch[4], self._scratch[5],
        )

    def _traction(self, t):
        if not self._free or self.bc.traction is None:
            return None, None
        g1, g2 = self.bc.traction(self.grid.y, t)
        return np.broadcast_to(g1, (self.grid.m,)).astype(float), np.broadcast_to(g2, (self.grid.m,)).astype(float)

    def _dirichlet(self, t):
        if self.bc.dirichlet is None:
            return self._zero_row, self._zero_row
        u, v = self.bc.dirichlet(np.full(1, self.grid.Lx), self.grid.y, t)
        return np.broadcast_to(u, (self.grid.m,)), np.broadcast_to(v, (self.grid.m,))

    def _force(self, t):
        if self.forcing is None:
            return None
        return self.forcing(self._X, self._Y, t)

    # -- initialisation and stepping ---------------------------------------------------

    def initialize(self, init: FieldFn, t0: float = 0.0) -> WaveField:
        """Both levels from ``init`` evaluated at ``t0`` and ``t0 - dt``."""
        X, Y = self._X, self._Y
        shape = (self.grid.nx, self.grid.m)
        u, v = (np.array(np.broadcast_to(a, shape), dtype=float) for a in init(X, Y, t0))
        uo, vo = (np.array(np.broadcast_to(a, shape), dtype=float) for a in init(X, Y, t0 - self.dt))
        self.field = WaveField(u, v, uo, vo, t0, 0, self.grid)
        self._init_max = max(np.abs(u).max(), np.abs(v).max(), np.abs(uo).max(), np.abs(vo).max())
        return self.field

    def step(self) -> WaveField:
        f = self.field
        if f is None:
            raise RuntimeError("call initialize() before step()")
        dt = self.dt
        t = f.t
        au, av, bu, bv = self._scratch[:4]
        g1, g2 = self._traction(t)
        self.apply(f.u, f.v, au, av, g1, g2)
        F = self._force(t)
        if F is not None:
            au[: self.nrow] += np.broadcast_to(F[0], au.shape)[: self.nrow]
            av[: self.nrow] += np.broadcast_to(F[1], av.shape)[: self.nrow]
        if self.scheme.order == 2:
            kernels.leapfrog_update(f.u, f.u_old, au, dt * dt, self.nrow)
            kernels.leapfrog_update(f.v, f.v_old, av, dt * dt, self.nrow)
        else:
            if not self.grid.x_periodic:
                du, dv = self._dirichlet_tt(t)
                au[-1], av[-1] = du, dv
            g1tt, g2tt = self._traction_tt(t)
            self.apply(au, av, bu, bv, g1tt, g2tt)
            if F is not None:
                Fp, Fm = self._force(t + dt), self._force(t - dt)
                for k, b in enumerate((bu, bv)):
                    ftt = (np.broadcast_to(Fp[k], b.shape) - 2.0 * np.broadcast_to(F[k], b.shape)
                           + np.broadcast_to(Fm[k], b.shape)) / (dt * dt)
                    b[: self.nrow] += ftt[: self.nrow]
            c4 = dt**4 / 12.0
            kernels.modified_update(f.u, f.u_old, au, bu, dt * dt, c4, self.nrow)
            kernels.modified_update(f.v, f.v_old, av, bv, dt * dt, c4, self.nrow)
        # the update was written over the old level; swap roles
        f.u, f.u_old = f.u_old, f.u
        f.v, f.v_old = f.v_old, f.v
        f.t = t + dt
        f.step_index += 1
        if not self.grid.x_periodic:
            du, dv = self._dirichlet(f.t)
            f.u[-1], f.v[-1] = du, dv
        if f.step_index % CHECK_EVERY == 0:
            self.check()
        return f

    def _traction_tt(self, t):
        if not self._free or self.bc.traction is None:
            return None, None
        dt = self.dt
        a, b, c = self._traction(t - dt), self._traction(t), self._traction(t + dt)
        return tuple((a[k] - 2.0 * b[k] + c[k]) / (dt * dt) for k in range(2))

    def _dirichlet_tt(self, t):
        if self.bc.dirichlet is None:
            return self._zero_row, self._zero_row
        dt = self.dt
        a, b, c = self._dirichlet(t - dt), self._dirichlet(t), self._dirichlet(t + dt)
        return tuple((a[k] - 2.0 * b[k] + c[k]) / (dt * dt) for k in range(2))

    def check(self):
        f = self.field
        if not f.is_finite():
            raise NumericalInstability(f"non-finite values at step {f.step_index}, t={f.t:.6g}")
        peak = max(np.abs(f.u).max(), np.abs(f.v).max())
        ref = self._init_max if self._init_max > 0 else 1.0
        if peak > GROWTH_LIMIT * ref:
            raise NumericalInstability(
                f"max|u| = {peak:.3e} exceeds {GROWTH_LIMIT:g} x initial {ref:.3e} "
                f"at step {f.step_index}, t={f.t:.6g} (dt={self.dt:.4g}, h={self.grid.h:.4g})"
            )

    def advance(self, n: int) -> WaveField:
        for _ in range(n):
            self.step()
        return self.field

    # -- diagnostics --------------------------------------------------------------

    def weights(self) -> np.ndarray:
        return (self.xops.hdiag * self.grid.h)[: self.nrow, None]

    def _neg_op(self, u, v):
        """``W^{-1} K`` applied to ``(u, v)`` with homogeneous data."""
        uu, vv = u.copy(), v.copy()
        if not self.grid.x_periodic:
            uu[-1] = 0.0
            vv[-1] = 0.0
        au, av = np.zeros_like(uu), np.zeros_like(vv)
        self.apply(uu, vv, au, av)
        return -au, -av

    def energy(self) -> float:
        """Discrete energy conserved by the scheme for homogeneous data.

        Kinetic part from ``(u^n - u^{n-1}) / dt``; potential part the
        symmetric form ``u^n . K' u^{n-1}`` with
        ``K' = K - dt^2/12 K W^{-1} K`` for order 4.
        """
        f = self.field
        return discrete_energy(self, f)


def discrete_energy(solver: Solver, field_: WaveField) -> float:
    """Energy of ``field_`` in the quadrature of ``solver``.

    Equals the elastic energy integral (kinetic plus strain) up to
    discretisation error and is exactly constant in time for homogeneous
    boundary data and zero forcing.
    """
    n = solver.nrow
    W = solver.weights()
    dt = solver.dt
    kin = 0.0
    for a, b in ((field_.u, field_.u_old), (field_.v, field_.v_old)):
        d = (a[:n] - b[:n]) / dt
        kin += float(np.sum(W * d * d))
    ku, kv = solver._neg_op(field_.u_old, field_.v_old)
    if solver.scheme.order == 4:
        k2u, k2v = solver._neg_op(ku, kv)
        ku = ku - dt * dt / 12.0 * k2u
        kv = kv - dt * dt / 12.0 * k2v
    pot = float(np.sum(W * (field_.u[:n] * ku[:n] + field_.v[:n] * kv[:n])))
    return 0.5 * (kin + pot)


# -- problems ---------------------------------------------------------------------------


@dataclass
class Problem:
    """A solver setup together with its exact solution."""

    name: str
    material: Material
    grid: Grid
    exact: FieldFn
    bc: BoundaryConfig
    period: float
    wavelength: float

    def exact_on_grid(self, t: float):
        return self.exact(self.grid.x[:, None], self.grid.y[None, :], t)


def rayleigh_problem(material: Material, ppw: float, lx: float = 10.0, omega: float = 2 * math.pi) -> Problem:
    spec = RayleighWaveSpec.create(material, omega)
    L = spec.wavelength
    m = int(round(ppw))
    if abs(m - ppw) > 1e-9:
        raise ValueError("ppw must be an integer for the Rayleigh problem")
    grid = Grid.strip(L / m, lx, L)

    def exact(x, y, t):
        return rayleigh_field(spec, x, y, t)

    return Problem("rayleigh", material, grid, exact, BoundaryConfig(None, exact), spec.period, L)


def modeconv_problem(material: Material, ppw: float, phi_angle: float = math.pi / 4) -> Problem:
    """Outgoing shear wave with ``ppw`` points per shear wavelength."""
    spec = solve_reflection(material, phi_angle)
    Ls = wavelengths(material, spec.xi)[1]
    Lx, Ly = spec.domain
    m = max(5, int(round(Ly * ppw / Ls)))
    h = Ly / m
    grid = Grid(h, int(round(Lx / h)) + 1, m)

    def exact(x, y, t):
        return spec.shear(x, y, t)

    def traction(y, t):
        return mode_conversion_forcing(spec, y, t)

    return Problem("modeconv", material, grid, exact, BoundaryConfig(traction, exact), spec.period, Ls)


def plane_wave_problem(material: Material, ppw: float, kind: str = "P", L: float = 1.0) -> Problem:
    """Plane wave along the diagonal of a doubly periodic square."""
    n = int(round(ppw * L))
    k = 2 * math.pi / L
    grid = Grid.torus(n, L)

    def exact(x, y, t):
        return plane_wave(material, k, k, kind, x, y, t)

    speed = material.cp if kind == "P" else material.cs
    wl = L / math.sqrt(2.0)
    return Problem("plane-wave", material, grid, exact, BoundaryConfig(), wl / speed, wl)


def build_problem(config: ExperimentConfig) -> Problem:
    mat = config.material
    if config.problem == "rayleigh":
        return rayleigh_problem(mat, config.ppw, 10.0 if config.lx is None else config.lx)
    if config.problem == "modeconv":
        return modeconv_problem(mat, config.ppw, config.phi_angle)
    if config.problem == "plane-wave":
        return plane_wave_problem(mat, config.ppw)
    raise ValueError(f"problem {config.problem!r} has no solver run")


def final_time(config: ExperimentConfig, problem: Problem) -> float:
    if config.t_final is not None:
        return float(config.t_final)
    return (1.0 if config.n_periods is None else config.n_periods) * problem.period


def estimate_point_updates(config: ExperimentConfig) -> float:
    """Grid points times time steps for ``config`` (the budget metric)."""
    prob = build_problem(config)
    scheme = SchemeOrder(config.order, config.cfl_const)
    t_end = final_time(config, prob)
    dt = cfl_dt(prob.material, prob.grid.h, scheme, t_end, config.n_records)
    return prob.grid.nx * prob.grid.m * round(t_end / dt)


# -- runs --------------------------------------------------------------------------------


@dataclass
class TimeSeries:
    """Recorded errors (normalised by the exact max norm) and energies."""

    t: np.ndarray
    err_u: np.ndarray
    err_v: np.ndarray
    energy: np.ndarray
    period: float
    dt: float
    grid: Grid
    steps: int
    wall_clock: float
    surface: list = field(default_factory=list)

    @property
    def err(self) -> np.ndarray:
        return np.maximum(self.err_u, self.err_v)

    @property
    def t_over_T(self) -> np.ndarray:
        return self.t / self.period

    def at(self, t: float) -> float:
        """Error at the recorded time closest to ``t``."""
        k = int(np.argmin(np.abs(self.t - t)))
        return float(self.err[k])

    @property
    def point_updates(self) -> float:
        return self.grid.nx * self.grid.m * self.steps


def field_errors(problem: Problem, field_: WaveField):
    ue, ve = problem.exact_on_grid(field_.t)
    ue = np.broadcast_to(ue, field_.u.shape)
    ve = np.broadcast_to(ve, field_.v.shape)
    ref = max(np.abs(ue).max(), np.abs(ve).max())
    eu = np.abs(field_.u - ue).max() / ref
    ev = np.abs(field_.v - ve).max() / ref
    return float(eu), float(ev)


def run_problem(
    problem: Problem,
    scheme: SchemeOrder,
    t_final: float,
    n_records: int = 100,
    snapshot_times: Sequence[float] = (),
    keep_surface: bool = False,
):
    """Evolve ``problem`` from its exact solution and record errors.

    Returns ``(series, solver, snapshots)`` where ``snapshots`` maps each
    requested time (rounded to the nearest step) to a copy of the field.
    """
    dt = cfl_dt(problem.material, problem.grid.h, scheme, t_final, n_records)
    solver = Solver(problem.material, problem.grid, scheme, dt, problem.bc)
    solver.initialize(problem.exact, 0.0)
    n_steps = int(round(t_final / dt))
    every = n_steps // n_records
    snap_steps = {int(round(ts / dt)): ts for ts in snapshot_times}
    snaps = {}
    ts, eu, ev, en, surf = [], [], [], [], []

    def record():
        f = solver.field
        a, b = field_errors(problem, f)
        ts.append(f.t)
        eu.append(a)
        ev.append(b)
        en.append(discrete_energy(solver, f))
        if keep_surface:
            surf.append(f.u[0].copy())
        if f.step_index in snap_steps:
            snaps[snap_steps[f.step_index]] = (f.t, f.u.copy(), f.v.copy())

    start = time.perf_counter()
    record()
    for k in range(1, n_steps + 1):
        solver.step()
        if k % every == 0 or k in snap_steps:
            record()
    solver.check()
    wall = time.perf_counter() - start
    series = TimeSeries(np.array(ts), np.array(eu), np.array(ev), np.array(en),
                        problem.period, dt, problem.grid, n_steps, wall, surf)
    return series, solver, snaps


def run(config: ExperimentConfig) -> TimeSeries:
    """Run a validated configuration and write its CSV outputs."""
    config.validate()
    problem = build_problem(config)
    scheme = SchemeOrder(config.order, config.cfl_const)
    t_end = final_time(config, problem)
    series, solver, snaps = run_problem(problem, scheme, t_end, config.n_records, config.snapshot_times)
    if config.out:
        write_timeseries(config.out, series)
    if config.snapshot_out and snaps:
        write_snapshots(config.snapshot_out, problem.grid, snaps)
    return series


# -- CSV output --------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_timeseries(path, series: TimeSeries):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "max_err_u", "max_err_v", "energy"])
        for row in zip(series.t, series.err_u, series.err_v, series.energy):
            w.writerow([_fmt(x) for x in row])


def write_field_csv(fh, x: np.ndarray, y: np.ndarray, u: np.ndarray, v: np.ndarray, header=True):
    w = csv.writer(fh)
    if header:
        w.writerow(["x", "y", "u", "v"])
    X, Y = np.meshgrid(x, y, indexing="ij")
    for row in zip(X.ravel(), Y.ravel(), u.ravel(), v.ravel()):
        w.writerow([_fmt(a) for a in row])


def snapshot_paths(path, count: int):
    """One file per snapshot: ``path`` itself, or ``stem_k.suffix`` for several."""
    p = Path(path)
    if count == 1:
        return [p]
    return [p.with_name(f"{p.stem}_{k}{p.suffix}") for k in range(count)]


def write_snapshots(path, grid: Grid, snaps: dict):
    """Snapshots as ``x,y,u,v`` CSV files, periodic image column included."""
    yfull = grid.h * np.arange(grid.ny)
    keys = sorted(snaps)
    paths = snapshot_paths(path, len(keys))
    for key, p in zip(keys, paths):
        _, u, v = snaps[key]
        with open(p, "w", newline="") as fh:
            write_field_csv(fh, grid.x, yfull, np.concatenate([u, u[:, :1]], axis=1),
                            np.concatenate([v, v[:, :1]], axis=1))
    return paths
