"""Experiment orchestration: convergence, scaling and resolution studies.

Every study is a list of member runs described by
:class:`~halfplane.config.ExperimentConfig`. Before a member runs its cost
is estimated in point-updates (grid points times time steps); members
that would push the study over the budget are skipped and the result is
flagged partial, unless ``force`` is set.
"""

from __future__ import annotations

import csv
import math
import time
import warnings
from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .boundary import (
    composite_alpha0,
    perturbed_eigenvalue,
    required_points_per_wavelength,
    scheme_truncation_coeffs,
)
from .config import ConfigError, ExperimentConfig
from .dispersion import Material, find_rayleigh_mode
from .solver import (
    SchemeOrder,
    TimeSeries,
    build_problem,
    estimate_point_updates,
    field_errors,
    final_time,
    run_problem,
)

# Lumped boundary coefficient of the fourth-order closure, fit to measured
# one-period phase errors (lam/mu = 10 to 400, P = 16 to 64).
ORDER4_ALPHA0 = 0.008


class BudgetExceeded(ConfigError):
    """A run or study would exceed the point-update budget."""


@dataclass
class StudyRow:
    label: str
    mu: float
    order: int
    ppw: float
    h: float
    dt: float
    errors: dict
    wall_clock: float
    point_updates: float
    series: Optional[TimeSeries] = None


@dataclass
class StudyResult:
    """Rows of one study with derived metrics.

    ``orders[key]`` lists ``log2(e_coarse / e_fine)`` between consecutive
    rows for error column ``key``.
    """

    name: str
    rows: List[StudyRow] = field(default_factory=list)
    partial: bool = False
    notes: List[str] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    def errors(self, key: str) -> np.ndarray:
        return np.array([r.errors[key] for r in self.rows])

    def observed_orders(self, key: str) -> List[float]:
        e = self.errors(key)
        out = []
        for a, b, ra, rb in zip(e[:-1], e[1:], self.rows[:-1], self.rows[1:]):
            if a > 0 and b > 0:
                out.append(math.log(a / b) / math.log(rb.ppw / ra.ppw))
            else:
                out.append(math.nan)
        return out

    def ratios(self, key: str) -> List[float]:
        e = self.errors(key)
        return [float(a / b) for a, b in zip(e[:-1], e[1:])]

    def write_csv(self, path_or_fh):
        keys = sorted({k for r in self.rows for k in r.errors})
        close = False
        fh = path_or_fh
        if isinstance(path_or_fh, (str, bytes)) or hasattr(path_or_fh, "__fspath__"):
            fh = open(path_or_fh, "w", newline="")
            close = True
        try:
            w = csv.writer(fh)
            w.writerow(["label", "mu", "order", "ppw", "h", "dt"] + keys
                       + [f"order_{k}" for k in keys] + ["wall_clock", "point_updates"])
            orders = {k: [math.nan] + self.observed_orders(k) for k in keys}
            for i, r in enumerate(self.rows):
                w.writerow([r.label, _f(r.mu), r.order, _f(r.ppw), _f(r.h), _f(r.dt)]
                           + [_f(r.errors.get(k, math.nan)) for k in keys]
                           + [_f(orders[k][i]) for k in keys]
                           + [_f(r.wall_clock), _f(r.point_updates)])
        finally:
            if close:
                fh.close()


def _f(x) -> str:
    return f"{float(x):.17g}"


class _Budget:
    def __init__(self, limit: float, force: bool):
        self.limit = limit
        self.force = force
        self.used = 0.0

    def admit(self, cost: float) -> bool:
        if self.force or self.used + cost <= self.limit:
            self.used += cost
            return True
        return False


def check_budget(config: ExperimentConfig) -> float:
    """Raise :class:`BudgetExceeded` if a single run is too expensive."""
    cost = estimate_point_updates(config)
    if cost > config.budget and not config.force:
        raise BudgetExceeded(
            f"run needs {cost:.3g} point-updates, budget is {config.budget:.3g}; use --force"
        )
    return cost


def _run_member(config: ExperimentConfig, sample_times: Optional[dict] = None, bypass: bool = False,
                label: str = "", keep_surface: bool = False) -> StudyRow:
    """One run; ``sample_times`` maps error labels to times."""
    sample_times = sample_times or {}
    problem = build_problem(config)
    scheme = SchemeOrder(config.order, config.cfl_const)
    t_end = final_time(config, problem)
    if bypass:
        # harness self-test: the exact solution stands in for the numerical one
        start = time.perf_counter()
        errs = {}
        for key, ts in (sample_times or {"final": t_end}).items():
            ue, ve = problem.exact_on_grid(ts)
            shape = (problem.grid.nx, problem.grid.m)
            f = SimpleNamespace(t=ts, u=np.broadcast_to(ue, shape), v=np.broadcast_to(ve, shape))
            errs[key] = max(field_errors(problem, f))
        return StudyRow(label, config.mu, config.order, config.ppw, problem.grid.h, math.nan,
                        errs, time.perf_counter() - start, 0.0)
    series, _, _ = run_problem(problem, scheme, t_end, config.n_records, keep_surface=keep_surface)
    errs = {"final": float(series.err[-1]), "max": float(series.err.max())}
    for key, ts in sample_times.items():
        errs[key] = series.at(ts)
    return StudyRow(label, config.mu, config.order, config.ppw, problem.grid.h, series.dt, errs,
                    series.wall_clock, series.point_updates, series)


# -- studies ----------------------------------------------------------------------------


def convergence_study(base: ExperimentConfig, refinements: int = 3, periods: Sequence[float] = (1.0,),
                      bypass: bool = False) -> StudyResult:
    """Run at ``P, 2P, 4P, ...`` and report errors at the given periods.

    The run length is the largest requested period count (or
    ``base.t_final`` when set); errors are sampled at each multiple of the
    period in ``periods`` that fits.
    """
    if refinements < 2:
        raise ConfigError("a convergence study needs at least 2 refinements")
    base.validate()
    result = StudyResult("convergence")
    budget = _Budget(base.budget, base.force)
    for k in range(refinements):
        cfg = base.replace(ppw=base.ppw * 2**k)
        prob = build_problem(cfg)
        if cfg.t_final is None:
            cfg = cfg.replace(n_periods=max(periods), n_records=max(10, int(10 * max(periods))))
        T = prob.period
        t_end = final_time(cfg, prob)
        times = {f"{p:g}T": p * T for p in periods if p * T <= t_end * (1 + 1e-12)}
        if not bypass and not budget.admit(estimate_point_updates(cfg)):
            result.partial = True
            result.notes.append(f"P={cfg.ppw:g} skipped: budget exceeded")
            break
        row = _run_member(cfg, times, bypass, label=f"P={cfg.ppw:g}")
        result.rows.append(row)
    keys = [k for k in result.rows[0].errors] if result.rows else []
    for key in keys:
        if len(result.rows) > 1:
            result.metrics[f"orders[{key}]"] = result.observed_orders(key)
    return result


def scaling_study(order: int, pairs: Sequence[Tuple[float, float]], n_periods: float = 10.0,
                  lam: float = 1.0, lx: float = 5.0, n_records: int = 100, tol: float = 0.05,
                  budget: float = 5e8, force: bool = False) -> StudyResult:
    """Compare error-versus-``t/T`` curves of ``(mu, P)`` pairs.

    The pairs should keep ``P mu^(1/2)`` (order 2) or ``P mu^(1/4)``
    (order 4) fixed to within ``tol``. The reported metric
    ``max_curve_ratio`` is the largest ``max(a/b, b/a)`` over the common
    sample times ``t/T in (0, n_periods]``.
    """
    power = 0.5 if order == 2 else 0.25
    inv = [P * mu**power for mu, P in pairs]
    if max(inv) > (1 + tol) * min(inv):
        raise ConfigError(f"pairs do not keep P*mu^{power} fixed within {tol:.0%}: {inv}")
    result = StudyResult("scaling")
    result.metrics["invariant"] = inv
    meter = _Budget(budget, force)
    for mu, P in pairs:
        cfg = ExperimentConfig("rayleigh", lam, mu, order, P, n_periods=n_periods, lx=lx,
                               n_records=n_records, budget=budget, force=force).validate()
        if not meter.admit(estimate_point_updates(cfg)):
            result.partial = True
            result.notes.append(f"(mu={mu:g}, P={P:g}) skipped: budget exceeded")
            continue
        result.rows.append(_run_member(cfg, label=f"mu={mu:g},P={P:g}"))
    if len(result.rows) >= 2:
        curves = [r.series.err[1:] for r in result.rows]
        worst = 1.0
        for a in curves[1:]:
            r = a / curves[0]
            worst = max(worst, float(np.max(np.maximum(r, 1.0 / r))))
        result.metrics["max_curve_ratio"] = worst
    return result


def modeconv_study(materials: Iterable[Material], phi_angle: float, ps_list: Sequence[float],
                   order: int = 4, n_periods: float = 2.0, n_records: int = 20,
                   budget: float = 5e8, force: bool = False) -> StudyResult:
    """Outgoing shear wave error for each material and shear resolution."""
    result = StudyResult("modeconv")
    meter = _Budget(budget, force)
    for mat in materials:
        for ps in ps_list:
            cfg = ExperimentConfig("modeconv", mat.lam, mat.mu, order, ps, n_periods=n_periods,
                                   phi_angle=phi_angle, n_records=n_records,
                                   budget=budget, force=force).validate()
            if not meter.admit(estimate_point_updates(cfg)):
                result.partial = True
                result.notes.append(f"(mu={mat.mu:g}, Ps={ps:g}) skipped: budget exceeded")
                continue
            row = _run_member(cfg, label=f"mu={mat.mu:g},Ps={ps:g}")
            row.errors["period"] = build_problem(cfg).period
            result.rows.append(row)
    return result


# -- phase prediction ---------------------------------------------------------------------


def surface_phase_shift(numerical: np.ndarray, exact: np.ndarray) -> float:
    """Phase lag (radians) of ``numerical`` behind ``exact`` on a periodic line.

    The circular cross-correlation of the two traces peaks at the shift
    whose phase is that of the cross spectrum; the fundamental Fourier
    mode carries it for a one-wavelength window.
    """
    cross = np.fft.rfft(numerical) * np.conj(np.fft.rfft(exact))
    return float(np.angle(cross[1]))


@dataclass
class PredictionReport:
    material: Material
    order: int
    eps: float
    alpha0: float
    ppw: float
    predicted_eps: float
    model_eps: float
    measured_eps: float
    phase: float
    wall_clock: float

    @property
    def ppw_at_eps(self) -> float:
        """Resolution that would give exactly ``eps``, from the measurement."""
        return self.ppw * (self.measured_eps / self.eps) ** (1.0 / self.order)


def predict_vs_measure(material: Material, order: int, eps: float, lx: float = 5.0,
                       alpha0: Optional[float] = None, ppw: Optional[float] = None,
                       budget: float = 5e8, force: bool = False) -> PredictionReport:
    """Predicted resolution for phase error ``eps`` against a measured run.

    ``eps`` is the shift of the scaled eigenvalue ``xi0~``; after one
    period it produces a surface phase error of ``2 pi eps / xi0~``.
    """
    if not 0.0 < eps < 0.5:
        raise ConfigError(f"eps must lie in (0, 0.5), got {eps}")
    if order not in (2, 4):
        raise ConfigError("order must be 2 or 4")
    coeffs = scheme_truncation_coeffs(material, 1.0)
    if alpha0 is None:
        alpha0 = composite_alpha0(coeffs) if order == 2 else ORDER4_ALPHA0
    P_pred = required_points_per_wavelength(material, eps, alpha0=alpha0, order=order)
    P = max(10, math.ceil(P_pred)) if ppw is None else ppw
    h = 1.0 / P
    w = 2.0 * math.pi
    predicted = material.lam * (h * w) ** order * alpha0 / material.mu
    mode = find_rayleigh_mode(material)
    if order == 2:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            shift = perturbed_eigenvalue(mode, material, w, scheme_truncation_coeffs(material, h))
        model = abs(shift - mode.s0_tilde)
    else:
        model = predicted
    cfg = ExperimentConfig("rayleigh", material.lam, material.mu, order, P, n_periods=1.0, lx=lx,
                           n_records=1, budget=budget, force=force).validate()
    check_budget(cfg)
    problem = build_problem(cfg)
    series, solver, _ = run_problem(problem, SchemeOrder(order), problem.period, 1, keep_surface=True)
    g = problem.grid
    ue, _ = problem.exact(np.zeros((1, 1)), g.y[None, :], series.t[-1])
    phase = surface_phase_shift(series.surface[-1], np.broadcast_to(ue, (1, g.m))[0])
    measured = abs(phase) * mode.xi0_tilde / (2.0 * math.pi)
    return PredictionReport(material, order, eps, alpha0, P, predicted, model, measured, phase,
                            series.wall_clock)
