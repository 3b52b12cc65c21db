import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfplane.config import ConfigError, ExperimentConfig
from halfplane.dispersion import Material, find_rayleigh_mode
from halfplane.harness import (
    BudgetExceeded,
    check_budget,
    convergence_study,
    modeconv_study,
    predict_vs_measure,
    scaling_study,
    surface_phase_shift,
)

BASE = ExperimentConfig("rayleigh", 1.0, 0.1, 2, 12, lx=2.0)


class TestBudget:
    def test_single_run_guard(self):
        cfg = BASE.replace(n_periods=1.0, budget=1e3)
        with pytest.raises(BudgetExceeded):
            check_budget(cfg)
        assert check_budget(cfg.replace(force=True)) > 1e3

    def test_budget_error_is_config_error(self):
        assert issubclass(BudgetExceeded, ConfigError)

    def test_study_marked_partial(self):
        cheap = convergence_study(BASE, 2)
        first = cheap.rows[0].point_updates
        res = convergence_study(BASE.replace(budget=1.5 * first), 3)
        assert res.partial and len(res.rows) == 1 and res.notes

    def test_force_runs_everything(self):
        res = convergence_study(BASE.replace(budget=1.0, force=True), 2)
        assert not res.partial and len(res.rows) == 2


class TestConvergence:
    def test_bypass_gives_zero_error(self):
        res = convergence_study(BASE, 3, bypass=True)
        for row in res.rows:
            assert all(v == 0.0 for v in row.errors.values())

    def test_orders_finite_and_positive(self):
        res = convergence_study(BASE, 3, periods=(0.5, 1.0))
        for key in ("0.5T", "1T", "final", "max"):
            orders = res.metrics[f"orders[{key}]"]
            assert len(orders) == 2
            assert all(math.isfinite(o) and o > 0 for o in orders)

    def test_requires_two_levels(self):
        with pytest.raises(ConfigError):
            convergence_study(BASE, 1)

    def test_csv(self):
        res = convergence_study(BASE, 2)
        buf = io.StringIO()
        res.write_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0].startswith("label,mu,order,ppw,h,dt,")
        assert len(lines) == 3


class TestScaling:
    def test_single_pair(self):
        res = scaling_study(2, [(0.1, 12)], n_periods=1.0, lx=2.0, n_records=5)
        assert len(res.rows) == 1 and "max_curve_ratio" not in res.metrics

    def test_rejects_pairs_off_the_invariant(self):
        with pytest.raises(ConfigError):
            scaling_study(2, [(0.1, 12), (0.01, 12)])

    def test_two_pairs_report_ratio(self):
        res = scaling_study(2, [(0.1, 12), (0.025, 24)], n_periods=1.0, lx=2.0, n_records=5)
        assert res.metrics["max_curve_ratio"] >= 1.0


def test_modeconv_rows_carry_period():
    res = modeconv_study([Material(1.0, 0.1)], math.pi / 4, [10], n_periods=0.5, n_records=2)
    assert res.rows[0].errors["period"] == pytest.approx(5.74, abs=5e-3)
    assert 0 < res.rows[0].errors["final"] < 1


@given(st.floats(-3.0, 3.0))
def test_phase_shift_recovers_lag(lag):
    y = np.linspace(0, 1, 64, endpoint=False)
    exact = np.cos(2 * np.pi * y)
    num = 0.8 * np.cos(2 * np.pi * y - lag) + 0.01 * np.cos(6 * np.pi * y)
    assert surface_phase_shift(num, exact) == pytest.approx(-lag, abs=1e-9)


class TestPredict:
    @pytest.mark.parametrize("eps", [0.0, 0.5, -0.1, 0.7])
    def test_rejects_eps(self, eps):
        with pytest.raises(ConfigError):
            predict_vs_measure(Material(1, 0.01), 2, eps)

    def test_rejects_order(self):
        with pytest.raises(ConfigError):
            predict_vs_measure(Material(1, 0.01), 3, 0.01)

    def test_budget_guard(self):
        with pytest.raises(BudgetExceeded):
            predict_vs_measure(Material(1, 0.01), 2, 0.01, ppw=50, budget=1e3)

    @pytest.mark.parametrize(
        "order,coarse,fine",
        [(2, (0.01, 50), (0.0025, 100)), (4, (0.01, 20), (0.000625, 40))],
    )
    def test_resolution_halves(self, order, coarse, fine):
        # quadrupling mu (order 2) or raising it 16-fold (order 4) halves the needed P
        got = [predict_vs_measure(Material(1.0, mu), order, 0.01, ppw=P, force=True).ppw_at_eps
               for mu, P in (coarse, fine)]
        assert got[1] / got[0] == pytest.approx(2.0, rel=0.15)

    def test_report_consistent(self):
        r = predict_vs_measure(Material(1.0, 0.01), 4, 0.01, ppw=16)
        assert r.ppw == 16 and r.phase != 0
        xi0 = find_rayleigh_mode(Material(1.0, 0.01)).xi0_tilde
        assert r.measured_eps == pytest.approx(abs(r.phase) * xi0 / (2 * math.pi))
        assert r.ppw_at_eps == pytest.approx(16 * (r.measured_eps / 0.01) ** 0.25)
