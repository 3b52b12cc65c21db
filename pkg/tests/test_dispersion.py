import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfplane.dispersion import (
    Material,
    branch_sqrt,
    determinant_delta,
    dispersion_table,
    find_rayleigh_mode,
    kappa,
    phi,
    phi_prime,
    psi,
    psi_prime,
)

RATIOS = [0.0, 1.0, 4.0, 8.0, math.inf]

# 40-digit mpmath evaluation: bisection on psi, numerical derivative of phi
ORACLE = {
    0.0: (0.7639320225002103, 0.48586827175664568, 0.78615137775742329, 0.60394129215991569),
    1.0: (0.84529946162074847, 0.39331989319032864, 0.84748658561247083, 1.0616336226908343),
    4.0: (0.88773223418537009, 0.33506382349431565, 0.92306263473058623, 1.604668871314365),
    8.0: (0.89913748259864587, 0.31758859771936732, 0.95398440854142654, 1.8360221622816723),
    math.inf: (0.91262197461584728, 0.29559774252208477, 1.0, 2.1930132207575666),
}

finite = st.floats(-10, 10, allow_nan=False)


class TestMaterial:
    def test_derived_speeds(self):
        m = Material(1.0, 0.1)
        assert m.cp == pytest.approx(math.sqrt(1.2))
        assert m.cs == pytest.approx(math.sqrt(0.1))
        assert m.cp > m.cs > 0
        assert 0 < m.gamma_sq < 1

    @pytest.mark.parametrize("lam,mu", [(1.0, 0.0), (1.0, -1.0), (-0.5, 1.0), (math.nan, 1.0)])
    def test_rejects_invalid(self, lam, mu):
        with pytest.raises(ValueError):
            Material(lam, mu)

    def test_zero_lambda_allowed(self):
        assert Material(0.0, 1.0).lam_over_mu == 0.0


class TestBranchSqrt:
    @pytest.mark.parametrize("z,expected", [(4 + 0j, 2 + 0j), (-4 + 0j, 2j), (-4 - 0j, 2j), (0j, 0j)])
    def test_examples(self, z, expected):
        assert branch_sqrt(z) == pytest.approx(expected)

    @given(finite, finite)
    def test_squares_back_with_nonnegative_real_part(self, a, b):
        z = complex(a, b)
        r = complex(branch_sqrt(z))
        assert abs(r * r - z) <= 1e-14 * max(abs(z), 1e-300) + 1e-300
        assert r.real >= 0.0

    def test_random_sample(self):
        rng = np.random.default_rng(0)
        z = rng.uniform(-10, 10, 1000) + 1j * rng.uniform(-10, 10, 1000)
        z = z[np.abs(z) <= 10]
        r = branch_sqrt(z)
        assert np.all(np.abs(r * r - z) <= 1e-14 * np.abs(z))

    def test_argument_halved(self):
        z = np.exp(1j * np.linspace(-math.pi + 1e-6, math.pi, 50))
        assert np.allclose(np.angle(branch_sqrt(z)), np.angle(z) / 2)


class TestKappa:
    def test_table_example(self):
        m = Material(1.0, 1.0)
        mode = find_rayleigh_mode(m)
        s = 1j * mode.xi0_tilde * math.sqrt(m.mu)
        assert complex(kappa(s, 1.0, m.mu)).real == pytest.approx(0.3933, abs=5e-5)

    def test_zero_omega(self):
        assert complex(kappa(2.5, 0.0, 1.0)) == pytest.approx(2.5)

    def test_real_part_bound(self):
        rng = np.random.default_rng(1)
        s = rng.uniform(1e-6, 10, 10_000) + 1j * rng.uniform(-10, 10, 10_000)
        w = rng.uniform(-10, 10, 10_000)
        c2 = rng.uniform(1e-3, 10, 10_000)
        k = kappa(s, w, c2)
        assert np.all(k.real >= s.real / np.sqrt(c2) * (1 - 1e-12))

    def test_rejects_nonpositive_speed(self):
        with pytest.raises(ValueError):
            kappa(1.0, 1.0, 0.0)


class TestPhi:
    @pytest.mark.parametrize("q", RATIOS + [100.0])
    def test_zero_at_origin(self, q):
        assert phi(0.0, q) == 0

    def test_printed_root(self):
        assert abs(phi(1j * math.sqrt(0.8452), 1.0)) < 1e-4

    @pytest.mark.parametrize("q", [0.0, 1.0, 100.0, math.inf])
    def test_no_right_half_plane_roots(self, q):
        rng = np.random.default_rng(2)
        s = rng.uniform(1e-3, 10, 10_000) + 1j * rng.uniform(-10, 10, 10_000)
        assert np.min(np.abs(phi(s, q))) > 0

    @given(st.floats(0.01, 10), st.floats(-10, 10), st.sampled_from([0.0, 1.0, 10.0, math.inf]))
    def test_conjugate_symmetry(self, a, b, q):
        s = complex(a, b)
        assert complex(phi(s.conjugate(), q)) == pytest.approx(complex(phi(s, q)).conjugate(), rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("q", [0.0, 1.0, math.inf])
    def test_double_zero_at_origin(self, q):
        ratios = [abs(complex(phi(e, q))) / e**2 for e in (1e-2, 1e-3, 1e-4)]
        assert all(0 < r < 10 for r in ratios)
        assert ratios[-1] == pytest.approx(ratios[-2], rel=1e-3)

    @pytest.mark.parametrize("q", RATIOS)
    def test_derivative_matches_finite_difference(self, q):
        s = 0.7 + 0.4j
        d = 1e-6
        fd = (complex(phi(s + d, q)) - complex(phi(s - d, q))) / (2 * d)
        assert complex(phi_prime(s, q)) == pytest.approx(fd, rel=1e-8)


class TestPsi:
    @pytest.mark.parametrize("q", [0.0, 1.0, 10.0, math.inf])
    def test_endpoints(self, q):
        assert psi(0.0, q) == 0.0
        assert abs(psi(1.0, q) + 1.0 / 16.0) <= 1e-15

    def test_slope_at_origin(self):
        assert psi_prime(0.0, 2.0) == pytest.approx(0.75, abs=1e-15)

    @pytest.mark.parametrize("q", [0.0, 1.0, 4.0, 100.0, math.inf])
    def test_single_sign_change(self, q):
        sig = np.linspace(1e-6, 1 - 1e-6, 20001)
        vals = psi(sig, q)
        star = find_rayleigh_mode(q).xi0_sq
        assert np.all(vals[sig < star - 1e-9] > 0)
        assert np.all(vals[sig > star + 1e-9] < 0)

    @given(st.floats(0, 0.999), st.sampled_from([0.0, 1.0, 10.0, math.inf]))
    def test_same_roots_as_phi(self, sigma, q):
        # psi = a^2 b^2 - c^4 factors as (ab - c^2)(ab + c^2) on the imaginary axis
        s = 1j * math.sqrt(sigma)
        r = 0.0 if math.isinf(q) else 1.0 / (2.0 + q)
        plus = math.sqrt(1 - sigma) * math.sqrt(1 - r * sigma) + (1 - sigma / 2) ** 2
        assert float(psi(sigma, q)) == pytest.approx(complex(phi(s, q)).real * plus, abs=1e-14)


class TestRayleighMode:
    @pytest.mark.parametrize("q", RATIOS)
    def test_matches_oracle(self, q):
        m = find_rayleigh_mode(q)
        xi2, k1, k2, dphi = ORACLE[q]
        assert m.xi0_sq == pytest.approx(xi2, abs=1e-13)
        assert m.kappa10_over_w == pytest.approx(k1, abs=1e-13)
        assert m.kappa20_over_w == pytest.approx(k2, abs=1e-13)
        assert m.phi_prime_abs == pytest.approx(dphi, abs=1e-12)

    @pytest.mark.parametrize(
        "q,xi2,dphi",
        [
            (0.0, 0.7639, 0.6036),
            (8.0, 0.8991, 1.8360),
            pytest.param(
                math.inf, 0.9126, 2.1936,
                marks=pytest.mark.xfail(strict=True, reason="printed slope is 6e-4 above the oracle value"),
            ),
        ],
    )
    def test_printed_examples(self, q, xi2, dphi):
        m = find_rayleigh_mode(q)
        assert m.xi0_sq == pytest.approx(xi2, abs=5e-4)
        assert m.phi_prime_abs == pytest.approx(dphi, abs=5e-4)

    def test_infinite_ratio_kappa2(self):
        assert find_rayleigh_mode(math.inf).kappa20_over_w == 1.0

    @given(st.floats(0, 1e6))
    def test_invariants(self, q):
        m = find_rayleigh_mode(q)
        assert 0 < m.xi0_tilde < 1
        assert 0 < m.kappa10_over_w <= 1 and 0 < m.kappa20_over_w <= 1
        assert m.phi_prime_abs > 0
        assert -1 < m.coeff < -0.5
        assert abs(psi(m.xi0_sq, q)) <= 1e-14

    def test_increasing_in_ratio(self):
        xs = [find_rayleigh_mode(q).xi0_sq for q in RATIOS]
        assert all(a < b for a, b in zip(xs, xs[1:]))

    @pytest.mark.parametrize("q", RATIOS + [100.0])
    def test_phi_prime_imaginary_and_consistent(self, q):
        m = find_rayleigh_mode(q)
        d = complex(phi_prime(m.s0_tilde, q))
        assert abs(d.real) < 1e-10
        assert abs(d) == pytest.approx(m.phi_prime_abs, abs=1e-10)

    def test_material_sets_phase_speed(self):
        m = find_rayleigh_mode(Material(1.0, 0.1))
        assert m.c_r == pytest.approx(m.xi0_tilde * math.sqrt(0.1))

    def test_table_rows(self):
        rows = dispersion_table()
        assert [r[0] for r in rows] == RATIOS
        for r in rows:
            assert r[1:] == pytest.approx(ORACLE[r[0]], abs=1e-12)


class TestDelta:
    @given(st.floats(0.01, 5), st.floats(-5, 5), st.floats(0.1, 5), st.floats(0.0, 5), st.floats(0.01, 2))
    @settings(max_examples=200)
    def test_scaling_identity(self, a, b, w, lam, mu):
        mat = Material(lam, mu)
        s = complex(a, b)
        lhs = mu * (lam + 2 * mu) * complex(determinant_delta(s, w, mat))
        rhs = 4 * mu**2 * w**4 * complex(phi(s / (w * math.sqrt(mu)), mat.lam_over_mu))
        scale = mu * (lam + 2 * mu) * (abs(w) ** 2 + abs(s) ** 2 / mu) ** 2 + 1e-300
        assert abs(lhs - rhs) <= 1e-12 * scale

    def test_vanishes_at_eigenvalue(self):
        mat = Material(1.0, 0.1)
        mode = find_rayleigh_mode(mat)
        w = 2 * math.pi
        s = 1j * mode.xi0_tilde * w * math.sqrt(mat.mu)
        assert abs(complex(determinant_delta(s, w, mat))) < 1e-10

    def test_nonzero_in_right_half_plane(self):
        assert abs(complex(determinant_delta(1.0, 1.0, Material(1.0, 1.0)))) > 0

    def test_requires_nonzero_omega(self):
        with pytest.raises(ValueError):
            determinant_delta(1.0, 0.0, Material(1.0, 1.0))
