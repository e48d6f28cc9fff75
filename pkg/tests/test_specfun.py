"""Special-function contracts: frozen oracle values and identities."""

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erfc, wofz

from fracrte.errors import DomainError
from fracrte.specfun import (
    MLEvalConfig,
    f_alpha_half,
    m_wright,
    mittag_leffler,
    stable_density,
)

# values frozen from a 50-digit compensated Taylor oracle
E_HALF_AT_MINUS_ONE = 0.42758357615580700441
E_34_AT_HALF_COMPLEX = 0.572539965795917643 + 0.16415895553058264644j
M_QUARTER_AT_TWO = 0.16125108345458585591
M_HALF_AT_ONE = 0.43939128946772239705
F_HALF_AT_ONE = 0.21969564473386119852


class TestMittagLeffler:
    def test_order_one_is_exp(self):
        assert mittag_leffler(1.0, 1.0) == pytest.approx(np.e, rel=1e-12)

    def test_zero_argument_is_exactly_one(self):
        for alpha in (0.25, 0.5, 0.9, 1.0):
            assert mittag_leffler(alpha, 0.0) == 1.0

    def test_half_order_negative_one(self):
        got = mittag_leffler(0.5, -1.0)
        assert got.real == pytest.approx(E_HALF_AT_MINUS_ONE, rel=1e-11)
        assert got.real == pytest.approx(np.e * erfc(1.0), rel=1e-11)
        assert abs(got.imag) < 1e-14

    def test_three_quarter_complex_point(self):
        got = mittag_leffler(0.75, -(0.5 - 0.3j))
        assert got == pytest.approx(E_34_AT_HALF_COMPLEX, rel=1e-11)

    def test_exp_identity_on_disc(self):
        rng = np.random.default_rng(11)
        z = 10 * np.sqrt(rng.random(200)) * np.exp(2j * np.pi * rng.random(200))
        vals = mittag_leffler(1.0, z)
        assert np.max(np.abs(vals - np.exp(z)) / np.abs(np.exp(z))) < 1e-10

    def test_cosine_identity(self):
        x = np.linspace(0.0, 5.0, 101)
        vals = mittag_leffler(2.0, -(x**2))
        assert np.max(np.abs(vals - np.cos(x))) < 1e-10

    @pytest.mark.parametrize("alpha", [0.25, 0.375, 0.5])
    def test_reflection_identity(self, alpha):
        rng = np.random.default_rng(3)
        for _ in range(40):
            z = 3 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            lhs = mittag_leffler(alpha, z) + mittag_leffler(alpha, -z)
            rhs = 2.0 * mittag_leffler(2 * alpha, z**2)
            assert abs(lhs - rhs) <= 1e-8 * (1 + abs(rhs))

    def test_half_order_closed_form_on_rays(self):
        # E_{1/2}(z) = exp(z^2) erfc(-z) = wofz(-iz)
        for theta in (0.55 * np.pi, 0.75 * np.pi, np.pi):
            z = np.linspace(0.05, 12.0, 60) * np.exp(1j * theta)
            got = mittag_leffler(0.5, z)
            ref = wofz(-1j * z)
            assert np.max(np.abs(got - ref) / np.abs(ref)) < 1e-9

    def test_completely_monotone_on_negative_axis(self):
        for alpha in (0.25, 0.5, 0.75):
            vals = mittag_leffler(alpha, -np.linspace(0.0, 150.0, 500)).real
            assert np.all(vals > 0)
            assert np.all(vals <= 1.0)
            assert np.all(np.diff(vals) <= 1e-15)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            mittag_leffler(0.5, np.inf)
        with pytest.raises(DomainError):
            mittag_leffler(0.0, 1.0)
        with pytest.raises(DomainError):
            mittag_leffler(2.5, 1.0)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            MLEvalConfig(series_cutoff_radius=20.0, asymptotic_radius=10.0)
        with pytest.raises(DomainError):
            MLEvalConfig(target_rel_tol=1e-3)

    def test_array_shape_round_trip(self):
        z = np.array([[0.1, -0.5], [1.0 + 1.0j, -3.0]])
        out = mittag_leffler(0.6, z)
        assert out.shape == z.shape


class TestMWright:
    def test_value_at_zero(self):
        assert m_wright(0.5, 0.0) == pytest.approx(1.0 / np.sqrt(np.pi), rel=1e-13)

    def test_half_order_gaussian(self):
        assert m_wright(0.5, 1.0) == pytest.approx(M_HALF_AT_ONE, rel=1e-12)
        xs = np.linspace(0, 8, 33)
        ref = np.exp(-(xs**2) / 4.0) / np.sqrt(np.pi)
        assert np.max(np.abs(m_wright(0.5, xs) - ref)) < 1e-12

    def test_quarter_order_oracle_point(self):
        assert m_wright(0.25, 2.0) == pytest.approx(M_QUARTER_AT_TWO, rel=1e-10)

    def test_nonnegative(self):
        for nu in (0.25, 0.5, 0.75):
            assert np.all(m_wright(nu, np.linspace(0, 20, 81)) >= 0.0)

    @pytest.mark.parametrize("nu", [0.25, 0.5, 0.75])
    def test_unit_integral(self, nu):
        val, _ = quad(lambda x: m_wright(nu, x), 0, 60, limit=300)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            m_wright(1.2, 1.0)
        with pytest.raises(DomainError):
            m_wright(0.5, -0.1)


class TestStableKernel:
    def test_closed_form_value(self):
        assert f_alpha_half(1.0) == pytest.approx(F_HALF_AT_ONE, rel=1e-13)

    def test_vanishes_at_origin(self):
        assert f_alpha_half(1e-4) < 1e-200

    def test_unit_mass(self):
        val, _ = quad(f_alpha_half, 0, np.inf, limit=300)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            f_alpha_half(0.0)

    def test_general_order_matches_half_closed_form(self):
        ts = np.logspace(-1.5, 1.5, 13)
        ref = f_alpha_half(ts)
        got = stable_density(0.5, ts)
        assert np.max(np.abs(got - ref)) < 1e-12

    @pytest.mark.parametrize("alpha", [0.25, 0.75])
    def test_general_order_unit_mass(self, alpha):
        val, _ = quad(lambda t: stable_density(alpha, t), 0, np.inf, limit=400)
        assert val == pytest.approx(1.0, abs=1e-7)
