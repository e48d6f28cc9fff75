"""Operator assembly, eigenstructure, and matrix Mittag-Leffler action."""

import numpy as np
import pytest
from scipy.linalg import expm

from fracrte.errors import ConfigurationError, DefectiveOperatorError, DomainError
from fracrte.legendre import PhaseFunction
from fracrte.spectral import (
    MediumParams,
    assemble_operator,
    critical_wavenumber,
    decompose,
    exact_mode_weights,
    h_coeff,
    hermitian_matrix_action,
    hermitian_mode_weights,
    ml_matrix_action,
    section5_medium,
)


@pytest.fixture(scope="module")
def medium():
    return section5_medium(alpha=0.5)


@pytest.fixture(scope="module")
def k_c(medium):
    return critical_wavenumber(medium)


class TestMediumParams:
    def test_benchmark_values(self, medium, k_c):
        assert medium.sigma_t == 10.0
        assert medium.g == pytest.approx(0.9)
        assert k_c == pytest.approx(np.sqrt(3) / 2, rel=1e-12)

    def test_validation(self):
        pf = PhaseFunction.isotropic()
        with pytest.raises(DomainError):
            MediumParams(alpha=1.5, v=1.0, sigma_s=1.0, sigma_a=0.0, phase=pf)
        with pytest.raises(DomainError):
            MediumParams(alpha=0.5, v=1.0, sigma_s=-1.0, sigma_a=0.0, phase=pf)


class TestMomentCoefficients:
    def test_h_zero_scattering_only(self, medium):
        assert h_coeff(0, medium) == pytest.approx(0.0, abs=1e-14)

    def test_h_one_benchmark(self, medium):
        assert h_coeff(1, medium) == pytest.approx(0.3, rel=1e-12)

    def test_h_beyond_kernel(self, medium):
        assert h_coeff(5, medium) == 11.0

    def test_h_zero_with_absorption(self):
        m = section5_medium(0.5, sigma_a=1.0)
        assert h_coeff(0, m) == pytest.approx(m.sigma_a / m.sigma_t)


class TestAssembly:
    def test_benchmark_matrix(self, medium, k_c):
        op = assemble_operator(1.0, medium, 1)
        expect = np.array([[0.0, 1.0j], [1.0j, 2.0 * k_c]]) / np.sqrt(3.0)
        assert np.max(np.abs(op.entries - expect)) < 1e-14

    def test_symmetric_not_hermitian(self, medium):
        op = assemble_operator(2.3, medium, 5).entries
        assert np.max(np.abs(op - op.T)) == 0.0
        assert np.max(np.abs(op - op.conj().T)) > 0.1

    def test_zero_wavenumber_diagonal(self):
        m = section5_medium(0.5, sigma_a=1.0)
        op = assemble_operator(0.0, m, 3).entries
        assert np.max(np.abs(op - np.diag(np.diag(op)))) == 0.0
        assert np.min(np.diag(op).real) == pytest.approx(1.0)  # sigma_a

    def test_truncation_below_kernel_degree(self, medium):
        with pytest.raises(ConfigurationError):
            assemble_operator(1.0, medium, 0)


class TestDecomposition:
    def test_closed_form_eigenvalues(self, medium, k_c):
        for frac in np.concatenate((np.linspace(0.05, 0.98, 12), np.linspace(1.02, 5.0, 12))):
            k = frac * k_c
            dec = decompose(assemble_operator(k, medium, 1))
            s = np.sqrt(complex(1.0 - frac**2))
            ref = np.array([(k_c / np.sqrt(3)) * (1 + s), (k_c / np.sqrt(3)) * (1 - s)])
            got = dec.eigenvalues
            # match by minimum distance, conjugate-pair order is arbitrary
            err = min(
                np.max(np.abs(got - ref)), np.max(np.abs(got - ref[::-1]))
            )
            assert err < 1e-10

    def test_zero_wavenumber_modes(self, medium):
        dec = decompose(assemble_operator(0.0, medium, 1))
        assert sorted(np.round(dec.eigenvalues.real, 10)) == pytest.approx([0.0, 1.0])
        # conserved mode aligned with the zeroth unit vector
        i0 = int(np.argmin(np.abs(dec.eigenvalues)))
        v = dec.right_vectors[:, i0]
        assert abs(abs(v[0]) - 1.0) < 1e-12

    def test_defective_at_critical_wavenumber(self, medium, k_c):
        dec = decompose(assemble_operator(k_c, medium, 1))
        assert dec.defective_flag
        with pytest.raises(DefectiveOperatorError):
            ml_matrix_action(dec, 0.1, 0.5, np.array([1.0, 0.0]))

    def test_displaced_point_clean(self, medium, k_c):
        dec = decompose(assemble_operator(k_c * (1 + 1e-7), medium, 1))
        assert not dec.defective_flag

    def test_repeated_diagonal_not_defective(self, medium):
        # at k = 0 the operator is diagonal with equal entries for l >= 2:
        # degenerate but diagonalizable
        dec = decompose(assemble_operator(0.0, medium, 5))
        assert not dec.defective_flag

    def test_residual_and_biorthogonality(self, medium):
        for k in (0.2, 1.0, 4.0):
            op = assemble_operator(k, medium, 7)
            dec = decompose(op)
            A = op.entries
            for n in range(8):
                r = A @ dec.right_vectors[:, n] - dec.eigenvalues[n] * dec.right_vectors[:, n]
                assert np.linalg.norm(r) < 1e-10 * op.norm
            gram = dec.left_vectors @ dec.right_vectors
            assert np.max(np.abs(gram - np.eye(8))) < 1e-10

    def test_dissipativity(self, medium):
        for k in np.linspace(0.0, 10.0, 40):
            dec = decompose(assemble_operator(float(k), medium, 7))
            assert np.min(dec.eigenvalues.real) > -1e-12


class TestMatrixAction:
    def test_identity_at_time_zero(self, medium):
        dec = decompose(assemble_operator(0.7, medium, 3))
        c0 = np.array([1.0, 0.2, 0.1, 0.05], dtype=complex)
        got = ml_matrix_action(dec, 0.0, 0.5, c0)
        assert np.max(np.abs(got - c0)) < 1e-14

    def test_order_one_matches_expm(self):
        m = section5_medium(1.0)
        rng = np.random.default_rng(8)
        for k in (0.3, 2.0, 7.5):
            op = assemble_operator(k, m, 5)
            dec = decompose(op)
            c0 = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            t = 0.41
            got = ml_matrix_action(dec, t, 1.0, c0)
            ref = expm(-op.entries * t) @ c0
            assert np.max(np.abs(got - ref)) < 1e-9

    def test_exact_two_moment_weights(self, medium, k_c):
        k = 0.6 * k_c
        dec = decompose(assemble_operator(k, medium, 1))
        s = np.sqrt(1.0 - 0.36)
        w = exact_mode_weights(dec)
        lam = dec.eigenvalues
        iplus = int(np.argmax(lam.real))
        assert w[iplus] == pytest.approx(-(1 - s) / (2 * s), rel=1e-10)
        assert w[1 - iplus] == pytest.approx((1 + s) / (2 * s), rel=1e-10)
        assert np.sum(w) == pytest.approx(1.0, abs=1e-12)

    def test_component_weights_from_action(self, medium, k_c):
        # evolving the moment loading and reading component zero agrees with
        # the closed two-by-two reduction
        k = 0.6 * k_c
        dec = decompose(assemble_operator(k, medium, 1))
        c0 = np.array([0.5, np.sqrt(3) / 2], dtype=complex)
        t, alpha = 0.13, 0.5
        got = ml_matrix_action(dec, t, alpha, c0)[0]
        from fracrte.specfun import mittag_leffler

        w = exact_mode_weights(dec)
        coeff = dec.left_vectors @ c0
        direct = np.sum(
            dec.right_vectors[0, :] * coeff
            * mittag_leffler(alpha, -dec.eigenvalues * t**alpha)
        )
        assert got == pytest.approx(direct, rel=1e-12)


class TestHermitianWeights:
    def test_above_critical_half_half(self, medium, k_c):
        dec = decompose(assemble_operator(2.0 * k_c, medium, 1))
        assert np.max(np.abs(hermitian_mode_weights(dec) - 0.5)) < 1e-12

    def test_below_critical_closed_form(self, medium, k_c):
        frac = 0.7
        dec = decompose(assemble_operator(frac * k_c, medium, 1))
        s = np.sqrt(1 - frac**2)
        w = hermitian_mode_weights(dec)
        lam = dec.eigenvalues.real
        ismall = int(np.argmin(lam))
        # larger weight rides the smaller eigenvalue
        assert w[ismall] == pytest.approx((1 + s) / 2, rel=1e-10)
        assert w[1 - ismall] == pytest.approx((1 - s) / 2, rel=1e-10)
        assert np.sum(w) == pytest.approx(1.0, abs=1e-12)

    def test_zero_wavenumber_all_on_conserved_mode(self, medium):
        dec = decompose(assemble_operator(0.0, medium, 1))
        w = hermitian_mode_weights(dec)
        i0 = int(np.argmin(np.abs(dec.eigenvalues)))
        assert w[i0] == pytest.approx(1.0, abs=1e-12)
        assert w[1 - i0] == pytest.approx(0.0, abs=1e-12)

    def test_modes_differ_between_critical_points(self, medium, k_c):
        # the operator is non-normal for 0 < k < k_c: conjugated weights and
        # exact left-eigenvector weights disagree there (reported, by design)
        dec = decompose(assemble_operator(0.6 * k_c, medium, 1))
        wh = hermitian_mode_weights(dec)
        we = exact_mode_weights(dec)
        assert np.max(np.abs(np.sort(wh) - np.sort(we.real))) > 0.1

    def test_hermitian_action_at_zero_wavenumber_matches_exact(self, medium):
        dec = decompose(assemble_operator(0.0, medium, 1))
        c0 = np.array([0.5, 0.1], dtype=complex)
        a = ml_matrix_action(dec, 0.3, 0.5, c0)
        b = hermitian_matrix_action(dec, 0.3, 0.5, c0)
        assert np.max(np.abs(a - b)) < 1e-12
