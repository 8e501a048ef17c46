import numpy as np
import pytest
from scipy.integrate import quad

from qsampler.diagnostics import (
    coherent_state,
    cue_surmise_cdf,
    cue_surmise_pdf,
    grid_occupancy,
    husimi_grid,
    husimi_grids,
    ipr,
    ipr_set,
    ks_distance,
    porter_thomas_cdf,
    scaled_moment_report,
    spacing_sample,
    trans_moments,
    transition_matrix,
)
from qsampler.harper import angle_basis, h0_eigenbasis, hybrid_reference_params
from qsampler.linalg import ContractViolationError, dft_matrix, eigenphases
from qsampler.samplers import haar_unitary, reference_propagator

TWO_PI = 2 * np.pi


class TestSpacingSample:
    def test_equally_spaced(self):
        phases = TWO_PI * np.arange(10) / 10
        assert np.allclose(spacing_sample(phases), 1.0)

    def test_mean_is_one(self):
        rng = np.random.default_rng(4)
        s = spacing_sample(np.sort(rng.uniform(0, TWO_PI, 200)))
        assert s.mean() == pytest.approx(1.0, abs=1e-10)
        assert s.size == 200
        assert np.all(s >= 0)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(5)
        phases = np.sort(rng.uniform(0, TWO_PI, 64))
        rotated = np.sort((phases + 1.234) % TWO_PI)
        assert np.allclose(np.sort(spacing_sample(phases)),
                           np.sort(spacing_sample(rotated)))

    def test_too_few_phases(self):
        with pytest.raises(ValueError):
            spacing_sample([0.5])

    def test_haar_matches_surmise(self):
        U = haar_unitary(600, np.random.default_rng(2026))
        s = spacing_sample(eigenphases(U))
        assert ks_distance(s, cue_surmise_cdf) < 0.05


class TestCueSurmise:
    def test_surmise_vanishes_at_zero(self):
        assert cue_surmise_pdf(0.0) == 0.0

    def test_normalization_and_mean_by_quadrature(self):
        total, _ = quad(cue_surmise_pdf, 0, np.inf)
        mean, _ = quad(lambda s: s * cue_surmise_pdf(s), 0, np.inf)
        assert total == pytest.approx(1.0, abs=1e-6)
        assert mean == pytest.approx(1.0, abs=1e-6)

    def test_literal_form_at_zero(self):
        assert cue_surmise_pdf(0.0, literal=True) == pytest.approx(32 / np.pi**2)
        assert 32 / np.pi**2 == pytest.approx(3.2423, abs=1e-4)

    def test_literal_form_total_mass(self):
        total, _ = quad(lambda s: cue_surmise_pdf(s, literal=True), 0, np.inf)
        assert total == pytest.approx(8 / np.pi, abs=1e-6)

    @pytest.mark.parametrize("literal", [False, True])
    def test_cdf_matches_pdf_quadrature(self, literal):
        for s in (0.3, 1.0, 2.2):
            val, _ = quad(lambda t: cue_surmise_pdf(t, literal=literal), 0, s)
            assert cue_surmise_cdf(s, literal=literal) == pytest.approx(val, abs=1e-9)

    def test_domain_guard(self):
        with pytest.raises(ValueError):
            cue_surmise_pdf(-0.1)


class TestTransitionMatrix:
    def test_identity_pattern(self):
        z = transition_matrix(np.eye(6, dtype=complex), angle_basis(6))
        assert np.abs(z - np.eye(6)).max() < 1e-14

    def test_doubly_stochastic(self):
        U = haar_unitary(24, np.random.default_rng(7))
        z = transition_matrix(U, angle_basis(24))
        assert np.abs(z.sum(axis=0) - 1).max() < 1e-8
        assert np.abs(z.sum(axis=1) - 1).max() < 1e-8

    def test_haar_moments_angle_basis(self):
        U = haar_unitary(81, np.random.default_rng(2026))
        rep = trans_moments(transition_matrix(U, angle_basis(81)))
        assert abs(rep.m2 - 2.0) <= 3 * rep.se2
        assert abs(rep.m3 - 6.0) <= 3 * rep.se3

    def test_hybrid_system_deviates_strongly(self):
        # deterministic propagator: the eigenbasis of its static part
        # localizes the dynamics and inflates the moments far beyond 2
        U = reference_propagator("U_Tb", 81)
        basis = h0_eigenbasis(hybrid_reference_params(81))
        rep = trans_moments(transition_matrix(U, basis))
        assert rep.m2 > 5.0
        assert 10.5 < rep.m2 < 12.5

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            transition_matrix(np.eye(4, dtype=complex), angle_basis(5))

    def test_non_orthonormal_basis_rejected(self):
        bad = np.eye(4, dtype=complex)
        bad[0, 0] = 2.0
        with pytest.raises(ContractViolationError):
            transition_matrix(np.eye(4, dtype=complex), bad)


class TestMoments:
    def test_uniform_probabilities(self):
        z = np.full((9, 9), 1.0 / 9)
        rep = trans_moments(z)
        assert rep.m2 == pytest.approx(1.0)
        assert rep.m3 == pytest.approx(1.0)
        assert rep.se2 == pytest.approx(0.0)

    def test_exponential_reference(self):
        rng = np.random.default_rng(11)
        rep = scaled_moment_report(rng.exponential(size=200_000))
        assert abs(rep.m2 - 2.0) <= 3 * rep.se2
        assert abs(rep.m3 - 6.0) <= 3 * rep.se3

    def test_identity_moment(self):
        N = 7
        rep = trans_moments(np.eye(N))
        assert rep.m2 == pytest.approx(float(N))

    def test_ordering_invariant(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            rep = scaled_moment_report(rng.exponential(size=500))
            if rep.m2 >= 1.0:
                assert rep.m3 >= rep.m2


class TestPorterThomas:
    def test_at_zero(self):
        assert porter_thomas_cdf(0.0, 10) == 0.0

    def test_half_mass_point(self):
        N = 81
        assert porter_thomas_cdf(np.log(2) / N, N) == pytest.approx(0.5)

    def test_haar_empirical_distance(self):
        N = 81
        U = haar_unitary(N, np.random.default_rng(2026))
        z = transition_matrix(U, angle_basis(N)).ravel()
        assert ks_distance(z, lambda x: porter_thomas_cdf(x, N)) < 0.03


class TestIpr:
    def test_basis_vector(self):
        e0 = np.zeros(8, dtype=complex)
        e0[0] = 1.0
        assert ipr(e0, angle_basis(8), q=2) == pytest.approx(1.0)

    def test_uniform_superposition(self):
        N = 8
        flat = np.full(N, 1 / np.sqrt(N), dtype=complex)
        for q in (2, 3):
            assert ipr(flat, angle_basis(N), q) == pytest.approx(float(N) ** (1 - q))

    def test_unnormalized_rejected(self):
        with pytest.raises(ContractViolationError):
            ipr(np.ones(4, dtype=complex), angle_basis(4))

    def test_monotone_in_q(self):
        rng = np.random.default_rng(17)
        psi = rng.normal(size=12) + 1j * rng.normal(size=12)
        psi /= np.linalg.norm(psi)
        B = angle_basis(12)
        vals = [ipr(psi, B, q) for q in (2, 3, 4, 5)]
        assert np.all(np.diff(vals) <= 1e-15)

    def test_range(self):
        rng = np.random.default_rng(19)
        psi = rng.normal(size=16) + 1j * rng.normal(size=16)
        psi /= np.linalg.norm(psi)
        v = ipr(psi, angle_basis(16), q=2)
        assert 16 ** (-1) <= v <= 1.0


class TestIprSet:
    def test_identity(self):
        assert np.allclose(ipr_set(np.eye(6, dtype=complex), angle_basis(6), 2), 1.0)

    def test_fourier_columns_are_flat(self):
        N = 9
        vals = ipr_set(dft_matrix(N), angle_basis(N), q=2)
        assert np.allclose(vals, 1.0 / N)

    def test_haar_mean_exact_oracle(self):
        # exact Haar-column expectation: E[I_q] = q! N (N-1)! / (N+q-1)!
        N = 81
        rng = np.random.default_rng(23)
        vals2, vals3 = [], []
        for _ in range(4):
            U = haar_unitary(N, rng)
            vals2.extend(ipr_set(U, angle_basis(N), 2))
            vals3.extend(ipr_set(U, angle_basis(N), 3))
        for q, vals in ((2, np.array(vals2)), (3, np.array(vals3))):
            exact = 1.0
            for i in range(q):
                exact *= (i + 1) / (N + i)
            exact *= N
            se = vals.std() / np.sqrt(vals.size)
            assert abs(vals.mean() - exact) <= 3 * se


class TestHusimi:
    def test_angle_ket_peaks_at_its_angle(self):
        N = 15
        j = 4
        psi = np.zeros(N, dtype=complex)
        psi[j] = 1.0
        grid = husimi_grid(psi, R=N)
        _, col = np.unravel_index(np.argmax(grid), grid.shape)
        assert col == j

    def test_fourier_mode_peaks_at_its_momentum(self):
        N = 15
        k = 6
        psi = dft_matrix(N)[:, k]
        grid = husimi_grid(psi, R=N)
        row, _ = np.unravel_index(np.argmax(grid), grid.shape)
        assert row == k

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(29)
        psi = rng.normal(size=10) + 1j * rng.normal(size=10)
        psi /= np.linalg.norm(psi)
        g1 = husimi_grid(psi, R=10)
        g2 = husimi_grid(np.exp(0.77j) * psi, R=10)
        assert np.abs(g1 - g2).max() < 1e-12

    def test_unnormalized_rejected(self):
        with pytest.raises(ContractViolationError):
            husimi_grid(np.ones(6, dtype=complex), R=6)

    def test_coherent_state_normalized(self):
        psi = coherent_state(21, 1.0, 2.0)
        assert np.linalg.norm(psi) == pytest.approx(1.0)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(31)
        states = rng.normal(size=(8, 3)) + 1j * rng.normal(size=(8, 3))
        states /= np.linalg.norm(states, axis=0)
        grids = husimi_grids(states, R=8)
        for i in range(3):
            assert np.abs(grids[i] - husimi_grid(states[:, i], R=8)).max() < 1e-12

    def test_occupancy_statistic(self):
        flat = np.ones((10, 10))
        assert grid_occupancy(flat) == 1.0
        localized = np.zeros((10, 10))
        localized[0, 0] = 1.0
        assert grid_occupancy(localized) == pytest.approx(0.01)
