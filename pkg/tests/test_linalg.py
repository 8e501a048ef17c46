import numpy as np
import pytest

from qsampler.linalg import (
    ContractViolationError,
    dft_matrix,
    eig_hermitian,
    eigenphases,
    expm_hermitian,
    hermiticity_defect,
    unitarity_defect,
)


def random_hermitian(N, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    return (A + A.conj().T) / 2


def random_unitary(N, seed):
    rng = np.random.default_rng(seed)
    Z = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diagonal(R) / np.abs(np.diagonal(R)))


class TestDftMatrix:
    def test_dimension_one(self):
        assert np.allclose(dft_matrix(1), [[1.0]])

    def test_dimension_two(self):
        expected = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        assert np.abs(dft_matrix(2) - expected).max() < 1e-15

    def test_unitarity_n8_direct_multiplication(self):
        Q = dft_matrix(8)
        assert np.abs(Q @ Q.conj().T - np.eye(8)).max() < 1e-12

    @pytest.mark.parametrize("N", [1, 2, 3, 5, 8, 16, 51, 81, 128])
    def test_unitarity_sweep(self, N):
        assert unitarity_defect(dft_matrix(N)) < 1e-12

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValueError):
            dft_matrix(0)


class TestEigHermitian:
    def test_diagonal_case(self):
        w, _ = eig_hermitian(np.diag([3.0, 1.0, 2.0]).astype(complex))
        assert np.allclose(w, [1.0, 2.0, 3.0])

    def test_zero_matrix(self):
        w, _ = eig_hermitian(np.zeros((4, 4), dtype=complex))
        assert np.allclose(w, 0.0)

    def test_reconstruction_oracle(self):
        H = random_hermitian(16, seed=7)
        w, V = eig_hermitian(H)
        assert np.abs((V * w) @ V.conj().T - H).max() < 1e-8

    def test_residual_and_orthonormality(self):
        H = random_hermitian(16, seed=8)
        w, V = eig_hermitian(H)
        scale = np.abs(H).max()
        assert np.abs(H @ V - V * w).max() < 1e-8 * scale
        assert unitarity_defect(V) < 1e-10

    def test_non_hermitian_rejected(self):
        H = random_hermitian(5, seed=1)
        H[0, 1] += 1.0
        with pytest.raises(ContractViolationError):
            eig_hermitian(H)


class TestEigenphases:
    def test_identity(self):
        assert np.allclose(eigenphases(np.eye(4, dtype=complex)), 0.0)

    def test_quarter_phases(self):
        U = np.diag([1.0, 1j, -1.0, -1j])
        assert np.allclose(eigenphases(U), [0, np.pi / 2, np.pi, 3 * np.pi / 2])

    def test_determinant_oracle(self):
        U = random_unitary(32, seed=5)
        phases = eigenphases(U)
        assert abs(np.exp(1j * phases.sum()) - np.linalg.det(U)) < 1e-8

    def test_sorted_and_in_range(self):
        phases = eigenphases(random_unitary(20, seed=9))
        assert np.all(np.diff(phases) >= 0)
        assert phases.min() >= 0 and phases.max() < 2 * np.pi

    def test_stable_under_eigenbasis_permutation(self):
        rng = np.random.default_rng(3)
        V = random_unitary(12, seed=13)
        theta = rng.uniform(0, 2 * np.pi, 12)
        D = np.diag(np.exp(1j * theta))
        perm = rng.permutation(12)
        U1 = V @ D @ V.conj().T
        U2 = V[:, perm] @ np.diag(np.exp(1j * theta[perm])) @ V[:, perm].conj().T
        assert np.abs(eigenphases(U1) - eigenphases(U2)).max() < 1e-9

    def test_non_unitary_rejected(self):
        with pytest.raises(ContractViolationError):
            eigenphases(2.0 * np.eye(3, dtype=complex))


class TestExpmHermitian:
    def test_zero_time_is_identity(self):
        H = random_hermitian(8, seed=2)
        assert np.abs(expm_hermitian(H, 0.0) - np.eye(8)).max() < 1e-12

    def test_diagonal_case(self):
        H = np.diag([0.3, -1.2, 2.5]).astype(complex)
        U = expm_hermitian(H, 1.7)
        assert np.abs(U - np.diag(np.exp(-1.7j * np.diag(H)))).max() < 1e-12

    def test_inverse_property(self):
        H = random_hermitian(16, seed=4)
        prod = expm_hermitian(H, 0.8) @ expm_hermitian(H, -0.8)
        assert np.abs(prod - np.eye(16)).max() < 1e-10

    def test_additivity(self):
        H = random_hermitian(10, seed=6)
        lhs = expm_hermitian(H, 0.4) @ expm_hermitian(H, 1.1)
        assert np.abs(lhs - expm_hermitian(H, 1.5)).max() < 1e-9

    def test_unitary_output(self):
        H = random_hermitian(12, seed=11)
        assert unitarity_defect(expm_hermitian(H, 2.3)) < 1e-10


def test_defect_helpers():
    assert unitarity_defect(np.eye(3)) == 0.0
    assert hermiticity_defect(np.eye(3)) == 0.0
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert hermiticity_defect(A) == 1.0
