"""Dense complex linear algebra substrate: the discrete Fourier unitary,
Hermitian/unitary eigendecompositions, spectral matrix exponentials, and
unitarity certification."""

import numpy as np

DEFAULT_UNITARY_TOL = 1e-8
DEFAULT_HERMITIAN_TOL = 1e-10


class ContractViolationError(RuntimeError):
    """A numerical input violated its tolerance contract
    (non-unitary, non-Hermitian, unnormalized state, ...)."""


def unitarity_defect(U):
    """Max-entry norm of U^dag U - I."""
    U = np.asarray(U)
    n = U.shape[0]
    return float(np.abs(U.conj().T @ U - np.eye(n)).max())


def hermiticity_defect(H):
    """Max-entry norm of H - H^dag."""
    H = np.asarray(H)
    return float(np.abs(H - H.conj().T).max())


def check_unitary(U, tol=DEFAULT_UNITARY_TOL):
    """Return the unitarity defect, raising if it exceeds ``tol``."""
    d = unitarity_defect(U)
    if not d < tol:
        raise ContractViolationError(
            f"matrix is not unitary: defect {d:.3e} >= tol {tol:.3e}")
    return d


def check_hermitian(H, tol=DEFAULT_HERMITIAN_TOL):
    """Return the hermiticity defect, raising if it exceeds ``tol``."""
    d = hermiticity_defect(H)
    if not d < tol:
        raise ContractViolationError(
            f"matrix is not Hermitian: defect {d:.3e} >= tol {tol:.3e}")
    return d


def dft_matrix(N):
    """Unitary DFT matrix with entries exp(2i pi j k / N) / sqrt(N).

    Columns are momentum eigenvectors: column k carries angle-basis phases
    exp(i theta_j k) with theta_j = 2 pi j / N.
    """
    if N < 1:
        raise ValueError(f"invalid dimension N={N}; need N >= 1")
    j = np.arange(N)
    return np.exp(2j * np.pi * np.outer(j, j) / N) / np.sqrt(N)


def eig_hermitian(H, tol=DEFAULT_HERMITIAN_TOL):
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a
    Hermitian matrix.  Raises ContractViolationError on non-Hermitian input."""
    H = np.asarray(H)
    check_hermitian(H, tol)
    w, V = np.linalg.eigh(H)
    return w, V


def eigenphases(U, tol=DEFAULT_UNITARY_TOL):
    """Sorted eigenphases of a unitary, in [0, 2 pi).

    Eigenvalues are projected to unit modulus before taking arguments, so
    tolerance-level unitarity defects do not leak into the phases.
    """
    U = np.asarray(U)
    check_unitary(U, tol)
    vals = np.linalg.eigvals(U)
    moduli = np.abs(vals)
    if np.abs(moduli - 1.0).max() >= tol:
        raise ContractViolationError("eigenvalue moduli deviate from 1 beyond tol")
    phases = np.angle(vals / moduli) % (2.0 * np.pi)
    return np.sort(phases)


def expm_hermitian(H, s, tol=DEFAULT_HERMITIAN_TOL):
    """exp(-i s H) for Hermitian H, via the spectral decomposition."""
    w, V = eig_hermitian(H, tol)
    return (V * np.exp(-1j * s * w)) @ V.conj().T
