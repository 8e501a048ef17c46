"""Statistical battery comparing unitaries against Haar/random-matrix
predictions: quasi-energy spacings, transition probabilities and their
Porter-Thomas moments, inverse participation ratios, and Husimi
distributions."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .harper import TWO_PI, Basis, angle_grid
from .linalg import ContractViolationError

BASIS_ORTHONORMALITY_TOL = 1e-8
STATE_NORM_TOL = 1e-8


# ---------------------------------------------------------------------------
# quasi-energy spacings


def spacing_sample(phases):
    """Circular nearest-neighbour spacings of sorted phases in [0, 2 pi),
    including the wrap-around gap, normalized to mean 1.  n phases yield
    n spacings."""
    phases = np.sort(np.asarray(phases, dtype=float))
    if phases.size < 2:
        raise ValueError("need at least 2 phases")
    gaps = np.diff(phases)
    wrap = TWO_PI - (phases[-1] - phases[0])
    s = np.concatenate([gaps, [wrap]])
    return s / s.mean()


def cue_surmise_pdf(s, literal=False):
    """Spacing density of the circular unitary ensemble.

    Default is the normalized, mean-1 surmise (32/pi^2) s^2 exp(-4 s^2/pi).
    ``literal=True`` drops the s^2 factor; that variant integrates to 8/pi
    and is kept for reference only.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("spacings must be nonnegative")
    gauss = np.exp(-4.0 * s**2 / np.pi)
    if literal:
        return 32.0 / np.pi**2 * gauss
    return 32.0 / np.pi**2 * s**2 * gauss


def cue_surmise_cdf(s, literal=False):
    """Cumulative form of cue_surmise_pdf (closed form via erf)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("spacings must be nonnegative")
    if literal:
        return (8.0 / np.pi) * erf(2.0 * s / np.sqrt(np.pi))
    return erf(2.0 * s / np.sqrt(np.pi)) - (4.0 * s / np.pi) * np.exp(-4.0 * s**2 / np.pi)


def ks_distance(sample, cdf):
    """Kolmogorov-Smirnov sup distance between an empirical sample and a
    reference CDF callable."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


# ---------------------------------------------------------------------------
# transition probabilities and moments


def _basis_vectors(B):
    V = B.vectors if isinstance(B, Basis) else np.asarray(B)
    n = V.shape[0]
    defect = np.abs(V.conj().T @ V - np.eye(n)).max()
    if defect >= BASIS_ORTHONORMALITY_TOL:
        raise ContractViolationError(
            f"basis columns are not orthonormal: defect {defect:.3e}")
    return V


def transition_matrix(U, B):
    """z[j, k] = |<v_j| U |v_k>|^2 in the orthonormal basis B.  Every row and
    column sums to 1 (U unitary)."""
    U = np.asarray(U)
    V = _basis_vectors(B)
    if U.shape != V.shape:
        raise ValueError(f"dimension mismatch: U {U.shape} vs basis {V.shape}")
    return np.abs(V.conj().T @ U @ V) ** 2


@dataclass(frozen=True)
class MomentReport:
    """Second and third moments of a mean-1 nonnegative sample, with standard
    errors (sample std / sqrt(sample count))."""
    m2: float
    m3: float
    se2: float
    se3: float


def scaled_moment_report(values):
    """MomentReport of N_samples values already scaled to mean ~1 (an
    exponential reference distribution gives m2 = 2, m3 = 6)."""
    x = np.asarray(values, dtype=float).ravel()
    x2, x3 = x**2, x**3
    n = x.size
    return MomentReport(
        m2=float(x2.mean()), m3=float(x3.mean()),
        se2=float(x2.std() / math.sqrt(n)), se3=float(x3.std() / math.sqrt(n)))


def trans_moments(z):
    """Moments (1/N^2) sum (N z_jk)^q for q = 2, 3 with standard errors."""
    z = np.asarray(z, dtype=float)
    N = z.shape[0]
    return scaled_moment_report(N * z)


def porter_thomas_cdf(z, N):
    """Cumulative Porter-Thomas distribution 1 - exp(-N z) of squared
    overlaps with Haar-random states."""
    return 1.0 - np.exp(-N * np.asarray(z, dtype=float))


# ---------------------------------------------------------------------------
# inverse participation ratios


def ipr(psi, B, q=2):
    """Inverse participation ratio sum_j |<v_j|psi>|^(2q) of a normalized
    state in basis B.  1 for a basis element, N^(1-q) for a flat state."""
    psi = np.asarray(psi)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise ContractViolationError(f"state is not normalized: |psi| = {norm}")
    V = _basis_vectors(B)
    if psi.shape[0] != V.shape[0]:
        raise ValueError("dimension mismatch between state and basis")
    return float(np.sum(np.abs(V.conj().T @ psi) ** (2 * q)))


def ipr_set(U, B, q=2):
    """IPRs of every propagated basis column: {ipr(U |v_j>) : j}."""
    U = np.asarray(U)
    V = _basis_vectors(B)
    if U.shape != V.shape:
        raise ValueError(f"dimension mismatch: U {U.shape} vs basis {V.shape}")
    amps = V.conj().T @ U @ V
    return np.sum(np.abs(amps) ** (2 * q), axis=0)


# ---------------------------------------------------------------------------
# Husimi distributions


def coherent_state(N, phi0, p0, n_images=3):
    """Normalized torus coherent state centered at (phi0, p0): a periodized
    Gaussian of angular variance hbar_eff/2 = pi/N carrying the momentum
    phase exp(i p0 theta N / 2 pi)."""
    theta = angle_grid(N)
    sigma2 = np.pi / N
    amp = np.zeros(N, dtype=complex)
    for m in range(-n_images, n_images + 1):
        x = theta + TWO_PI * m - phi0
        amp += np.exp(-x**2 / (4.0 * sigma2)) * np.exp(1j * p0 * (theta + TWO_PI * m) * N / TWO_PI)
    return amp / np.linalg.norm(amp)


def _coherent_bank(N, R):
    # rows indexed by flattened (p_r, phi_c) grid cells
    bank = np.empty((R * R, N), dtype=complex)
    centers = TWO_PI * np.arange(R) / R
    for r in range(R):
        for c in range(R):
            bank[r * R + c] = coherent_state(N, centers[c], centers[r])
    return bank


def husimi_grid(psi, R):
    """R x R grid of |<coherent(phi_c, p_r)|psi>|^2 with phi on columns and
    p on rows, both sampled at 2 pi (index)/R."""
    psi = np.asarray(psi)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise ContractViolationError(f"state is not normalized: |psi| = {norm}")
    N = psi.shape[0]
    bank = _coherent_bank(N, R)
    return (np.abs(bank.conj() @ psi) ** 2).reshape(R, R)


def husimi_grids(states, R):
    """Husimi grids of several column states at once (shared coherent bank)."""
    states = np.asarray(states)
    N = states.shape[0]
    bank = _coherent_bank(N, R)
    vals = np.abs(bank.conj() @ states) ** 2
    return vals.T.reshape(states.shape[1], R, R)


def grid_occupancy(grid, rel_threshold=0.1):
    """Fraction of grid cells above rel_threshold * max(grid); spread proxy
    for phase-space delocalization."""
    grid = np.asarray(grid, dtype=float)
    return float(np.mean(grid > rel_threshold * grid.max()))
