"""Driven Harper system on the discretized torus: Hamiltonian pieces and
split-step propagators.

The Hilbert space is C^N with angle grid theta_j = 2 pi j / N and effective
Planck constant hbar_eff = 2 pi / N.  The Hamiltonian is

    h(tau) = a (1 - cos(p_op - b)) - epsilon cos(phi_op - phi0)
             - mu cos(phi_op - phi0 + tau - tau0)
             - mu_prime cos(phi_op - phi0 - tau + tau0)

where phi_op is diagonal on the angle grid and p_op is its discrete Fourier
conjugate (same grid of eigenvalues).  One drive period is tau in [0, 2 pi].

Propagators approximate the time-ordered exponential of -i h(tau) / hbar_eff
by second-order Strang splitting: a kinetic half step (diagonal in the
Fourier basis), the full potential + drive step evaluated at the step's
midpoint time (diagonal in the angle basis), then another kinetic half step.
Consecutive kinetic half steps are merged when the kinetic term is constant
in time.  Each split factor is exactly unitary and the factorization
commutes with the clock/shift conjugations that implement discrete shifts
of b and phi0, so those identities hold to roundoff, not just to the
O(dtau^2) step error.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import dft_matrix, eig_hermitian

TWO_PI = 2.0 * math.pi

PARAM_NAMES = ("a", "b", "epsilon", "mu", "mu_prime", "phi0", "tau0")


@dataclass(frozen=True)
class HarperParams:
    """Control parameters of one Hamiltonian; N is the Hilbert dimension."""
    N: int
    a: float = 0.0
    b: float = 0.0
    epsilon: float = 0.0
    mu: float = 0.0
    mu_prime: float = 0.0
    phi0: float = 0.0
    tau0: float = 0.0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"invalid dimension N={self.N}; need N >= 2")
        for name in PARAM_NAMES:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"parameter {name} must be finite")

    def with_values(self, **kwargs):
        return replace(self, **kwargs)


@dataclass(frozen=True)
class DriftRates:
    """Constant time derivatives of the control parameters (per unit tau)."""
    a: float = 0.0
    b: float = 0.0
    epsilon: float = 0.0
    mu: float = 0.0
    mu_prime: float = 0.0
    phi0: float = 0.0
    tau0: float = 0.0


@dataclass(frozen=True)
class DriftSchedule:
    """Linearly drifting parameters over ``n_periods`` drive periods."""
    initial: HarperParams
    rates: DriftRates = field(default_factory=DriftRates)
    n_periods: int = 1

    def __post_init__(self):
        if self.n_periods < 1:
            raise ValueError("n_periods must be >= 1")

    def params_at(self, tau):
        """Parameters at time tau: initial + rate * tau, per parameter."""
        values = {name: getattr(self.initial, name) + getattr(self.rates, name) * tau
                  for name in PARAM_NAMES}
        return HarperParams(N=self.initial.N, **values)

    @property
    def N(self):
        return self.initial.N


@dataclass(frozen=True)
class Basis:
    """Orthonormal basis given by the columns of ``vectors``."""
    vectors: np.ndarray
    label: str = "custom"


def hbar_eff(N):
    """Effective Planck constant 2 pi / N of the torus quantization."""
    return TWO_PI / N


def angle_grid(N):
    """Angle (and momentum) eigenvalue grid theta_j = 2 pi j / N."""
    return TWO_PI * np.arange(N) / N


def kinetic_diagonal(p):
    """Momentum-basis diagonal of the kinetic term a (1 - cos(p - b))."""
    return p.a * (1.0 - np.cos(angle_grid(p.N) - p.b))


def h1_diagonal(p, tau):
    """Angle-basis diagonal of the two-component drive at time tau."""
    x = angle_grid(p.N) - p.phi0
    s = tau - p.tau0
    return -p.mu * np.cos(x + s) - p.mu_prime * np.cos(x - s)


def potential_diagonal(p, tau):
    """Angle-basis diagonal of the static potential plus the drive."""
    x = angle_grid(p.N) - p.phi0
    return -p.epsilon * np.cos(x) + h1_diagonal(p, tau)


def build_h0(p):
    """Time-independent Hamiltonian a (1 - cos(p_op - b)) - eps cos(phi_op - phi0),
    as a dense matrix in the angle basis."""
    Q = dft_matrix(p.N)
    kin = Q @ (kinetic_diagonal(p)[:, None] * Q.conj().T)
    return kin + np.diag(-p.epsilon * np.cos(angle_grid(p.N) - p.phi0))


def build_h1(p, tau):
    """Drive term at time tau as a dense (diagonal) matrix in the angle basis."""
    return np.diag(h1_diagonal(p, tau)).astype(complex)


def h0_eigenbasis(p):
    """Orthonormal eigenvectors of the static Hamiltonian, columns ordered by
    ascending eigenvalue."""
    _, V = eig_hermitian(build_h0(p))
    return Basis(vectors=V, label="h0-eigen")


def angle_basis(N):
    """The computational (angle-ket) basis."""
    return Basis(vectors=np.eye(N, dtype=complex), label="angle")


def _apply_fourier_diag(U, phases):
    # multiply by a Fourier-basis diagonal: Q diag(phases) Q^dag acting on columns
    return np.fft.ifft(phases[:, None] * np.fft.fft(U, axis=0), axis=0)


def _split_step_propagator(params_of_tau, N, n_steps, dtau, kinetic_static):
    inv_hbar = N / TWO_PI
    U = np.eye(N, dtype=complex)
    if kinetic_static:
        kin = kinetic_diagonal(params_of_tau(0.0))
        half = np.exp(-0.5j * inv_hbar * dtau * kin)
        full = half * half
        U = _apply_fourier_diag(U, half)
        for k in range(n_steps):
            tau_mid = (k + 0.5) * dtau
            v = potential_diagonal(params_of_tau(tau_mid), tau_mid)
            U = np.exp(-1j * inv_hbar * dtau * v)[:, None] * U
            U = _apply_fourier_diag(U, full if k + 1 < n_steps else half)
    else:
        for k in range(n_steps):
            tau_mid = (k + 0.5) * dtau
            pm = params_of_tau(tau_mid)
            half = np.exp(-0.5j * inv_hbar * dtau * kinetic_diagonal(pm))
            U = _apply_fourier_diag(U, half)
            U = np.exp(-1j * inv_hbar * dtau * potential_diagonal(pm, tau_mid))[:, None] * U
            U = _apply_fourier_diag(U, half)
    return U


def default_n_tau(N):
    """Default Trotterization step count per drive period."""
    return 4 * N


def floquet_propagator(p, n_tau=None):
    """One-period propagator of the periodically driven system.

    ``n_tau`` split steps cover tau in [0, 2 pi]; defaults to 4 N.
    """
    if n_tau is None:
        n_tau = default_n_tau(p.N)
    if n_tau < 1:
        raise ValueError(f"invalid n_tau={n_tau}; need n_tau >= 1")
    dtau = TWO_PI / n_tau
    return _split_step_propagator(lambda tau: p, p.N, n_tau, dtau, kinetic_static=True)


def drift_propagator(schedule, n_tau_per_period=None):
    """Propagator of the drifting system over ``n_periods`` drive periods.

    Every drifting parameter is evaluated at each step's midpoint time as
    initial + rate * tau, which keeps the scheme second order for slowly
    varying coefficients.
    """
    N = schedule.N
    if n_tau_per_period is None:
        n_tau_per_period = default_n_tau(N)
    if n_tau_per_period < 1:
        raise ValueError(f"invalid n_tau_per_period={n_tau_per_period}")
    n_steps = n_tau_per_period * schedule.n_periods
    dtau = TWO_PI / n_tau_per_period
    kinetic_static = schedule.rates.a == 0.0 and schedule.rates.b == 0.0
    return _split_step_propagator(schedule.params_at, N, n_steps, dtau, kinetic_static)


def ergodic_reference_params(N):
    """Strongly driven system whose classical limit is ergodic over the
    whole torus (perturbation frequency just below the libration frequency)."""
    return HarperParams(N=N, a=3.0, b=0.2, epsilon=3.1, mu=3.0, mu_prime=3.1)


def hybrid_reference_params(N):
    """Weakly driven system whose classical phase space mixes chaotic and
    integrable regions."""
    return HarperParams(N=N, a=3.0, b=0.0, epsilon=3.1, mu=1.0, mu_prime=0.0)


def drifting_reference_schedule(N):
    """Drifting system: b ramps 0 -> 1.9, mu 1 -> 7, mu' 0.5 -> 6.5 over
    three drive periods (constant rates)."""
    total = 3 * TWO_PI
    return DriftSchedule(
        initial=HarperParams(N=N, a=3.0, b=0.0, epsilon=3.0, mu=1.0, mu_prime=0.5),
        rates=DriftRates(b=1.9 / total, mu=6.0 / total, mu_prime=6.0 / total),
        n_periods=3,
    )
