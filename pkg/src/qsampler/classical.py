"""Classical limit of the driven Harper system: torus Hamiltonian flow,
symplectic integration, and stroboscopic Poincare sections.

The Hamiltonian is separable, H = T(p) + V(phi, tau) with
T = a (1 - cos(p - b)) and a phi-only, time-dependent potential, so a
kick-drift-kick splitting is exact in each factor: the drift advances phi
with p frozen, the kick advances p with phi frozen, and the drive is
evaluated at the kick times.
"""

import math
from dataclasses import dataclass

import numpy as np

from .harper import TWO_PI, HarperParams

DEFAULT_STEPS_PER_PERIOD = 1000


@dataclass(frozen=True)
class PoincareSection:
    """Stroboscopic orbit records: points[i, n] = (phi, p) of orbit i after
    n + 1 drive periods."""
    initials: np.ndarray          # (n_orbits, 2)
    points: np.ndarray            # (n_orbits, n_periods, 2), coordinates mod 2 pi
    params: HarperParams
    steps_per_period: int
    energy_deviation: float | None = None   # max |H0 - H0(0)|, tracked runs only

    @property
    def n_orbits(self):
        return self.initials.shape[0]

    @property
    def n_periods(self):
        return self.points.shape[1]


def classical_hamiltonian(phi, p, tau, params):
    """H(phi, p, tau) of the driven system (N is ignored)."""
    x = phi - params.phi0
    s = tau - params.tau0
    return (params.a * (1.0 - np.cos(p - params.b))
            - params.epsilon * np.cos(x)
            - params.mu * np.cos(x + s)
            - params.mu_prime * np.cos(x - s))


def classical_eom(phi, p, tau, params):
    """Hamiltonian flow (dphi/dtau, dp/dtau) = (dH/dp, -dH/dphi)."""
    x = phi - params.phi0
    s = tau - params.tau0
    dphi = params.a * np.sin(p - params.b)
    dp = -(params.epsilon * np.sin(x)
           + params.mu * np.sin(x + s)
           + params.mu_prime * np.sin(x - s))
    return dphi, dp


def _dv_dphi(phi, tau, params):
    x = phi - params.phi0
    s = tau - params.tau0
    return (params.epsilon * np.sin(x)
            + params.mu * np.sin(x + s)
            + params.mu_prime * np.sin(x - s))


def leapfrog_step(phi, p, tau, dt, params):
    """One kick-drift-kick step from tau to tau + dt (dt may be negative)."""
    p = p - 0.5 * dt * _dv_dphi(phi, tau, params)
    phi = phi + dt * params.a * np.sin(p - params.b)
    p = p - 0.5 * dt * _dv_dphi(phi, tau + dt, params)
    return phi % TWO_PI, p % TWO_PI


def libration_ratio(params):
    """(omega0, lambda): libration frequency sqrt(a epsilon) at the stable
    fixed point and the drive-to-libration frequency ratio 1/omega0."""
    ae = params.a * params.epsilon
    if ae <= 0:
        raise ValueError(f"a*epsilon must be positive, got {ae}")
    omega0 = math.sqrt(ae)
    return omega0, 1.0 / omega0


def poincare_section(initials, params, n_periods, steps_per_period=DEFAULT_STEPS_PER_PERIOD,
                     track_energy=False):
    """Integrate orbits and record (phi, p) mod 2 pi once per drive period.

    ``initials`` is a sequence of (phi, p) pairs.  ``steps_per_period`` must
    be at least 100 (accuracy guard).  With ``track_energy`` the maximum
    deviation of H0 = H(mu = mu' = 0) from its initial value is recorded at
    every step (meaningful for undriven runs).
    """
    if steps_per_period < 100:
        raise ValueError("steps_per_period must be >= 100")
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    initials = np.atleast_2d(np.asarray(initials, dtype=float))
    phi = initials[:, 0].copy() % TWO_PI
    p = initials[:, 1].copy() % TWO_PI

    h0_params = params.with_values(mu=0.0, mu_prime=0.0)
    e0 = classical_hamiltonian(phi, p, 0.0, h0_params)
    max_dev = 0.0

    dt = TWO_PI / steps_per_period
    points = np.empty((initials.shape[0], n_periods, 2))
    for n in range(n_periods):
        tau = n * TWO_PI
        for k in range(steps_per_period):
            phi, p = leapfrog_step(phi, p, tau + k * dt, dt, params)
            if track_energy:
                e = classical_hamiltonian(phi, p, 0.0, h0_params)
                max_dev = max(max_dev, float(np.abs(e - e0).max()))
        points[:, n, 0] = phi
        points[:, n, 1] = p
    return PoincareSection(
        initials=initials, points=points, params=params,
        steps_per_period=steps_per_period,
        energy_deviation=max_dev if track_energy else None)


def trajectory_occupancy(initial, params, n_periods, steps_per_period=100,
                         samples_per_period=4, bins=50):
    """Grid-coverage fraction of a single orbit sampled ``samples_per_period``
    times per drive period.  Stroboscopic (once-per-period) sampling of
    n_periods points caps the coverage of a bins^2 grid near
    1 - exp(-n_periods/bins^2) even for a perfectly ergodic orbit, so
    coverage proxies use a few samples per period instead."""
    if steps_per_period % samples_per_period:
        raise ValueError("samples_per_period must divide steps_per_period")
    stride = steps_per_period // samples_per_period
    phi = np.array([float(initial[0])])
    p = np.array([float(initial[1])])
    dt = TWO_PI / steps_per_period
    hist = np.zeros((bins, bins), dtype=bool)
    scale = bins / TWO_PI
    for n in range(n_periods):
        tau = n * TWO_PI
        for k in range(steps_per_period):
            phi, p = leapfrog_step(phi, p, tau + k * dt, dt, params)
            if (k + 1) % stride == 0:
                hist[int(phi[0] * scale) % bins, int(p[0] * scale) % bins] = True
    return float(hist.sum()) / bins**2


def occupancy_fraction(phi, p, bins=50):
    """Fraction of cells of a bins x bins grid over [0, 2 pi)^2 visited by
    the given points.  Coverage proxy for ergodicity of an orbit."""
    hist, _, _ = np.histogram2d(np.asarray(phi) % TWO_PI, np.asarray(p) % TWO_PI,
                                bins=bins, range=[[0, TWO_PI], [0, TWO_PI]])
    return float(np.count_nonzero(hist)) / bins**2
