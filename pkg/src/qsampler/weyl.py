"""Clock/shift and displacement operators, operator-basis decomposition, and
exact frame potentials of displacement-conjugated twirl sets.

Conventions: omega = exp(2i pi / N), Z = diag(omega^j), X |j> = |j+1 mod N>,
and D(j, k) = omega^(-jk/2) Z^j X^k with the principal half root
omega^(1/2) = exp(i pi / N).  For even N this makes D a projective
(order-2N) representation; only |tr| and conjugations enter downstream, so
the ambiguity is harmless.  The N^2 operators D(j, k) / sqrt(N) are
orthonormal under the trace inner product.
"""

import math
from dataclasses import replace

import numpy as np
from numpy.linalg import matrix_power

from .harper import TWO_PI, floquet_propagator


def _check_dim(N):
    if N < 2:
        raise ValueError(f"invalid dimension N={N}; need N >= 2")


def clock(N):
    """Z = diag(omega^j)."""
    _check_dim(N)
    return np.diag(np.exp(2j * np.pi * np.arange(N) / N))


def shift(N):
    """X with X|j> = |j+1 mod N>."""
    _check_dim(N)
    return np.roll(np.eye(N, dtype=complex), 1, axis=0)


def displacement(N, j, k):
    """D(j, k) = omega^(-jk/2) Z^j X^k."""
    _check_dim(N)
    j, k = j % N, k % N
    phase = np.exp(-1j * np.pi * j * k / N)
    zdiag = np.exp(2j * np.pi * j * np.arange(N) / N)
    return phase * (zdiag[:, None] * np.roll(np.eye(N, dtype=complex), k, axis=0))


def op_decompose(W):
    """Coefficients w[j, k] = tr(D(j, k)^dag W) / sqrt(N) of the expansion
    W = sum_jk w[j, k] D(j, k) / sqrt(N).

    tr(D^dag_jk W) reduces to a DFT of the k-th cyclic diagonal of W, so the
    full table costs O(N^2 log N).
    """
    W = np.asarray(W, dtype=complex)
    N = W.shape[0]
    if W.shape != (N, N):
        raise ValueError("operator must be square")
    n = np.arange(N)
    rows = (n[None, :] + n[:, None]) % N           # rows[k, n] = n + k mod N
    diags = W[rows, n[None, :]]                    # diags[k, n] = W[n+k, n]
    F = np.fft.fft(diags, axis=1)                  # F[k, j] = sum_n diags e^(-2i pi jn/N)
    half_phase = np.exp(-1j * np.pi * np.outer(n, n) / N)   # omega^(-jk/2)
    return (half_phase * F.T) / math.sqrt(N)


def op_reconstruct(w):
    """Inverse of op_decompose: rebuild W from its coefficient table."""
    w = np.asarray(w, dtype=complex)
    N = w.shape[0]
    n = np.arange(N)
    half_phase = np.exp(1j * np.pi * np.outer(n, n) / N)
    cols = np.fft.ifft(half_phase * w, axis=0) * math.sqrt(N)   # cols[n, k] = W[n+k, n]
    W = np.empty((N, N), dtype=complex)
    rows = (n[None, :] + n[:, None]) % N
    W[rows, n[None, :]] = cols.T
    return W


def verify_shift_conjugation(p, j, k, n_tau=None):
    """Max-entry defect of
    U(b + 2 pi j/N, phi0 + 2 pi k/N) - Z^j X^k U(b, phi0) X^-k Z^-j.

    The identity holds factor-by-factor in the split-step product, so only
    roundoff remains.
    """
    N = p.N
    U0 = floquet_propagator(p, n_tau)
    shifted = replace(p, b=p.b + TWO_PI * j / N, phi0=p.phi0 + TWO_PI * k / N)
    U1 = floquet_propagator(shifted, n_tau)
    C = matrix_power(clock(N), j % N) @ matrix_power(shift(N), k % N)
    return float(np.abs(U1 - C @ U0 @ C.conj().T).max())


def twirl_frame_potential(W, k):
    """Exact k-frame potential of the uniform distribution on the twirl set
    { D W D^dag : D displacement }.

    Equals the mean over all index offsets (a, b) of
    |sum_jn p[j, n] omega^(a n - b j)|^(2k) with p = |w|^2, i.e. a power sum
    of the 2D DFT of the coefficient magnitudes.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    w = op_decompose(W)
    N = w.shape[0]
    g = np.fft.fft2(np.abs(w) ** 2)      # index bijection: sum runs over all cells
    return float(np.sum(np.abs(g) ** (2 * k)) / N**2)


def twirl_frame_potential_bruteforce(W, k, force=False):
    """Oracle for twirl_frame_potential: average |tr(U V^dag)|^(2k) over all
    N^4 ordered pairs of displacement conjugates.  O(N^7); refuses N > 8
    unless forced."""
    W = np.asarray(W, dtype=complex)
    N = W.shape[0]
    if N > 8 and not force:
        raise ValueError("brute-force twirl enumeration is limited to N <= 8")
    conjs = []
    for m in range(N):
        for n in range(N):
            D = displacement(N, m, n)
            conjs.append(D @ W @ D.conj().T)
    total = 0.0
    for U in conjs:
        for V in conjs:
            z = abs(np.vdot(V, U)) ** 2      # |tr(U V^dag)|^2
            total += z**k
    return total / len(conjs) ** 2
