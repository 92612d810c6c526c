"""Dense-matrix reference implementations used only by the tests.

Everything here is written from the Hamiltonian definition with no code
shared with the package kernels.
"""
import numpy as np
from scipy.linalg import expm

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
I2 = np.eye(2)


def single(op, q, n):
    # bit q of the index is qubit q, so qubit 0 is the rightmost kron factor
    out = np.array([[1.0 + 0j]])
    for k in reversed(range(n)):
        out = np.kron(out, op if k == q else I2)
    return out


def problem_diagonal(n, triples, signs):
    e = np.zeros(1 << n)
    for z in range(1 << n):
        s = [1 - 2 * ((z >> j) & 1) for j in range(n)]
        e[z] = -sum(v * s[i] * s[j] * s[k] for (i, j, k), v in zip(triples, signs))
    return e


def hamiltonian(t, T, n, energies, pattern, alpha, omega, ops=None):
    xs, ys = ops or ([single(X, q, n) for q in range(n)], [single(Y, q, n) for q in range(n)])
    f = np.sqrt(1 - t / T)
    g = np.sqrt(t / T)
    h = 4 * np.sqrt((1 - t / T) * (t / T))
    H = g * np.diag(energies).astype(complex) - f * sum(xs)
    if pattern is not None:
        for q in range(n):
            H += h * alpha * np.sin(omega * t + np.pi * pattern[q]) * ys[q]
    return H


def dense_evolve(n, energies, pattern, alpha, omega, T, steps):
    """Time-ordered midpoint product of full-Hamiltonian exponentials."""
    psi = np.full(1 << n, 2 ** (-n / 2), dtype=complex)
    dt = T / steps
    ops = ([single(X, q, n) for q in range(n)], [single(Y, q, n) for q in range(n)])
    for m in range(steps):
        psi = expm(-1j * dt * hamiltonian((m + 0.5) * dt, T, n, energies, pattern, alpha, omega, ops)) @ psi
    return psi


def brute_ground(n, triples, signs):
    e = problem_diagonal(n, triples, signs)
    return int(e.min()), sorted(int(z) for z in np.flatnonzero(e == e.min()))
