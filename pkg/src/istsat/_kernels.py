"""Numba kernels for the fused Trotter loop.

Each step is one diagonal-phase sweep followed by one 2x2 unitary per qubit.
Qubits are processed two at a time so each amplitude is touched n/2 times per
step instead of n.
"""
import numba
import numpy as np


@numba.njit(cache=True, fastmath=True)
def _diag(psi, eidx, table):
    for z in range(psi.shape[0]):
        psi[z] *= table[eidx[z]]


@numba.njit(cache=True, fastmath=True)
def _single(psi, u, q):
    bit = 1 << q
    low = bit - 1
    u00 = u[0, 0]
    u01 = u[0, 1]
    u10 = u[1, 0]
    u11 = u[1, 1]
    for p in range(psi.shape[0] >> 1):
        k = ((p & ~low) << 1) | (p & low)
        l = k | bit
        a = psi[k]
        b = psi[l]
        psi[k] = u00 * a + u01 * b
        psi[l] = u10 * a + u11 * b


@numba.njit(cache=True, fastmath=True)
def _pair(psi, u, v, qa, qb):
    # u on qubit qa, v on qubit qb, qa < qb
    ba = 1 << qa
    bb = 1 << qb
    la = ba - 1
    lb = (bb >> 1) - 1
    u00 = u[0, 0]
    u01 = u[0, 1]
    u10 = u[1, 0]
    u11 = u[1, 1]
    v00 = v[0, 0]
    v01 = v[0, 1]
    v10 = v[1, 0]
    v11 = v[1, 1]
    for p in range(psi.shape[0] >> 2):
        k = ((p & ~la) << 1) | (p & la)
        k = ((k & ~lb) << 1) | (k & lb)
        k1 = k | ba
        k2 = k | bb
        k3 = k1 | bb
        a0 = psi[k]
        a1 = psi[k1]
        a2 = psi[k2]
        a3 = psi[k3]
        b0 = u00 * a0 + u01 * a1
        b1 = u10 * a0 + u11 * a1
        b2 = u00 * a2 + u01 * a3
        b3 = u10 * a2 + u11 * a3
        psi[k] = v00 * b0 + v01 * b2
        psi[k2] = v10 * b0 + v11 * b2
        psi[k1] = v00 * b1 + v01 * b3
        psi[k3] = v10 * b1 + v11 * b3


@numba.njit(cache=True)
def evolve_inplace(psi, eidx, tables, unitaries):
    """tables: (steps, n_levels) phase lookup; unitaries: (steps, n, 2, 2)."""
    n = unitaries.shape[1]
    for s in range(tables.shape[0]):
        _diag(psi, eidx, tables[s])
        us = unitaries[s]
        q = 0
        while q + 1 < n:
            _pair(psi, us[q], us[q + 1], q, q + 1)
            q += 2
        if q < n:
            _single(psi, us[q], q)


def warmup():
    psi = np.full(4, 0.5, dtype=np.complex128)
    evolve_inplace(psi, np.zeros(4, dtype=np.int32), np.ones((1, 1), np.complex128),
                   np.tile(np.eye(2, dtype=np.complex128), (1, 2, 1, 1)))
