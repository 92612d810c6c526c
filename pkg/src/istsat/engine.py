"""Exact state-vector evolution under

    H(t) = f(t) H_D + g(t) H_P + h(t) H_ST(t)

with H_D = -sum X_j, H_P diagonal (the instance energy), and
H_ST(t) = alpha * sum_j Y_j sin(omega t + phi_j), phi_j in {0, pi}.

States are plain complex128 arrays of length 2**n; variable j is bit j of the
index.  Public kernels return new arrays; ``trotter_evolve`` runs the fused
in-place numba loop.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import _kernels
from .bits import BitLike, as_bits, indices_to_bits
from .errors import CapExceeded
from .instance import Instance, diagonal_energies

MAX_QUBITS = 26
PRESETS = {
    # omega as a multiple of ln(n)
    "default": 2 * math.pi * 6,
    "lowfreq": 10 * math.pi,
}


@dataclass(frozen=True)
class ScheduleParams:
    """Every constant of one time evolution.

    ``t_f`` is the mean evolution time; each realized schedule of total time
    ``T`` stretches f, g, h over [0, T].  ``alpha = alpha_s * ln(n)``.
    """

    n: int
    t_f: float
    omega: float
    alpha_s: float = 0.6
    dt: float | None = None
    window: tuple[float, float] = (2 / 3, 4 / 3)
    window_points: int = 8
    ac_enabled: bool = True

    def __post_init__(self):
        if self.dt is None:
            object.__setattr__(self, "dt", 0.4 / self.omega)
        if self.t_f <= 0:
            raise ValueError("t_f must be positive")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.window_points < 1:
            raise ValueError("window_points must be >= 1")
        if not self.dt < math.pi / self.omega:
            raise ValueError("dt must be below pi/omega")

    @classmethod
    def for_n(cls, n: int, preset: str = "default", **overrides) -> "ScheduleParams":
        if n < 2:
            raise ValueError("schedule needs n >= 2 (omega and alpha scale with ln n)")
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        kw = dict(n=n, t_f=n / 32, omega=PRESETS[preset] * math.log(n))
        kw.update(overrides)
        return cls(**kw)

    @property
    def alpha(self) -> float:
        return self.alpha_s * math.log(self.n)

    def with_(self, **kw) -> "ScheduleParams":
        if "omega" in kw and "dt" not in kw:
            kw["dt"] = 0.4 / kw["omega"]
        return replace(self, **kw)

    def window_times(self) -> np.ndarray:
        lo, hi = self.window
        if self.window_points == 1:
            return np.array([0.5 * (lo + hi) * self.t_f])
        return np.linspace(lo * self.t_f, hi * self.t_f, self.window_points)


def interp_f(t, total):
    return np.sqrt(np.clip(1.0 - t / total, 0.0, 1.0))


def interp_g(t, total):
    return np.sqrt(np.clip(t / total, 0.0, 1.0))


def envelope_h(t, total):
    s = np.clip(t / total, 0.0, 1.0)
    return 4.0 * np.sqrt((1.0 - s) * s)


def step_grid(total_time: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Midpoints and widths of the Trotter steps; the last step is shortened so widths sum to ``total_time``."""
    if total_time <= 0:
        raise ValueError("total_time must be positive")
    steps = max(1, math.ceil(total_time / dt - 1e-9))
    starts = np.arange(steps) * dt
    widths = np.full(steps, dt)
    widths[-1] = total_time - starts[-1]
    return starts + widths / 2, widths


def _check_cap(n: int, cap: int = MAX_QUBITS):
    if n > cap:
        raise CapExceeded(f"n = {n} exceeds the state-vector cap of {cap}")


def _nqubits(state: np.ndarray) -> int:
    n = int(state.size).bit_length() - 1
    if state.ndim != 1 or (1 << n) != state.size:
        raise ValueError("state length must be a power of two")
    return n


def init_plus_state(n: int, cap: int = MAX_QUBITS) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    _check_cap(n, cap)
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)


def apply_diagonal_phase(state: np.ndarray, energies: Sequence[int], theta: float) -> np.ndarray:
    """amplitude[z] *= exp(-i theta energies[z])."""
    energies = np.asarray(energies)
    if energies.shape != state.shape:
        raise ValueError(f"energies length {energies.size} != state length {state.size}")
    return state * np.exp(-1j * theta * energies)


def _apply_1q(state: np.ndarray, u: np.ndarray, q: int) -> np.ndarray:
    v = state.reshape(-1, 2, 1 << q)
    a, b = v[:, 0, :], v[:, 1, :]
    out = np.empty_like(v)
    out[:, 0, :] = u[0, 0] * a + u[0, 1] * b
    out[:, 1, :] = u[1, 0] * a + u[1, 1] * b
    return out.reshape(-1)


def x_rotation(theta: float) -> np.ndarray:
    """exp(+i theta X); H_D = -sum X so a step of f*dt uses theta = f*dt."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=np.complex128)


def y_rotation(theta: float) -> np.ndarray:
    """exp(-i theta Y)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def apply_x_rotation_all(state: np.ndarray, theta: float) -> np.ndarray:
    n = _nqubits(state)
    u = x_rotation(theta)
    out = state.copy()
    for q in range(n):
        out = _apply_1q(out, u, q)
    return out


def apply_y_rotation_per_qubit(state: np.ndarray, thetas: Sequence[float]) -> np.ndarray:
    n = _nqubits(state)
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (n,):
        raise ValueError(f"need {n} angles, got {thetas.size}")
    out = state.copy()
    for q in range(n):
        out = _apply_1q(out, y_rotation(thetas[q]), q)
    return out


def _energy_table(energies: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e = np.asarray(energies)
    lo = int(e.min())
    levels = np.arange(lo, int(e.max()) + 1, dtype=np.float64)
    return (e - lo).astype(np.int32), levels


def build_step_operators(
    n: int, levels: np.ndarray, pattern: BitLike | None, params: ScheduleParams, total_time: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-step diagonal phase tables and per-qubit 2x2 unitaries (Y stage applied after X)."""
    if not params.dt < math.pi / params.omega:
        raise ValueError("dt must be below pi/omega")
    mids, widths = step_grid(total_time, params.dt)
    f = interp_f(mids, total_time)
    g = interp_g(mids, total_time)
    tables = np.exp(-1j * (g * widths)[:, None] * levels[None, :])

    cx, sx = np.cos(f * widths), np.sin(f * widths)
    if params.ac_enabled and pattern is not None and params.alpha_s != 0:
        offs = as_bits(pattern)
        if offs.size != n:
            raise ValueError(f"pattern length {offs.size} != n = {n}")
        h = envelope_h(mids, total_time)
        # sin(w t + pi) = -sin(w t)
        sign = 1.0 - 2.0 * offs
        theta = (h * params.alpha * np.sin(params.omega * mids) * widths)[:, None] * sign[None, :]
    else:
        theta = np.zeros((mids.size, n))
    cy, sy = np.cos(theta), np.sin(theta)
    cx, sx = cx[:, None], sx[:, None]
    u = np.empty((mids.size, n, 2, 2), dtype=np.complex128)
    # [[cy, -sy], [sy, cy]] @ [[cx, i sx], [i sx, cx]]
    u[:, :, 0, 0] = cy * cx - 1j * sy * sx
    u[:, :, 0, 1] = 1j * cy * sx - sy * cx
    u[:, :, 1, 0] = sy * cx + 1j * cy * sx
    u[:, :, 1, 1] = 1j * sy * sx + cy * cx
    return tables, u


def trotter_evolve(
    instance: Instance | None,
    pattern: BitLike | None,
    params: ScheduleParams,
    total_time: float,
    energies: np.ndarray | None = None,
) -> np.ndarray:
    """Evolve |+>^n under the full schedule of length ``total_time``.

    Step m applies exp(-i g H_P dt), then exp(+i f dt sum X), then
    exp(-i theta_j Y_j) with theta_j = h alpha sin(omega t + pi p_j) dt, all
    coefficients taken at the step midpoint.  ``pattern=None`` or
    ``params.ac_enabled=False`` gives the plain Trotterized anneal.
    """
    if total_time <= 0:
        raise ValueError("total_time must be positive")
    if energies is None:
        if instance is None:
            raise ValueError("need an instance or precomputed energies")
        energies = diagonal_energies(instance, max_n=MAX_QUBITS)
    n = len(energies).bit_length() - 1
    if (1 << n) != len(energies):
        raise ValueError("energies length must be a power of two")
    _check_cap(n)
    eidx, levels = _energy_table(energies)
    tables, u = build_step_operators(n, levels, pattern, params, total_time)
    psi = init_plus_state(n)
    _kernels.evolve_inplace(psi, eidx, tables, u)
    return psi


def probabilities(state: np.ndarray) -> np.ndarray:
    return state.real**2 + state.imag**2


def sample_indices(probs: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """m independent draws of basis-state indices from ``probs`` (inverse CDF)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    cdf = np.cumsum(probs)
    u = rng.random(m) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), probs.size - 1).astype(np.int64)


def sample_bitstrings(state: np.ndarray, m: int, seed) -> np.ndarray:
    """(m, n) uint8 array of z-basis measurement outcomes."""
    n = _nqubits(state)
    z = sample_indices(probabilities(state), m, np.random.default_rng(seed))
    return indices_to_bits(z, n)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) ** 2)


# Debug dump: 8-byte little-endian uint64 n, then 2**n (re, im) float64 pairs.
def write_dump(path, state: np.ndarray) -> None:
    n = _nqubits(state)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", n))
        fh.write(np.ascontiguousarray(state, dtype="<c16").tobytes())


def read_dump(path) -> np.ndarray:
    with open(path, "rb") as fh:
        (n,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != 1 << n:
        raise ValueError("truncated dump")
    return data.astype(np.complex128)
