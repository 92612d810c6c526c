"""Semi-greedy classical (SGC) descent and its warm-started variant.

Rule: flip a uniformly chosen bit among those with the largest strict energy
decrease; with none, take a uniformly chosen zero-cost flip while fewer than
``plateau_cap`` consecutive plateau moves have been made; otherwise stop.
At most ``step_cap`` flips in total.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numba
import numpy as np

from .bits import BitLike, as_bits
from .instance import Instance, SolutionSet, energy
from .protocol import stream, threshold_count


@dataclass
class SgcConfig:
    trials: int = 100_000
    plateau_cap: int | None = None  # default 2n
    step_cap: int | None = None  # default 10n
    warm_r: float | None = None  # None: uniformly random starts
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for cap in (self.plateau_cap, self.step_cap):
            if cap is not None and cap < 1:
                raise ValueError("caps must be >= 1")
        if self.warm_r is not None and not 0 <= self.warm_r <= 0.5:
            raise ValueError("warm_r must lie in [0, 1/2]")

    def caps(self, n: int) -> tuple[int, int]:
        return (self.plateau_cap or 2 * n, self.step_cap or 10 * n)


def _incidence(instance: Instance) -> tuple[np.ndarray, np.ndarray]:
    """CSR list of constraints touching each variable."""
    t = instance.triples
    owners = np.repeat(np.arange(t.shape[0]), 3)
    order = np.argsort(t.reshape(-1), kind="stable")
    ptr = np.zeros(instance.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(t.reshape(-1), minlength=instance.n), out=ptr[1:])
    return ptr, owners[order].astype(np.int64)


@numba.njit(cache=True)
def _descend(triples, signs, ptr, cons, bits, plateau_cap, step_cap):
    n = bits.shape[0]
    m = triples.shape[0]
    c = np.empty(m, np.int64)
    for a in range(m):
        p = signs[a]
        for q in range(3):
            if bits[triples[a, q]]:
                p = -p
        c[a] = p
    delta = np.zeros(n, np.int64)
    for v in range(n):
        acc = 0
        for e in range(ptr[v], ptr[v + 1]):
            acc += c[cons[e]]
        delta[v] = 2 * acc
    cand = np.empty(n, np.int64)
    steps = 0
    plateau = 0
    while steps < step_cap:
        best = delta[0]
        for v in range(1, n):
            if delta[v] < best:
                best = delta[v]
        if best > 0 or (best == 0 and plateau >= plateau_cap):
            break
        k = 0
        for v in range(n):
            if delta[v] == best:
                cand[k] = v
                k += 1
        v = cand[np.random.randint(0, k)]
        if best < 0:
            plateau = 0
        else:
            plateau += 1
        for e in range(ptr[v], ptr[v + 1]):
            a = cons[e]
            old = c[a]
            c[a] = -old
            for q in range(3):
                u = triples[a, q]
                if u != v:
                    delta[u] -= 4 * old
        delta[v] = -delta[v]
        bits[v] ^= 1
        steps += 1
    return steps


@numba.njit(cache=True)
def _run_batch(triples, signs, ptr, cons, starts, seeds, plateau_cap, step_cap):
    finals = starts.copy()
    steps = np.empty(starts.shape[0], np.int64)
    for t in range(starts.shape[0]):
        np.random.seed(seeds[t])
        steps[t] = _descend(triples, signs, ptr, cons, finals[t], plateau_cap, step_cap)
    return finals, steps


def sgc_descent(instance: Instance, start: BitLike, config: SgcConfig | None = None) -> tuple[np.ndarray, int]:
    """One descent from ``start``; returns the final bitstring and the number of flips."""
    config = config or SgcConfig(trials=1)
    b = as_bits(start)
    if b.size != instance.n:
        raise ValueError(f"start has length {b.size}, expected {instance.n}")
    pc, sc = config.caps(instance.n)
    ptr, cons = _incidence(instance)
    seed = stream(config.seed, instance.instance_id, "descent").integers(2**31)
    finals, steps = _run_batch(instance.triples, instance.signs.astype(np.int64), ptr, cons,
                               b[None, :].copy(), np.array([seed], np.int64), pc, sc)
    return finals[0], int(steps[0])


def warm_start(instance: Instance, r: float, seed) -> np.ndarray:
    """Planted string with exactly round(r*n) uniformly chosen bits flipped."""
    if not 0 <= r <= 0.5:
        raise ValueError("r must lie in [0, 1/2]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x = instance.planted.copy()
    x[rng.choice(instance.n, size=int(round(r * instance.n)), replace=False)] ^= 1
    return x


def _starts(instance: Instance, count: int, warm_r: float | None, rng: np.random.Generator) -> np.ndarray:
    n = instance.n
    if warm_r is None:
        return rng.integers(0, 2, size=(count, n), dtype=np.uint8)
    k = int(round(warm_r * n))
    flips = np.argsort(rng.random((count, n)), axis=1)[:, :k]
    starts = np.tile(instance.planted, (count, 1))
    np.bitwise_xor.at(starts, (np.arange(count)[:, None], flips), 1)
    return starts


@dataclass
class SgcResult:
    instance_id: str
    n: int
    density: float
    trials: int
    successes: int  # final energy reached the ground (or planted) energy
    distances: np.ndarray  # Hamming distance of each final string to the planted string
    steps: np.ndarray

    @property
    def p_gs(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def p_within(self, d: float) -> float:
        """P(D_H <= round(d n)) relative to the planted string."""
        if not self.trials:
            return 0.0
        return float(np.mean(self.distances <= threshold_count(d, self.n)))


def sgc_trials(instance: Instance, trials: int, config: SgcConfig, target_energy: int | None = None) -> SgcResult:
    """``trials`` independent descents; trial t is determined by (seed, instance_id, t)."""
    n = instance.n
    if target_energy is None:
        target_energy = energy(instance, instance.planted)
    pc, sc = config.caps(n)
    if trials == 0:
        return SgcResult(instance.instance_id, n, instance.density, 0, 0, np.empty(0, np.int64), np.empty(0, np.int64))
    ptr, cons = _incidence(instance)
    # fixed per-trial consumption keeps trial t's randomness independent of the batch size
    starts = _starts(instance, trials, config.warm_r, stream(config.seed, instance.instance_id, "starts"))
    seeds = stream(config.seed, instance.instance_id, "ties").integers(2**31, size=trials)
    signs = instance.signs.astype(np.int64)
    finals, steps = _run_batch(instance.triples, signs, ptr, cons, starts, seeds.astype(np.int64), pc, sc)
    s = 1 - 2 * finals.astype(np.int64)
    t = instance.triples
    e = -(signs[None, :] * s[:, t[:, 0]] * s[:, t[:, 1]] * s[:, t[:, 2]]).sum(axis=1)
    dist = np.count_nonzero(finals != instance.planted[None, :], axis=1)
    return SgcResult(instance.instance_id, n, instance.density, trials, int(np.sum(e <= target_energy)), dist, steps)


def distribute_trials(total: int, k: int) -> list[int]:
    """Round-robin split: trial t runs on instance t mod k."""
    base, extra = divmod(total, k)
    return [base + (i < extra) for i in range(k)]


def sgc_success_curve(
    instances_by_n: Mapping[int, Sequence[Instance]],
    config: SgcConfig,
    thresholds: Iterable[float] = (1 / 8, 1 / 4, 3 / 10, 1 / 3),
    solutions: Mapping[str, SolutionSet] | None = None,
) -> dict[int, dict]:
    """Per-n pooled P_GS and the approximation profile ``P(D_H <= dN) + P_GS``.

    Ground truth is the brute-forced ground energy when ``solutions`` has the
    instance, else the planted energy.
    """
    thresholds = list(thresholds)
    out = {}
    for n, group in sorted(instances_by_n.items()):
        results = []
        for inst, count in zip(group, distribute_trials(config.trials, len(group))):
            target = None
            if solutions is not None and inst.instance_id in solutions:
                target = solutions[inst.instance_id].ground_energy
            results.append(sgc_trials(inst, count, config, target))
        total = sum(r.trials for r in results)
        p_gs = sum(r.successes for r in results) / total
        dist = np.concatenate([r.distances for r in results])
        out[n] = {
            "trials": total,
            "p_gs": p_gs,
            "profile": {d: float(np.mean(dist <= threshold_count(d, n))) + p_gs for d in thresholds},
            "results": results,
        }
    return out
