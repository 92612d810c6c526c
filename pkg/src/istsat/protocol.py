"""Algorithm runs: TAQC baseline, single-shot IST-SAT, window averaging and the
iterative phase-pattern feedback loop."""
from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bits import BitLike, as_bits, bits_to_index, bits_to_str, index_to_bits, popcount
from .engine import ScheduleParams, probabilities, sample_indices, trotter_evolve
from .instance import Instance, SolutionSet, diagonal_energies, energy

SELECT_RULES = ("min-energy", "random", "bitwise-majority")


def stream(seed: int, *keys) -> np.random.Generator:
    """Independent RNG stream keyed by ``(seed, *keys)``; strings are hashed with crc32."""
    words = [int(seed)]
    for k in keys:
        words.append(zlib.crc32(k.encode()) if isinstance(k, str) else int(k))
    return np.random.default_rng(words)


@dataclass
class RunConfig:
    preset: str = "default"
    shots: int = 1000
    seed: int = 0
    analysis_mode: str = "exact"  # "exact" or "sampled"
    window_points: int = 8
    alpha_s: float = 0.6
    ac_enabled: bool = True
    params: ScheduleParams | None = None  # overrides everything above except shots/seed/mode

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.analysis_mode not in ("exact", "sampled"):
            raise ValueError("analysis_mode must be 'exact' or 'sampled'")

    def schedule(self, n: int) -> ScheduleParams:
        if self.params is not None:
            if self.params.n != n:
                raise ValueError(f"schedule built for n={self.params.n}, instance has n={n}")
            return self.params
        return ScheduleParams.for_n(
            n, self.preset, alpha_s=self.alpha_s, window_points=self.window_points, ac_enabled=self.ac_enabled
        )


@dataclass
class WindowAverageResult:
    times: np.ndarray  # realized total times T_k
    probs: np.ndarray  # (K, 2**n) exact final distributions
    samples: list[np.ndarray] | None = None  # per-point shot indices (sampled mode)

    @property
    def mean_probs(self) -> np.ndarray:
        return self.probs.mean(axis=0)

    @property
    def distribution(self) -> np.ndarray:
        """Exact window average, or the empirical shot histogram in sampled mode."""
        if self.samples is None:
            return self.mean_probs
        pooled = np.concatenate(self.samples)
        return np.bincount(pooled, minlength=self.probs.shape[1]) / pooled.size

    @property
    def shots(self) -> np.ndarray:
        return np.concatenate(self.samples) if self.samples is not None else np.empty(0, np.int64)


def pattern_from_string(x: BitLike) -> np.ndarray:
    """Phase offsets: bit 1 means phi = pi."""
    return as_bits(x).copy()


def corrupt_pattern(g: BitLike, r: float, seed) -> np.ndarray:
    """Planted pattern with exactly round(r*n) distinct positions flipped."""
    if not 0 <= r <= 0.5:
        raise ValueError("r must lie in [0, 1/2]")
    p = pattern_from_string(g)
    k = int(round(r * p.size))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p[rng.choice(p.size, size=k, replace=False)] ^= 1
    return p


def _split_shots(m: int, k: int) -> list[int]:
    base, extra = divmod(m, k)
    return [base + (i < extra) for i in range(k)]


def run_windowed(
    instance: Instance,
    pattern: BitLike | None,
    config: RunConfig,
    energies: np.ndarray | None = None,
    iteration: int = 0,
) -> WindowAverageResult:
    """Run complete schedules at K evenly spaced total times across the window.

    ``pattern=None`` is TAQC.  In sampled mode ``config.shots`` shots are
    split evenly over the window points, each point drawing from its own
    RNG stream keyed by (seed, instance_id, iteration, point).
    """
    params = config.schedule(instance.n)
    if energies is None:
        energies = diagonal_energies(instance)
    if pattern is not None and as_bits(pattern).size != instance.n:
        raise ValueError("pattern length must equal n")
    times = params.window_times()
    probs = np.empty((times.size, energies.size))
    for k, t in enumerate(times):
        probs[k] = probabilities(trotter_evolve(instance, pattern, params, float(t), energies=energies))
    samples = None
    if config.analysis_mode == "sampled":
        samples = [
            sample_indices(probs[k], mk, stream(config.seed, instance.instance_id, iteration, k))
            for k, mk in enumerate(_split_shots(config.shots, times.size))
            if mk > 0
        ]
    return WindowAverageResult(times, probs, samples)


def min_distances(n: int, targets: np.ndarray) -> np.ndarray:
    """Hamming distance from every basis state to the nearest target index."""
    z = np.arange(1 << n, dtype=np.uint64)
    targets = np.asarray(targets, dtype=np.uint64)
    if targets.size == 0:
        raise ValueError("empty target set")
    out = popcount(z ^ targets[0])
    for t in targets[1:]:
        np.minimum(out, popcount(z ^ t), out=out)
    return out


def threshold_count(d: float, n: int, halve: bool = False) -> int:
    x = Fraction(d).limit_denominator(1000) * n
    return int(round(x / 2 if halve else x))


@dataclass
class HammingProfile:
    thresholds: list[float]
    p_rn: list[float]  # P(D_H <= round(d n))
    p_rn2: list[float]  # P(D_H <= round(d n / 2))

    def rows(self):
        for d, a, b in zip(self.thresholds, self.p_rn, self.p_rn2):
            yield d, "rN", a
            yield d, "rN/2", b


def _target_indices(targets) -> np.ndarray:
    if isinstance(targets, SolutionSet):
        return targets.indices
    if isinstance(targets, str) or (isinstance(targets, np.ndarray) and targets.ndim == 1):
        targets = [targets]
    idx = [bits_to_index(t) for t in targets]
    if not idx:
        raise ValueError("empty target set")
    return np.array(idx, dtype=np.int64)


def hamming_profile(dist: np.ndarray, targets, thresholds: Sequence[float], distances: np.ndarray | None = None
                    ) -> HammingProfile:
    """Cumulative probability of landing within d*n (and d*n/2) flips of the nearest target.

    ``targets`` is a SolutionSet, one bitstring, or a list of bitstrings.
    Pass precomputed ``distances`` to reuse them across calls.
    """
    dist = np.asarray(dist, dtype=float)
    n = dist.size.bit_length() - 1
    if any(not 0 <= d <= 0.5 for d in thresholds):
        raise ValueError("thresholds must lie in [0, 1/2]")
    if distances is None:
        distances = min_distances(n, _target_indices(targets))
    cum = np.cumsum(np.bincount(distances, weights=dist, minlength=n + 1))
    p_rn = [float(cum[threshold_count(d, n)]) for d in thresholds]
    p_rn2 = [float(cum[threshold_count(d, n, halve=True)]) for d in thresholds]
    return HammingProfile(list(thresholds), p_rn, p_rn2)


def mean_energy(dist: np.ndarray, energies: np.ndarray) -> float:
    dist = np.asarray(dist, dtype=float)
    if dist.shape != np.shape(energies):
        raise ValueError("distribution and energies differ in length")
    return float(np.dot(dist, energies))


@dataclass
class IterationRecord:
    iteration: int
    pattern: str
    selected: str
    selected_energy: int
    best_energy: int
    dist_planted: int
    dist_nearest: int | None
    success: bool
    provisional: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class IterationTrace:
    instance_id: str
    select: str
    records: list[IterationRecord] = field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return any(r.success for r in self.records)

    @property
    def exhausted(self) -> bool:
        return not self.succeeded

    def to_json(self) -> str:
        return json.dumps(
            {
                "instance_id": self.instance_id,
                "select": self.select,
                "succeeded": self.succeeded,
                "iterations": [r.as_dict() for r in self.records],
            },
            separators=(",", ":"),
        )


def select_seed_string(shots: np.ndarray, energies: np.ndarray, n: int, rule: str, rng: np.random.Generator) -> int:
    """Pick the next seed string (as a basis index) from pooled shot indices."""
    if rule == "min-energy":
        e = energies[shots]
        ties = shots[e == e.min()]
        return int(ties[rng.integers(ties.size)])
    if rule == "random":
        return int(shots[rng.integers(shots.size)])
    if rule == "bitwise-majority":
        ones = ((shots[:, None] >> np.arange(n)) & 1).sum(axis=0)
        twice = 2 * ones
        bits = (twice > shots.size).astype(np.int64)
        tied = twice == shots.size
        bits[tied] = rng.integers(0, 2, size=int(tied.sum()))
        return int(np.sum(bits << np.arange(n)))
    raise ValueError(f"unknown selection rule {rule!r}; choose from {SELECT_RULES}")


def istsat_iterate(
    instance: Instance,
    p0: BitLike,
    config: RunConfig,
    max_iters: int,
    select: str = "min-energy",
    solutions: SolutionSet | None = None,
    energies: np.ndarray | None = None,
) -> IterationTrace:
    """Iterate: run the windowed schedule with pattern P_i, sample shots, pick a
    seed string, set P_{i+1} from it.  Stops early once a shot reaches the
    ground energy (the planted energy when no SolutionSet is given, flagged
    provisional)."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if select not in SELECT_RULES:
        raise ValueError(f"unknown selection rule {select!r}")
    n = instance.n
    if energies is None:
        energies = diagonal_energies(instance)
    planted_idx = int(np.sum(instance.planted.astype(np.int64) << np.arange(n)))
    if solutions is not None:
        target_e, provisional = solutions.ground_energy, False
    else:
        target_e, provisional = energy(instance, instance.planted), True
    sampled = RunConfig(**{**config.__dict__, "analysis_mode": "sampled"})
    pattern = pattern_from_string(p0)
    trace = IterationTrace(instance.instance_id, select)
    for it in range(max_iters):
        res = run_windowed(instance, pattern, sampled, energies=energies, iteration=it)
        shots = res.shots
        chosen = select_seed_string(shots, energies, n, select, stream(config.seed, instance.instance_id, it, "select"))
        best = int(energies[shots].min())
        nearest = None
        if solutions is not None:
            nearest = int(popcount(np.uint64(chosen) ^ solutions.indices.astype(np.uint64)).min())
        success = best <= target_e
        trace.records.append(
            IterationRecord(
                iteration=it,
                pattern=bits_to_str(pattern),
                selected=bits_to_str(index_to_bits(chosen, n)),
                selected_energy=int(energies[chosen]),
                best_energy=best,
                dist_planted=int(popcount(np.uint64(chosen ^ planted_idx))),
                dist_nearest=nearest,
                success=bool(success),
                provisional=provisional,
            )
        )
        if success:
            break
        pattern = pattern_from_string(index_to_bits(chosen, n))
    return trace
