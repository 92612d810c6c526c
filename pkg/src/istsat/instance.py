"""Planted partial solution (PPSP) instances of MAX-3-XORSAT.

An instance is a set of ``N_C`` distinct 3-subsets of ``n`` variables with a
sign ``V = +-1`` per triple.  Its energy is ``-sum V s_i s_j s_k``.  A planted
string ``G`` satisfies all but ``round(epsilon * N_C)`` constraints by
construction.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .bits import BitLike, as_bits, bits_to_str, index_to_bits, popcount, spins
from .errors import CapExceeded

MAX_ENUM_N = 26
_CHUNK = 1 << 20


class Constraint(NamedTuple):
    i: int
    j: int
    k: int
    sign: int


@dataclass(frozen=True, eq=False)
class Instance:
    n: int
    triples: np.ndarray  # (N_C, 3) int64, each row strictly increasing
    signs: np.ndarray  # (N_C,) int8, +-1
    planted: np.ndarray  # (n,) uint8
    epsilon: float
    density: float
    seed: int | None = None
    instance_id: str = ""

    @property
    def n_constraints(self) -> int:
        return int(self.triples.shape[0])

    @property
    def constraints(self) -> list[Constraint]:
        return [Constraint(int(a), int(b), int(c), int(s)) for (a, b, c), s in zip(self.triples, self.signs)]

    @property
    def n_unsat(self) -> int:
        return n_unsat_for(self.n_constraints, self.epsilon)

    def to_json(self) -> str:
        rec = {
            "instance_id": self.instance_id,
            "n": self.n,
            "density": self.density,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "planted": bits_to_str(self.planted),
            "constraints": [[int(a), int(b), int(c), int(s)] for (a, b, c), s in zip(self.triples, self.signs)],
        }
        return json.dumps(rec, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "Instance":
        rec = json.loads(line)
        cons = np.asarray(rec["constraints"], dtype=np.int64).reshape(-1, 4)
        return make_instance(
            rec["n"],
            [tuple(c) for c in cons],
            rec["planted"],
            epsilon=rec.get("epsilon", 0.0),
            density=rec.get("density"),
            seed=rec.get("seed"),
            instance_id=rec.get("instance_id", ""),
        )


def n_unsat_for(n_constraints: int, epsilon: float) -> int:
    # Python's round() is round-half-to-even.
    return int(round(epsilon * n_constraints))


def make_instance(
    n: int,
    constraints: Iterable[Sequence[int]],
    planted: BitLike | None = None,
    *,
    epsilon: float = 0.0,
    density: float | None = None,
    seed: int | None = None,
    instance_id: str = "",
) -> Instance:
    """Build an instance from explicit ``(i, j, k, sign)`` rows (indices get sorted)."""
    rows = [tuple(int(v) for v in c) for c in constraints]
    triples = np.array([sorted(r[:3]) for r in rows], dtype=np.int64).reshape(-1, 3)
    signs = np.array([r[3] for r in rows], dtype=np.int8)
    if triples.size:
        if triples.min() < 0 or triples.max() >= n:
            raise ValueError("constraint index out of range")
        if np.any(triples[:, 0] == triples[:, 1]) or np.any(triples[:, 1] == triples[:, 2]):
            raise ValueError("constraint indices must be distinct")
        if len({tuple(t) for t in triples.tolist()}) != len(triples):
            raise ValueError("duplicate constraint triple")
    if not np.all(np.abs(signs) == 1):
        raise ValueError("constraint signs must be +1 or -1")
    g = np.zeros(n, dtype=np.uint8) if planted is None else as_bits(planted)
    if g.size != n:
        raise ValueError(f"planted string has length {g.size}, expected {n}")
    if density is None:
        density = len(rows) / n
    return Instance(n, triples, signs, g, float(epsilon), float(density), seed, instance_id)


def _unrank_triple(rank: int) -> tuple[int, int, int]:
    # colex: rank = C(c2,3) + C(c1,2) + C(c0,1)
    c2 = 2
    while math.comb(c2 + 1, 3) <= rank:
        c2 += 1
    rank -= math.comb(c2, 3)
    c1 = 1
    while math.comb(c1 + 1, 2) <= rank:
        c1 += 1
    rank -= math.comb(c1, 2)
    return rank, c1, c2


def default_instance_id(n: int, density: float, epsilon: float, seed: int) -> str:
    return f"n{n}-d{density:g}-e{epsilon:g}-s{seed}"


def generate_instance(
    n: int, density: float, epsilon: float, seed: int, instance_id: str | None = None
) -> Instance:
    """Draw a PPSP instance; a deterministic function of ``(n, density, epsilon, seed)``.

    The hypergraph (distinct triples, uniformly without replacement) is fixed
    first; then a uniformly chosen subset of ``round(epsilon * N_C)``
    constraints gets the sign the planted string violates.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    if density <= 0:
        raise ValueError("density must be positive")
    if not 0 <= epsilon < 0.5:
        raise ValueError("epsilon must lie in [0, 0.5)")
    n_c = int(round(density * n))
    total = math.comb(n, 3)
    if n_c > total:
        raise ValueError(f"density*n = {n_c} constraints exceeds C({n},3) = {total}")
    rng = np.random.default_rng(seed)
    planted = rng.integers(0, 2, size=n, dtype=np.uint8)
    ranks = np.sort(rng.choice(total, size=n_c, replace=False))
    triples = np.array([_unrank_triple(int(r)) for r in ranks], dtype=np.int64).reshape(-1, 3)
    s = spins(planted).astype(np.int8)
    signs = (s[triples[:, 0]] * s[triples[:, 1]] * s[triples[:, 2]]).astype(np.int8)
    unsat = rng.choice(n_c, size=n_unsat_for(n_c, epsilon), replace=False)
    signs[unsat] *= -1
    if instance_id is None:
        instance_id = default_instance_id(n, density, epsilon, seed)
    return Instance(n, triples, signs, planted, float(epsilon), float(density), int(seed), instance_id)


def energy(instance: Instance, x: BitLike) -> int:
    s = spins(x).astype(np.int64)
    if s.size != instance.n:
        raise ValueError(f"bitstring length {s.size} != n = {instance.n}")
    t = instance.triples
    return int(-np.sum(instance.signs * s[t[:, 0]] * s[t[:, 1]] * s[t[:, 2]]))


def unsatisfied_count(instance: Instance, x: BitLike) -> int:
    return (energy(instance, x) + instance.n_constraints) // 2


def diagonal_energies(instance: Instance, max_n: int = MAX_ENUM_N) -> np.ndarray:
    """Energy of every basis state, indexed by the little-endian bit convention."""
    n = instance.n
    if n > max_n:
        raise CapExceeded(f"n = {n} exceeds the enumeration cap of {max_n}")
    dim = 1 << n
    out = np.empty(dim, dtype=np.int32)
    t = instance.triples
    v = instance.signs.astype(np.int32)
    for start in range(0, dim, _CHUNK):
        z = np.arange(start, min(dim, start + _CHUNK), dtype=np.int64)
        acc = np.zeros(z.size, dtype=np.int32)
        for (a, b, c), sign in zip(t, v):
            par = ((z >> a) ^ (z >> b) ^ (z >> c)) & 1
            acc -= sign * (1 - 2 * par).astype(np.int32)
        out[start : start + z.size] = acc
    return out


@dataclass
class SolutionSet:
    ground_energy: int
    indices: np.ndarray  # basis-state indices of every ground state, ascending
    n: int
    instance_id: str = ""

    @property
    def count(self) -> int:
        return int(self.indices.size)

    @property
    def ground_states(self) -> list[np.ndarray]:
        return [index_to_bits(z, self.n) for z in self.indices]

    def to_json(self) -> str:
        rec = {
            "instance_id": self.instance_id,
            "ground_energy": self.ground_energy,
            "ground_states": [bits_to_str(b) for b in self.ground_states],
        }
        return json.dumps(rec, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "SolutionSet":
        rec = json.loads(line)
        states = [as_bits(s) for s in rec["ground_states"]]
        n = states[0].size if states else 0
        idx = np.array(sorted(int(np.sum(b.astype(np.int64) << np.arange(n))) for b in states), dtype=np.int64)
        return cls(int(rec["ground_energy"]), idx, n, rec.get("instance_id", ""))


def brute_force(instance: Instance, max_n: int = MAX_ENUM_N, energies: np.ndarray | None = None) -> SolutionSet:
    """Exhaustive minimum over all ``2**n`` assignments, with every minimiser."""
    if energies is None:
        energies = diagonal_energies(instance, max_n=max_n)
    e0 = int(energies.min())
    idx = np.flatnonzero(energies == e0).astype(np.int64)
    return SolutionSet(e0, idx, instance.n, instance.instance_id)


@dataclass
class SolutionStatistics:
    per_instance: list[dict] = field(default_factory=list)
    pairwise: list[int] = field(default_factory=list)

    @property
    def multi_fraction(self) -> float:
        if not self.per_instance:
            return 0.0
        return sum(r["count"] > 1 for r in self.per_instance) / len(self.per_instance)

    @property
    def mean_count(self) -> float:
        if not self.per_instance:
            return 0.0
        return float(np.mean([r["count"] for r in self.per_instance]))


def pairwise_distances(indices: np.ndarray) -> list[int]:
    idx = np.asarray(indices, dtype=np.int64)
    iu = np.triu_indices(idx.size, k=1)
    return popcount(idx[iu[0]] ^ idx[iu[1]]).tolist()


def solution_statistics(
    instances: Sequence[Instance], solutions: Sequence[SolutionSet] | None = None
) -> SolutionStatistics:
    """Multiplicity and spread of exact ground-state sets across an ensemble."""
    stats = SolutionStatistics()
    for k, inst in enumerate(instances):
        sol = solutions[k] if solutions is not None else brute_force(inst)
        d = pairwise_distances(sol.indices)
        planted_e = energy(inst, inst.planted)
        stats.per_instance.append(
            {
                "instance_id": inst.instance_id,
                "n": inst.n,
                "density": inst.density,
                "ground_energy": sol.ground_energy,
                "planted_energy": planted_e,
                "planted_is_ground": planted_e == sol.ground_energy,
                "count": sol.count,
            }
        )
        stats.pairwise.extend(d)
    return stats


def gauge_transform(instance: Instance, j: int) -> Instance:
    """Flip variable ``j``'s reference value and negate every constraint containing it."""
    if not 0 <= j < instance.n:
        raise ValueError("gauge index out of range")
    touched = np.any(instance.triples == j, axis=1)
    signs = np.where(touched, -instance.signs, instance.signs).astype(np.int8)
    planted = instance.planted.copy()
    planted[j] ^= 1
    return Instance(instance.n, instance.triples.copy(), signs, planted, instance.epsilon, instance.density,
                    instance.seed, instance.instance_id)


def relabel(instance: Instance, perm: Sequence[int]) -> Instance:
    """Rename variable ``v`` to ``perm[v]``."""
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(instance.n)):
        raise ValueError("perm must be a permutation of range(n)")
    triples = np.sort(perm[instance.triples], axis=1)
    planted = np.empty_like(instance.planted)
    planted[perm] = instance.planted
    return Instance(instance.n, triples, instance.signs.copy(), planted, instance.epsilon, instance.density,
                    instance.seed, instance.instance_id)


def read_instances(path) -> Iterator[Instance]:
    with open(path) as fh:
        for line in fh:
            if line.strip():
                yield Instance.from_json(line)


def write_instances(path, instances: Iterable[Instance]) -> int:
    count = 0
    with open(path, "w") as fh:
        for inst in instances:
            fh.write(inst.to_json() + "\n")
            count += 1
    return count


def read_solutions(path) -> dict[str, SolutionSet]:
    out = {}
    with open(path) as fh:
        for line in fh:
            if line.strip():
                s = SolutionSet.from_json(line)
                out[s.instance_id] = s
    return out
