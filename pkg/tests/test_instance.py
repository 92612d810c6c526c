import hashlib
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from istsat.bits import as_bits, bits_to_index, hamming, index_to_bits, indices_to_bits, spins
from istsat.errors import CapExceeded
from istsat.instance import (
    Instance,
    SolutionSet,
    brute_force,
    diagonal_energies,
    energy,
    gauge_transform,
    generate_instance,
    make_instance,
    pairwise_distances,
    read_instances,
    relabel,
    solution_statistics,
    unsatisfied_count,
    write_instances,
)

import oracle

instances = st.builds(
    generate_instance,
    n=st.integers(5, 10),
    density=st.sampled_from([1.0, 1.5, 2.0]),
    epsilon=st.sampled_from([0.0, 0.1, 0.25]),
    seed=st.integers(0, 2**31 - 1),
)


def single_constraint():
    return make_instance(3, [(0, 1, 2, 1)], "000", instance_id="one")


# --- bits -------------------------------------------------------------------

def test_hamming_examples():
    assert hamming("0000", "1111") == 4
    assert hamming("10110", "10110") == 0
    assert hamming("10110", "00111") == 2
    with pytest.raises(ValueError):
        hamming("01", "011")


@given(st.integers(1, 20).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1))))
def test_index_roundtrip(nz):
    n, z = nz
    b = index_to_bits(z, n)
    assert bits_to_index(b) == z
    assert indices_to_bits(np.array([z]), n)[0].tolist() == b.tolist()


def test_bit_order_little_endian():
    # char j of the string is variable j, which is bit j of the index
    assert bits_to_index("100") == 1
    assert bits_to_index("001") == 4
    assert spins("01").tolist() == [1, -1]


# --- generation ---------------------------------------------------------------

def test_energy_forced_by_construction():
    g = generate_instance(10, 4, 0.0, 3)
    assert energy(g, g.planted) == -40
    inst = generate_instance(10, 4, 0.1, 3)
    assert inst.n_unsat == 4
    assert energy(inst, inst.planted) == -32


@given(instances)
def test_instance_invariants(inst):
    n_c = int(round(inst.density * inst.n))
    assert inst.n_constraints == n_c
    tri = {tuple(sorted(t)) for t in inst.triples.tolist()}
    assert len(tri) == n_c
    assert all(len(set(t)) == 3 and max(t) < inst.n for t in tri)
    n_unsat = round(inst.epsilon * n_c)
    assert unsatisfied_count(inst, inst.planted) == n_unsat
    assert energy(inst, inst.planted) == -(n_c - 2 * n_unsat)


def test_generate_is_deterministic():
    a = generate_instance(12, 4, 0.1, 99).to_json()
    b = generate_instance(12, 4, 0.1, 99).to_json()
    assert a == b
    assert generate_instance(12, 4, 0.1, 100).to_json() != a


def test_generate_frozen_golden():
    # DERIVED: serialized instance frozen on first run; guards the sampling order
    inst = generate_instance(12, 1.5, 0.1, 7)
    assert inst.planted.tolist() == as_bits("101110011001").tolist()
    assert hashlib.sha256(inst.to_json().encode()).hexdigest()[:16] == "ff8868d9b4534c98"


@pytest.mark.parametrize("kw", [
    dict(n=5, density=9, epsilon=0.1),  # C(5,3) = 10 < 45
    dict(n=2, density=1, epsilon=0.1),
    dict(n=8, density=2, epsilon=0.5),
    dict(n=8, density=0, epsilon=0.1),
])
def test_generate_rejects(kw):
    with pytest.raises(ValueError):
        generate_instance(seed=0, **kw)


def test_planted_is_uniform():
    counts = np.zeros(6)
    for s in range(600):
        counts += generate_instance(6, 1, 0.0, s).planted
    # each bit is 1 with probability 1/2: 6 sigma band at 600 draws
    assert np.all(np.abs(counts / 600 - 0.5) < 6 * math.sqrt(0.25 / 600))


def test_json_roundtrip(tmp_path):
    insts = [generate_instance(8, 2, 0.1, s) for s in range(3)]
    path = tmp_path / "i.jsonl"
    assert write_instances(path, insts) == 3
    back = list(read_instances(path))
    assert [b.to_json() for b in back] == [i.to_json() for i in insts]
    assert Instance.from_json(insts[0].to_json()) == insts[0] or back[0].to_json() == insts[0].to_json()


# --- energies -------------------------------------------------------------------

def test_energy_single_constraint():
    one = single_constraint()
    assert energy(one, "000") == -1
    assert energy(one, "100") == 1
    assert diagonal_energies(one).tolist() == [-1, 1, 1, -1, 1, -1, -1, 1]


def test_diagonal_energy_matches_dense_oracle():
    inst = generate_instance(9, 2, 0.1, 5)
    ref = oracle.problem_diagonal(inst.n, inst.triples.tolist(), inst.signs.tolist())
    np.testing.assert_array_equal(diagonal_energies(inst), ref)


@given(instances, st.integers(0, 2**31 - 1))
def test_diagonal_agrees_with_energy(inst, seed):
    e = diagonal_energies(inst)
    zs = np.random.default_rng(seed).integers(0, 2**inst.n, 100)
    assert all(e[z] == energy(inst, index_to_bits(z, inst.n)) for z in zs)


def test_planted_entry_of_diagonal():
    inst = generate_instance(12, 1.5, 0.1, 7)
    assert diagonal_energies(inst)[bits_to_index(inst.planted)] == -14


def test_diagonal_cap():
    inst = generate_instance(30, 1, 0.1, 0)
    with pytest.raises(CapExceeded):
        diagonal_energies(inst)
    with pytest.raises(CapExceeded):
        brute_force(generate_instance(12, 1, 0.1, 0), max_n=10)


# --- brute force ----------------------------------------------------------------

def test_brute_force_single_constraint():
    sol = brute_force(single_constraint())
    assert sol.ground_energy == -1
    assert sol.count == 4
    assert all(int(g.sum()) % 2 == 0 for g in sol.ground_states)


def test_brute_force_seed7_golden():
    # DERIVED: exhaustive enumeration; planted is a ground state with 3 others
    inst = generate_instance(12, 1.5, 0.1, 7)
    sol = brute_force(inst)
    assert sol.ground_energy == energy(inst, inst.planted) == -14
    assert sol.indices.tolist() == [2205, 2461, 4074, 4078]
    assert (sol.ground_energy, sol.indices.tolist()) == oracle.brute_ground(
        inst.n, inst.triples.tolist(), inst.signs.tolist())


@given(instances)
def test_brute_force_is_minimum(inst):
    sol = brute_force(inst)
    e = diagonal_energies(inst)
    assert sol.ground_energy == e.min() <= energy(inst, inst.planted)
    assert sol.indices.tolist() == np.flatnonzero(e == e.min()).tolist()


def test_solution_json_roundtrip():
    sol = brute_force(generate_instance(10, 1.5, 0.1, 1))
    back = SolutionSet.from_json(sol.to_json())
    assert back.indices.tolist() == sol.indices.tolist() and back.ground_energy == sol.ground_energy


def test_planted_unique_at_density_4():
    # the planted string is usually the unique ground state at high density
    uniq = 0
    for s in range(50):
        inst = generate_instance(12, 4, 0.1, s)
        sol = brute_force(inst)
        uniq += sol.count == 1 and sol.indices[0] == bits_to_index(inst.planted)
    assert uniq >= 40


# --- solution statistics ----------------------------------------------------------

def test_statistics_unique():
    insts = [generate_instance(10, 4, 0.1, s) for s in range(2)]
    sols = [SolutionSet(-32, np.array([5]), 10, "a"), SolutionSet(-32, np.array([1]), 10, "b")]
    stats = solution_statistics(insts, sols)
    assert stats.multi_fraction == 0
    assert stats.mean_count == 1
    assert stats.pairwise == []


def test_pairwise_distances_positive():
    sol = brute_force(generate_instance(12, 1.5, 0.1, 7))
    d = pairwise_distances(sol.indices)
    assert len(d) == 6 and min(d) >= 1


def test_low_density_has_degenerate_ground_states():
    insts = [generate_instance(12, 1.5, 0.1, s) for s in range(200)]
    stats = solution_statistics(insts)
    assert stats.multi_fraction > 0 and stats.mean_count > 1


# --- symmetries ---------------------------------------------------------------------

@given(instances, st.data())
def test_gauge_covariance(inst, data):
    j = data.draw(st.integers(0, inst.n - 1))
    g = gauge_transform(inst, j)
    assert g.planted[j] != inst.planted[j]
    e, eg = diagonal_energies(inst), diagonal_energies(g)
    z = np.arange(1 << inst.n)
    np.testing.assert_array_equal(e, eg[z ^ (1 << j)])
    assert unsatisfied_count(g, g.planted) == inst.n_unsat


@given(instances, st.randoms())
def test_relabel_covariance(inst, rnd):
    perm = list(range(inst.n))
    rnd.shuffle(perm)
    r = relabel(inst, perm)
    x = np.random.default_rng(rnd.randint(0, 999)).integers(0, 2, inst.n)
    y = np.empty_like(x)
    y[perm] = x  # variable v becomes perm[v]
    assert energy(r, y) == energy(inst, x)
    assert energy(r, r.planted) == energy(inst, inst.planted)
