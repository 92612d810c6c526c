import json
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from istsat.bits import as_bits, bits_to_index, hamming
from istsat.engine import probabilities, trotter_evolve
from istsat.instance import brute_force, gauge_transform, generate_instance
from istsat.protocol import (
    RunConfig,
    corrupt_pattern,
    hamming_profile,
    istsat_iterate,
    mean_energy,
    min_distances,
    pattern_from_string,
    run_windowed,
    select_seed_string,
    stream,
    threshold_count,
)

FAST = dict(window_points=2)


def test_pattern_from_string():
    assert pattern_from_string("0000").tolist() == [0, 0, 0, 0]
    assert pattern_from_string("0110").tolist() == [0, 1, 1, 0]
    assert (1 - pattern_from_string("0110")).tolist() == pattern_from_string("1001").tolist()


@given(st.integers(4, 40), st.sampled_from([0, 1 / 8, 1 / 4, 3 / 10, 1 / 3, 1 / 2]), st.integers(0, 10**6))
def test_corrupt_pattern_distance(n, r, seed):
    g = np.random.default_rng(seed).integers(0, 2, n)
    p = corrupt_pattern(g, r, seed)
    assert hamming(p, g) == round(r * n)


def test_corrupt_pattern_examples():
    g = as_bits("1011001110001101")
    assert corrupt_pattern(g, 0, 1).tolist() == g.tolist()
    assert hamming(corrupt_pattern(g, 0.25, 1), g) == 4
    with pytest.raises(ValueError):
        corrupt_pattern(g, 0.6, 1)


def test_threshold_rounding():
    assert threshold_count(1 / 8, 16) == 2
    assert threshold_count(1 / 8, 16, halve=True) == 1
    assert threshold_count(1 / 3, 12) == 4
    assert threshold_count(1 / 3, 14, halve=True) == 2
    assert threshold_count(1 / 4, 14, halve=True) == 2  # 1.75 rounds up
    assert threshold_count(1 / 4, 10, halve=True) == 1  # 1.25 rounds down


def test_stream_is_keyed():
    a = stream(1, "x", 2).random(4)
    assert np.array_equal(a, stream(1, "x", 2).random(4))
    assert not np.array_equal(a, stream(1, "x", 3).random(4))
    assert not np.array_equal(a, stream(2, "x", 2).random(4))


# --- windowed runs ----------------------------------------------------------------

def test_single_point_window_equals_run():
    inst = generate_instance(8, 2, 0.1, 1)
    cfg = RunConfig(window_points=1)
    params = cfg.schedule(8)
    res = run_windowed(inst, inst.planted, cfg)
    assert res.times.tolist() == [pytest.approx(params.t_f)]
    direct = probabilities(trotter_evolve(inst, inst.planted, params, params.t_f))
    np.testing.assert_allclose(res.mean_probs, direct, atol=1e-14)


def test_window_average_of_endpoints():
    inst = generate_instance(8, 2, 0.1, 2)
    cfg = RunConfig(**FAST)
    params = cfg.schedule(8)
    res = run_windowed(inst, None, cfg)
    ends = [probabilities(trotter_evolve(inst, None, params, t)) for t in (2 / 3 * params.t_f, 4 / 3 * params.t_f)]
    np.testing.assert_allclose(res.mean_probs, np.mean(ends, axis=0), atol=1e-14)


def test_taqc_equivalence_under_zero_drive():
    inst = generate_instance(8, 2, 0.1, 3)
    a = run_windowed(inst, None, RunConfig(**FAST)).mean_probs
    b = run_windowed(inst, "10101010", RunConfig(alpha_s=0.0, **FAST)).mean_probs
    assert np.max(np.abs(a - b)) < 1e-12


def test_sampled_mode():
    inst = generate_instance(8, 2, 0.1, 4)
    cfg = RunConfig(analysis_mode="sampled", shots=1001, window_points=3, seed=5)
    res = run_windowed(inst, None, cfg)
    assert [s.size for s in res.samples] == [334, 334, 333]
    assert res.distribution.sum() == pytest.approx(1)
    again = run_windowed(inst, None, cfg)
    np.testing.assert_array_equal(res.shots, again.shots)


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(shots=0)
    with pytest.raises(ValueError):
        RunConfig(analysis_mode="bogus")


# --- profiles ---------------------------------------------------------------------

def test_profile_concentrated():
    dist = np.zeros(1 << 6)
    dist[bits_to_index("011010")] = 1
    prof = hamming_profile(dist, "011010", [0, 1 / 8, 1 / 4, 1 / 3])
    assert prof.p_rn == [1, 1, 1, 1] and prof.p_rn2 == [1, 1, 1, 1]


def test_profile_uniform_is_binomial_tail():
    n = 10
    dist = np.full(1 << n, 2.0**-n)
    ds = [0, 1 / 8, 1 / 4, 3 / 10, 1 / 3, 1 / 2]
    prof = hamming_profile(dist, "0" * n, ds)
    for d, p in zip(ds, prof.p_rn):
        k = threshold_count(d, n)
        assert p == pytest.approx(sum(comb(n, i) for i in range(k + 1)) / 2**n, abs=1e-14)


def test_profile_at_zero_is_ground_state_mass():
    inst = generate_instance(12, 1.5, 0.1, 7)
    sol = brute_force(inst)
    dist = run_windowed(inst, None, RunConfig(window_points=1)).mean_probs
    prof = hamming_profile(dist, sol, [0])
    assert sol.count == 4
    assert prof.p_rn[0] == pytest.approx(dist[sol.indices].sum(), abs=1e-15)


@given(st.integers(0, 1000))
def test_profile_monotone(seed):
    rng = np.random.default_rng(seed)
    dist = rng.random(256)
    dist /= dist.sum()
    targets = [rng.integers(0, 2, 8) for _ in range(rng.integers(1, 4))]
    prof = hamming_profile(dist, targets, [0, 1 / 8, 1 / 4, 3 / 10, 1 / 3, 1 / 2])
    assert np.all(np.diff(prof.p_rn) >= -1e-15)
    assert np.all(np.diff(prof.p_rn2) >= -1e-15)
    assert np.all(np.array(prof.p_rn2) <= np.array(prof.p_rn) + 1e-15)
    assert sum(dist[min_distances(8, np.array([bits_to_index(t) for t in targets])) <= 8]) == pytest.approx(1)


def test_min_distances():
    d = min_distances(3, np.array([0, 7]))
    assert d.tolist() == [0, 1, 1, 1, 1, 1, 1, 0]


def test_mean_energy():
    e = np.array([-3, 1, 1, 1])
    assert mean_energy(np.array([1.0, 0, 0, 0]), e) / -3 == 1
    sym = np.array([-2, -1, 1, 2])
    assert mean_energy(np.full(4, 0.25), sym) == 0


# --- gauge invariance of the full pipeline ------------------------------------------

def test_pipeline_gauge_invariance():
    inst = generate_instance(9, 2, 0.1, 11)
    pat = corrupt_pattern(inst.planted, 1 / 4, 0)
    j = 4
    g = gauge_transform(inst, j)
    pat_g = pat.copy()
    pat_g[j] ^= 1
    cfg = RunConfig(**FAST)
    ds = [0, 1 / 8, 1 / 4, 1 / 3]
    a = hamming_profile(run_windowed(inst, pat, cfg).mean_probs, brute_force(inst), ds)
    b = hamming_profile(run_windowed(g, pat_g, cfg).mean_probs, brute_force(g), ds)
    np.testing.assert_allclose(a.p_rn + a.p_rn2, b.p_rn + b.p_rn2, atol=1e-12)


# --- seed selection and iteration --------------------------------------------------

def test_select_rules():
    e = np.array([0, -5, -5, 3])
    shots = np.array([0, 1, 2, 3, 3])
    picks = {select_seed_string(shots, e, 2, "min-energy", np.random.default_rng(s)) for s in range(40)}
    assert picks == {1, 2}
    maj = select_seed_string(np.array([1, 1, 3]), e, 2, "bitwise-majority", np.random.default_rng(0))
    assert maj == 1
    assert select_seed_string(shots, e, 2, "random", np.random.default_rng(0)) in set(shots.tolist())
    with pytest.raises(ValueError):
        select_seed_string(shots, e, 2, "bogus", np.random.default_rng(0))


def test_iterate_one_record():
    inst = generate_instance(8, 2, 0.1, 5)
    trace = istsat_iterate(inst, corrupt_pattern(inst.planted, 1 / 4, 1), RunConfig(shots=1, **FAST), 1)
    assert len(trace.records) == 1
    assert trace.records[0].provisional


def test_iterate_reproducible_and_causal():
    inst = generate_instance(10, 4, 0.1, 6)
    sol = brute_force(inst)
    cfg = RunConfig(shots=4, seed=3, **FAST)
    p0 = corrupt_pattern(inst.planted, 1 / 3, 2)
    a = istsat_iterate(inst, p0, cfg, 5, solutions=sol)
    b = istsat_iterate(inst, p0, cfg, 5, solutions=sol)
    assert a.to_json() == b.to_json()
    for prev, nxt in zip(a.records, a.records[1:]):
        assert nxt.pattern == prev.selected
    rec = json.loads(a.to_json())
    assert rec["succeeded"] == any(r["success"] for r in rec["iterations"])
    assert len(a.records) == 5 or a.succeeded


def test_iterate_succeeds_from_ground_state_pattern():
    inst = generate_instance(8, 4, 0.1, 2)
    sol = brute_force(inst)
    trace = istsat_iterate(inst, inst.planted, RunConfig(shots=2000, **FAST), 3, solutions=sol)
    assert trace.succeeded
    last = trace.records[-1]
    assert last.best_energy == sol.ground_energy and not last.provisional
