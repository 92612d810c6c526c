"""Per-instance jobs and CSV-level aggregation behind the CLI.

Jobs are module-level functions of plain data so they can run in worker
processes; results are always collected in submission order.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .analysis import as_fraction, estimate_chr, fit_groups, fmt_fraction, group_means, tts_table
from .classical import SgcConfig, distribute_trials, sgc_trials
from .engine import MAX_QUBITS, trotter_evolve, write_dump
from .errors import CapExceeded
from .instance import (
    Instance,
    SolutionSet,
    brute_force,
    diagonal_energies,
    energy,
    pairwise_distances,
)
from .protocol import (
    RunConfig,
    corrupt_pattern,
    hamming_profile,
    istsat_iterate,
    mean_energy,
    min_distances,
    run_windowed,
    stream,
)

RUN_HEADER = ["instance_id", "n", "density", "epsilon", "mode", "r_or_source", "threshold", "variant",
              "probability", "window_points", "seed"]
ENERGY_HEADER = ["instance_id", "n", "density", "epsilon", "mode", "r_or_source", "mean_energy",
                 "ground_energy", "energy_ratio", "window_points", "seed"]
FIT_HEADER = ["density", "mode", "r_or_d", "variant", "a", "b", "residual", "n_min", "n_max", "points_used",
              "points_excluded"]


def pmap(func: Callable, items: Sequence, workers: int = 1) -> list:
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, items, chunksize=max(1, len(items) // (4 * workers))))


def pattern_for(instance: Instance, r, seed: int) -> np.ndarray:
    return corrupt_pattern(instance.planted, float(r), stream(seed, instance.instance_id, "pattern", fmt_fraction(r)))


def brute_job(args):
    line, max_n = args
    inst = Instance.from_json(line)
    if inst.n > max_n:
        raise CapExceeded(f"instance {inst.instance_id} has n = {inst.n} > brute-force cap {max_n}")
    return brute_force(inst, max_n=max_n).to_json()


def run_job(args):
    """All requested modes for one instance: (run rows, energy rows)."""
    line, sol_line, job = args
    inst = Instance.from_json(line)
    if inst.n > MAX_QUBITS:
        raise CapExceeded(f"instance {inst.instance_id} has n = {inst.n} > state-vector cap {MAX_QUBITS}")
    cfg = RunConfig(**job["config"])
    energies = diagonal_energies(inst)
    sol = SolutionSet.from_json(sol_line) if sol_line else brute_force(inst, energies=energies)
    dists = min_distances(inst.n, sol.indices)
    thresholds = job["thresholds"]
    base = [inst.instance_id, inst.n, inst.density, inst.epsilon]
    tail = [cfg.window_points, cfg.seed]
    runs, erows = [], []
    settings = [("TAQC", "none", None)] if job["mode"] == "taqc" else [
        ("ISTSAT", fmt_fraction(r), pattern_for(inst, r, cfg.seed)) for r in job["r_grid"]
    ]
    for mode, src, pattern in settings:
        res = run_windowed(inst, pattern, cfg, energies=energies)
        dist = res.distribution
        prof = hamming_profile(dist, sol, thresholds, distances=dists)
        for d, variant, p in prof.rows():
            runs.append(base + [mode, src, fmt_fraction(d), variant, p] + tail)
        if job.get("dump"):
            # amplitudes at the last window point, for debugging only
            name = f"{inst.instance_id}_{mode}_{src.replace('/', '-')}.bin"
            t = float(res.times[-1])
            write_dump(os.path.join(job["dump"], name),
                       trotter_evolve(inst, pattern, cfg.schedule(inst.n), t, energies=energies))
        me = mean_energy(dist, energies)
        erows.append(base + [mode, src, me, sol.ground_energy, me / sol.ground_energy] + tail)
    return runs, erows


def iterate_job(args):
    line, sol_line, job = args
    inst = Instance.from_json(line)
    cfg = RunConfig(**job["config"])
    energies = diagonal_energies(inst)
    sol = SolutionSet.from_json(sol_line) if sol_line else None
    out = []
    for r in job["r_grid"]:
        trace = istsat_iterate(inst, pattern_for(inst, r, cfg.seed), cfg, job["iters"], job["select"],
                               solutions=sol, energies=energies)
        rec = trace.to_json()
        out.append(rec[:-1] + f',"r":"{fmt_fraction(r)}"}}')
    return out


def sgc_job(args):
    line, target, trials, cfg_kw, thresholds = args
    inst = Instance.from_json(line)
    res = sgc_trials(inst, trials, SgcConfig(**cfg_kw), target)
    label = "random" if cfg_kw["warm_r"] is None else fmt_fraction(cfg_kw["warm_r"])
    return [inst.instance_id, inst.n, inst.density, label, res.trials, res.p_gs] + [
        res.p_within(d) + res.p_gs for d in thresholds
    ]


def sgc_tasks(instances: Sequence[Instance], solutions: dict, trials: int, cfg_kw: dict,
              thresholds: Sequence[float]) -> list:
    """Split ``trials`` round-robin over the instances of each (n, density) group."""
    groups: dict = {}
    for inst in instances:
        groups.setdefault((inst.n, inst.density), []).append(inst)
    tasks = []
    for key in sorted(groups):
        group = groups[key]
        for inst, count in zip(group, distribute_trials(trials, len(group))):
            if count == 0:
                continue
            sol = solutions.get(inst.instance_id)
            target = sol.ground_energy if sol is not None else energy(inst, inst.planted)
            tasks.append((inst.to_json(), target, count, cfg_kw, list(thresholds)))
    return tasks


def solution_rows(instances: Sequence[Instance], solutions: Sequence[SolutionSet]):
    """Multiplicity summary rows and pairwise-distance histogram rows per (n, density)."""
    groups: dict = {}
    for inst, sol in zip(instances, solutions):
        g = groups.setdefault((inst.n, inst.density), {"count": [], "pairs": [], "planted": 0})
        g["count"].append(sol.count)
        g["pairs"].extend(pairwise_distances(sol.indices))
        g["planted"] += int(energy(inst, inst.planted) == sol.ground_energy)
    stats, hist = [], []
    for (n, dens), g in sorted(groups.items()):
        counts = np.array(g["count"])
        stats.append([n, dens, counts.size, float(np.mean(counts > 1)), float(np.mean(counts)),
                      g["planted"] / counts.size])
        if g["pairs"]:
            values, freq = np.unique(g["pairs"], return_counts=True)
            hist.extend([n, dens, int(v), int(c)] for v, c in zip(values, freq))
    return stats, hist


def fit_rows(tables: Iterable[list[dict]], n_min=None, n_max=None) -> list[list]:
    """Fit every curve found in run/sgc CSV rows (already parsed)."""
    long_rows = []
    for rows in tables:
        if not rows:
            continue
        cols = rows[0].keys()
        if "variant" in cols:
            for r in rows:
                if r["mode"] == "ISTSAT" and as_fraction(Fraction(r["threshold"])) != as_fraction(
                        Fraction(r["r_or_source"])):
                    continue
                long_rows.append({"density": r["density"], "mode": r["mode"], "r_or_d": r["threshold"],
                                  "variant": r["variant"], "n": r["n"], "probability": r["probability"]})
        elif "P_GS" in cols:
            dcols = [c for c in cols if c.startswith("d=")]
            for r in rows:
                if r["r"] == "random":
                    long_rows.append({"density": r["density"], "mode": "SGC", "r_or_d": "0", "variant": "GS",
                                      "n": r["n"], "probability": r["P_GS"]})
                    for c in dcols:
                        long_rows.append({"density": r["density"], "mode": "SGC", "r_or_d": c[2:],
                                          "variant": "dN+GS", "n": r["n"], "probability": r[c]})
                else:
                    long_rows.append({"density": r["density"], "mode": "SGC-warm", "r_or_d": r["r"],
                                      "variant": "GS", "n": r["n"], "probability": r["P_GS"]})
    means = group_means(long_rows, ("density", "mode", "r_or_d", "variant"))
    fits = fit_groups(means, n_min, n_max)
    out = []
    for (dens, mode, rd, variant), f in fits.items():
        if f is None:
            out.append([dens, mode, rd, variant, None, None, None, None, None, 0, None])
        else:
            out.append([dens, mode, rd, variant, f.a, f.b, f.residual, f.n_min, f.n_max, f.points_used,
                        f.points_excluded])
    return out


def _fits_index(fit_table: list[dict]) -> dict:
    idx = {}
    for r in fit_table:
        if r["b"] in ("", None):
            continue
        idx[(r["density"], r["mode"], as_fraction(Fraction(r["r_or_d"])), r["variant"])] = float(r["b"])
    return idx


def chr_rows(fit_table: list[dict], tolerance: float = 0.01, variant: str = "rN",
             grid: Sequence = (Fraction(1, 8), Fraction(1, 4), Fraction(3, 10), Fraction(1, 3))) -> list[list]:
    idx = _fits_index(fit_table)
    out = []
    for dens in sorted({k[0] for k in idx if k[1] == "ISTSAT"}, key=float):
        fits = {r: idx[(dens, "ISTSAT", r, variant)] for r in grid if (dens, "ISTSAT", r, variant) in idx}
        if not fits:
            continue
        res = estimate_chr(fits, tolerance)
        rc = "none" if res.r_c is None else fmt_fraction(res.r_c)
        out.extend([dens, variant, fmt_fraction(r), b, rc, tolerance] for r, b in res.table)
    return out


def tts_rows(fit_table: list[dict], chr_table: list[dict] | None = None, tolerance: float = 0.01) -> list[list]:
    idx = _fits_index(fit_table)
    rc_by_density = {}
    for r in chr_table or []:
        rc_by_density[r["density"]] = None if r["r_c"] == "none" else Fraction(r["r_c"])
    if chr_table is None:
        for row in chr_rows(fit_table, tolerance):
            rc_by_density[row[0]] = None if row[4] == "none" else Fraction(row[4])
    out = []
    densities = sorted({k[0] for k in idx}, key=float)
    for dens in densities:
        taqc = {k[2]: b for k, b in idx.items() if k[0] == dens and k[1] == "TAQC" and k[3] == "rN"}
        warm = {k[2]: b for k, b in idx.items() if k[0] == dens and k[1] == "SGC-warm"}
        sgc = idx.get((dens, "SGC", Fraction(0), "GS"))
        for row in tts_table(float(dens), sgc, taqc, warm, rc_by_density.get(dens)):
            out.append([row.pipeline, dens, row.b, row.detail])
    return out
