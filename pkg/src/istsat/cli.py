"""Command-line entry point: ``istsat <command> [flags]``.

Exit codes: 0 success, 1 usage error, 2 cap/validation error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

import numpy as np

from . import pipeline as pl
from .analysis import fmt_fraction, parse_fraction
from .errors import CapExceeded
from .instance import MAX_ENUM_N, SolutionSet, generate_instance, read_instances, read_solutions, write_instances
from .tables import check_writable, read_csv, write_csv, write_jsonl

log = logging.getLogger("istsat")

DEFAULT_R = "0,1/8,1/4,3/10,1/3"
DEFAULT_D = "0,1/8,1/4,3/10,1/3"


class UsageError(Exception):
    pass


class StepFailed(Exception):
    def __init__(self, step: str, code: int):
        super().__init__(f"sweep step {step} failed")
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _fractions(text: str) -> list[Fraction]:
    try:
        return [parse_fraction(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad fraction list {text!r}") from exc


def _r_list(text: str) -> list:
    out = []
    for t in text.split(","):
        t = t.strip()
        if t:
            out.append(None if t == "random" else parse_fraction(t))
    return out


def instance_seed(master: int, n: int, density: float, index: int) -> int:
    ss = np.random.SeedSequence([master, n, int(round(density * 1000)), index])
    return int(ss.generate_state(1)[0] & 0x7FFFFFFF)


def _out(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    if args.label:
        stem, ext = os.path.splitext(name)
        name = f"{stem}_{args.label}{ext}"
    path = os.path.join(args.out, name)
    check_writable(path, args.force)
    return path


# run-location arguments stay out of the provenance hash so relocated reruns stay byte-identical
_NOT_CONFIG = ("func", "workers", "force", "out", "verbose", "instances", "solutions", "inputs", "fits", "chr",
               "spec", "dump")


def _config(args, *skip) -> dict:
    return {k: (str(v) if isinstance(v, (Fraction, list)) else v) for k, v in sorted(vars(args).items())
            if k not in _NOT_CONFIG + skip}


def _load_solutions(path) -> dict[str, SolutionSet]:
    return read_solutions(path) if path else {}


def cmd_gen(args) -> int:
    path = _out(args, "instances.jsonl")
    insts = []
    for n in args.n:
        for dens in args.density:
            for i in range(args.count):
                seed = instance_seed(args.seed, n, dens, i)
                iid = f"n{n}-d{dens:g}-e{args.epsilon:g}-{i:04d}"
                insts.append(generate_instance(n, dens, args.epsilon, seed, instance_id=iid))
    count = write_instances(path, insts)
    log.info("wrote %d instances to %s", count, path)
    return 0


def cmd_brute(args) -> int:
    insts = list(read_instances(args.instances))
    for inst in insts:
        if inst.n > args.max_n:
            raise CapExceeded(f"instance {inst.instance_id} has n = {inst.n} > brute-force cap {args.max_n}")
    sol_path, stats_path, hist_path = (_out(args, f) for f in
                                       ("solutions.jsonl", "solution_stats.csv", "pairwise_distances.csv"))
    lines = pl.pmap(pl.brute_job, [(i.to_json(), args.max_n) for i in insts], args.workers)
    write_jsonl(sol_path, lines)
    stats, hist = pl.solution_rows(insts, [SolutionSet.from_json(s) for s in lines])
    cfg = _config(args)
    write_csv(stats_path, ["n", "density", "instances", "multi_fraction", "mean_ground_states",
                           "planted_is_ground_fraction"], stats, "brute", cfg)
    write_csv(hist_path, ["n", "density", "distance", "pairs"], hist, "brute", cfg)
    log.info("brute-forced %d instances", len(insts))
    return 0


def _run_config(args) -> dict:
    return dict(preset=args.preset, shots=args.shots, seed=args.seed, analysis_mode=args.analysis_mode,
                window_points=args.window_points, alpha_s=args.alpha_s)


def cmd_run(args) -> int:
    insts = list(read_instances(args.instances))
    sols = _load_solutions(args.solutions)
    job = {"mode": args.mode, "r_grid": [float(r) for r in args.r], "thresholds": [float(d) for d in args.thresholds],
           "config": _run_config(args), "iters": args.iters, "select": args.select, "dump": args.dump}
    if args.dump:
        os.makedirs(args.dump, exist_ok=True)
    if args.mode == "istsat-iterate":
        path = _out(args, "traces.jsonl")
        tasks = [(i.to_json(), sols[i.instance_id].to_json() if i.instance_id in sols else None, job)
                 for i in insts]
        lines = [ln for chunk in pl.pmap(pl.iterate_job, tasks, args.workers) for ln in chunk]
        write_jsonl(path, lines)
        return 0
    run_path = _out(args, f"run_{args.mode}.csv")
    energy_path = _out(args, f"energy_{args.mode}.csv")
    tasks = [(i.to_json(), sols[i.instance_id].to_json() if i.instance_id in sols else None, job) for i in insts]
    results = pl.pmap(pl.run_job, tasks, args.workers)
    cfg = _config(args)
    write_csv(run_path, pl.RUN_HEADER, (r for runs, _ in results for r in runs), "run", cfg)
    write_csv(energy_path, pl.ENERGY_HEADER, (r for _, er in results for r in er), "run", cfg)
    log.info("ran %s on %d instances", args.mode, len(insts))
    return 0


def cmd_sgc(args) -> int:
    insts = list(read_instances(args.instances))
    sols = _load_solutions(args.solutions)
    path = _out(args, "sgc.csv")
    rows = []
    for r in args.r:
        cfg_kw = dict(trials=args.trials, plateau_cap=args.plateau_cap, step_cap=args.step_cap,
                      warm_r=None if r is None else float(r), seed=args.seed)
        tasks = pl.sgc_tasks(insts, sols, args.trials, cfg_kw, [float(d) for d in args.thresholds])
        rows.extend(pl.pmap(pl.sgc_job, tasks, args.workers))
    header = ["instance_id", "n", "density", "r", "trials", "P_GS"] + [f"d={fmt_fraction(d)}" for d in args.thresholds]
    write_csv(path, header, rows, "sgc", _config(args))
    return 0


def cmd_fit(args) -> int:
    path = _out(args, "fits.csv")
    tables = [read_csv(p) for p in args.inputs]
    rows = pl.fit_rows(tables, args.n_min, args.n_max)
    write_csv(path, pl.FIT_HEADER, rows, "fit", _config(args))
    return 0


def cmd_chr(args) -> int:
    path = _out(args, "chr.csv")
    rows = pl.chr_rows(read_csv(args.fits), args.tolerance, args.variant)
    write_csv(path, ["density", "variant", "r", "b", "r_c", "tolerance"], rows, "chr", _config(args))
    return 0


def cmd_tts(args) -> int:
    path = _out(args, "tts.csv")
    chr_table = read_csv(args.chr) if args.chr else None
    rows = pl.tts_rows(read_csv(args.fits), chr_table, args.tolerance)
    write_csv(path, ["pipeline", "density", "b", "detail"], rows, "tts", _config(args))
    return 0


SWEEP_DEFAULTS = {
    "n_grid": [8, 10, 12],
    "densities": [4.0],
    "epsilon": 0.1,
    "count": 10,
    "modes": ["taqc", "istsat"],
    "r_grid": DEFAULT_R,
    "thresholds": DEFAULT_D,
    "window_points": 8,
    "shots": 1000,
    "iters": 5,
    "select": "min-energy",
    "sgc_n_grid": [16, 24, 32],
    "sgc_count": 10,
    "sgc_trials": 1000,
    "sgc_r": "random,1/8,1/4,3/10,1/3",
    "n_min": None,
    "n_max": None,
    "tolerance": 0.01,
}


def cmd_sweep(args) -> int:
    """gen -> brute -> run -> sgc -> fit -> chr -> tts into one directory."""
    spec = dict(SWEEP_DEFAULTS)
    if args.spec:
        with open(args.spec) as fh:
            spec.update(json.load(fh))
    unknown = set(spec) - set(SWEEP_DEFAULTS)
    if unknown:
        raise ValueError(f"unknown sweep keys: {sorted(unknown)}")
    if not spec["n_grid"] or not spec["densities"]:
        raise ValueError("n_grid and densities must be nonempty")
    quantum = [m for m in spec["modes"] if m != "sgc"]
    if quantum and max(spec["n_grid"]) > MAX_ENUM_N:
        raise CapExceeded(f"n_grid exceeds the engine cap of {MAX_ENUM_N}")
    common = ["--seed", str(args.seed), "--workers", str(args.workers), "--out", args.out, "--preset", args.preset]
    if args.force:
        common.append("--force")
    dens = [str(d) for d in spec["densities"]]

    def call(*argv):
        rc = main(list(argv) + common)
        if rc:
            raise StepFailed(argv[0], rc)

    inst = os.path.join(args.out, "instances.jsonl")
    sols = os.path.join(args.out, "solutions.jsonl")
    call("gen", "--n", *map(str, spec["n_grid"]), "--density", *dens, "--epsilon", str(spec["epsilon"]),
         "--count", str(spec["count"]))
    call("brute", "--instances", inst)
    outputs = []
    for mode in quantum:
        call("run", "--mode", mode, "--instances", inst, "--solutions", sols, "--r", spec["r_grid"],
             "--thresholds", spec["thresholds"], "--window-points", str(spec["window_points"]),
             "--shots", str(spec["shots"]), "--iters", str(spec["iters"]), "--select", spec["select"])
        if mode != "istsat-iterate":
            outputs.append(os.path.join(args.out, f"run_{mode}.csv"))
    if "sgc" in spec["modes"]:
        call("gen", "--n", *map(str, spec["sgc_n_grid"]), "--density", *dens, "--epsilon", str(spec["epsilon"]),
             "--count", str(spec["sgc_count"]), "--label", "sgc")
        call("sgc", "--instances", os.path.join(args.out, "instances_sgc.jsonl"), "--trials", str(spec["sgc_trials"]),
             "--r", spec["sgc_r"], "--thresholds", spec["thresholds"].replace("0,", "", 1))
        outputs.append(os.path.join(args.out, "sgc.csv"))
    fit_argv = ["fit", "--inputs", *outputs]
    for key, flag in (("n_min", "--n-min"), ("n_max", "--n-max")):
        if spec[key] is not None:
            fit_argv += [flag, str(spec[key])]
    call(*fit_argv)
    fits = os.path.join(args.out, "fits.csv")
    call("chr", "--fits", fits, "--tolerance", str(spec["tolerance"]))
    call("tts", "--fits", fits, "--chr", os.path.join(args.out, "chr.csv"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--workers", type=int, default=1, help="worker processes (never changes output)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--force", action="store_true", help="overwrite existing outputs")
    common.add_argument("--preset", choices=["default", "lowfreq"], default="default",
                        help="drive frequency: 12 pi ln n (default) or 10 pi ln n")
    common.add_argument("--label", default="", help="suffix appended to output file names")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="istsat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen", parents=[common], help="generate planted instances")
    s.add_argument("--n", type=int, nargs="+", required=True)
    s.add_argument("--density", type=float, nargs="+", required=True)
    s.add_argument("--epsilon", type=float, default=0.1)
    s.add_argument("--count", type=int, default=1)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("brute", parents=[common], help="exact ground states and solution statistics")
    s.add_argument("--instances", required=True)
    s.add_argument("--max-n", type=int, default=MAX_ENUM_N)
    s.set_defaults(func=cmd_brute)

    s = sub.add_parser("run", parents=[common], help="TAQC / IST-SAT state-vector runs")
    s.add_argument("--mode", choices=["taqc", "istsat", "istsat-iterate"], required=True)
    s.add_argument("--instances", required=True)
    s.add_argument("--solutions", help="solutions.jsonl from `brute` (computed on the fly if absent)")
    s.add_argument("--r", type=_fractions, default=_fractions(DEFAULT_R), help="pattern guessing errors")
    s.add_argument("--thresholds", type=_fractions, default=_fractions(DEFAULT_D))
    s.add_argument("--window-points", type=int, default=8)
    s.add_argument("--alpha-s", type=float, default=0.6)
    s.add_argument("--shots", type=int, default=1000)
    s.add_argument("--analysis-mode", choices=["exact", "sampled"], default="exact")
    s.add_argument("--iters", type=int, default=20)
    s.add_argument("--select", choices=["min-energy", "random", "bitwise-majority"], default="min-energy")
    s.add_argument("--dump", metavar="DIR",
                   help="also write final-window-point amplitudes as <u64 n> + complex128 pairs (debug)")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("sgc", parents=[common], help="semi-greedy classical descent")
    s.add_argument("--instances", required=True)
    s.add_argument("--solutions")
    s.add_argument("--trials", type=int, default=100_000, help="trials per (n, density) group")
    s.add_argument("--r", type=_r_list, default=[None], help="'random' and/or warm-start fractions")
    s.add_argument("--thresholds", type=_fractions, default=_fractions("1/8,1/4,3/10,1/3"))
    s.add_argument("--plateau-cap", type=int)
    s.add_argument("--step-cap", type=int)
    s.set_defaults(func=cmd_sgc)

    s = sub.add_parser("fit", parents=[common], help="exponential fits a*2^(bN) to run/sgc CSVs")
    s.add_argument("--inputs", nargs="+", required=True)
    s.add_argument("--n-min", type=int)
    s.add_argument("--n-max", type=int)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("chr", parents=[common], help="critical Hamming radius from IST-SAT fits")
    s.add_argument("--fits", required=True)
    s.add_argument("--tolerance", type=float, default=0.01)
    s.add_argument("--variant", choices=["rN", "rN/2"], default="rN")
    s.set_defaults(func=cmd_chr)

    s = sub.add_parser("tts", parents=[common], help="time-to-solution exponent table")
    s.add_argument("--fits", required=True)
    s.add_argument("--chr")
    s.add_argument("--tolerance", type=float, default=0.01)
    s.set_defaults(func=cmd_tts)

    s = sub.add_parser("sweep", parents=[common], help="end-to-end pipeline from a JSON sweep spec")
    s.add_argument("--spec", help="JSON file overriding the sweep defaults")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"istsat: error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except StepFailed as exc:
        print(f"istsat: {exc}", file=sys.stderr)
        return exc.code
    except (CapExceeded, ValueError) as exc:
        print(f"istsat: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"istsat: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
