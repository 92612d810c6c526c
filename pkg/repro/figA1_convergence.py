"""IST-SAT convergence: P(D_H <= rN) measured against the nearest solution
(CLI output) and against the planted string (library call), plus iteration
traces from the feedback loop."""
import csv

import numpy as np

from _common import cli, gen_and_brute, parser, path, show
from istsat.analysis import fit_exponential, fmt_fraction
from istsat.instance import diagonal_energies, read_instances
from istsat.pipeline import pattern_for
from istsat.protocol import RunConfig, hamming_profile, run_windowed

R = [0, 1 / 8, 1 / 4, 3 / 10, 1 / 3]
args = parser("figA1", 20, [8, 10, 12]).parse_args()
inst_path, sols = gen_and_brute(args)
cli(args, "run", "--mode", "istsat", "--instances", inst_path, "--solutions", sols, "--r", "0,1/8,1/4,3/10,1/3")
cli(args, "run", "--mode", "istsat-iterate", "--instances", inst_path, "--solutions", sols, "--r", "1/8,1/4,1/3",
    "--iters", 10, "--shots", 200)
cli(args, "fit", "--inputs", path(args, "run_istsat.csv"))

cfg = RunConfig(seed=args.seed)
acc: dict = {}
for inst in read_instances(inst_path):
    e = diagonal_energies(inst)
    for r in R:
        dist = run_windowed(inst, pattern_for(inst, r, args.seed), cfg, energies=e).mean_probs
        p = hamming_profile(dist, inst.planted, [r]).p_rn[0]
        acc.setdefault((inst.density, r), {}).setdefault(inst.n, []).append(p)
with open(path(args, "planted_profile.csv"), "w", newline="") as fh:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["density", "r", "n", "mean_probability", "b"])
    for (dens, r), by_n in sorted(acc.items()):
        pts = [(n, float(np.mean(v))) for n, v in sorted(by_n.items())]
        b = fit_exponential(pts).b
        for n, p in pts:
            w.writerow([dens, fmt_fraction(r), n, repr(p), repr(b)])
show(args, "fits.csv", "planted_profile.csv")
