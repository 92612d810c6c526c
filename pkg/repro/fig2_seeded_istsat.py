"""IST-SAT seeded with patterns at guessing error r: P(D_H <= rN/2) versus n,
with fits per (density, r).  Desk scale: n in 8..14, 30 instances."""
from _common import cli, gen_and_brute, parser, path, show

args = parser("fig2", 30, [8, 10, 12, 14]).parse_args()
inst, sols = gen_and_brute(args)
cli(args, "run", "--mode", "istsat", "--instances", inst, "--solutions", sols, "--r", "0,1/8,1/4,3/10,1/3",
    "--thresholds", "0,1/8,1/4,3/10,1/3")
cli(args, "fit", "--inputs", path(args, "run_istsat.csv"))
show(args, "fits.csv")
