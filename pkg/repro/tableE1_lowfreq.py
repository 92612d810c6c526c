"""Fits for IST-SAT under the low-frequency drive, both threshold variants."""
from _common import cli, gen_and_brute, parser, path, show

args = parser("tableE1", 30, [8, 10, 12, 14]).parse_args()
inst, sols = gen_and_brute(args)
cli(args, "run", "--mode", "istsat", "--preset", "lowfreq", "--instances", inst, "--solutions", sols,
    "--r", "0,1/8,1/4,3/10,1/3")
cli(args, "fit", "--inputs", path(args, "run_istsat.csv"))
cli(args, "chr", "--fits", path(args, "fits.csv"))
show(args, "fits.csv", "chr.csv")
