"""TAQC approximation profiles P(D_H <= dN) versus n, with fits per d."""
from _common import cli, gen_and_brute, parser, path, show

args = parser("figB1", 30, [8, 10, 12, 14]).parse_args()
inst, sols = gen_and_brute(args)
cli(args, "run", "--mode", "taqc", "--instances", inst, "--solutions", sols,
    "--thresholds", "0,1/16,1/8,1/4,3/10,1/3")
cli(args, "fit", "--inputs", path(args, "run_taqc.csv"))
show(args, "fits.csv")
