"""SGC from random starts: P(D_H <= dN) + P_GS relative to the planted string."""
from _common import cli, parser, path, show

args = parser("figC1", 20, [16, 24, 32, 40, 48]).parse_args()
cli(args, "gen", "--n", *args.n, "--density", *args.density, "--epsilon", 0.1, "--count", args.count)
cli(args, "sgc", "--instances", path(args, "instances.jsonl"), "--trials", 100_000, "--r", "random",
    "--thresholds", "1/16,1/8,1/4,3/10,1/3")
cli(args, "fit", "--inputs", path(args, "sgc.csv"))
show(args, "fits.csv")
