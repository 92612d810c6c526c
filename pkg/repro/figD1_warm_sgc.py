"""Warm-started SGC: P_GS versus n for guessing errors r in [1/16, 1/3]."""
from _common import cli, parser, path, show

args = parser("figD1", 20, [16, 24, 32, 40, 48]).parse_args()
cli(args, "gen", "--n", *args.n, "--density", *args.density, "--epsilon", 0.1, "--count", args.count)
cli(args, "sgc", "--instances", path(args, "instances.jsonl"), "--trials", 100_000,
    "--r", "1/16,1/8,1/4,3/10,1/3")
cli(args, "fit", "--inputs", path(args, "sgc.csv"))
show(args, "fits.csv")
