"""Mean sampled energy over ground energy, one IST-SAT iteration with the
low-frequency drive versus TAQC, 10^4 shots per run."""
from _common import cli, gen_and_brute, parser, show

args = parser("fig3", 20, [8, 10, 12, 14]).parse_args()
inst, sols = gen_and_brute(args)
common = ["--instances", inst, "--solutions", sols, "--analysis-mode", "sampled", "--shots", 10_000,
          "--preset", "lowfreq"]
cli(args, "run", "--mode", "istsat", "--r", "0,1/8,1/4,1/3", *common)
cli(args, "run", "--mode", "taqc", *common)
show(args, "energy_taqc.csv")
