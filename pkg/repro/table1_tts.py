"""TTS exponents for SGC, TAQC, TAQC->SGC and TAQC->IST-SAT from one sweep."""
import json
import os

from _common import cli, parser, path, show

args = parser("table1", 20, [8, 10, 12, 14]).parse_args()
spec = {
    "n_grid": args.n, "densities": args.density, "count": args.count,
    "modes": ["taqc", "istsat", "sgc"],
    "r_grid": "0,1/8,1/4,3/10,1/3", "thresholds": "0,1/8,1/4,3/10,1/3",
    "sgc_n_grid": [16, 24, 32, 40, 48], "sgc_count": args.count, "sgc_trials": 100_000,
    "sgc_r": "random,1/8,1/4,3/10,1/3",
}
os.makedirs(args.out, exist_ok=True)
with open(path(args, "sweep.json"), "w") as fh:
    json.dump(spec, fh, indent=1)
cli(args, "sweep", "--spec", path(args, "sweep.json"))
show(args, "chr.csv", "tts.csv")
