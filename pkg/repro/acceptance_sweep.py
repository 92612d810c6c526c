"""The 200-instance sweeps behind acceptance criteria 4-6 (one density per call).

Writes ``acceptance_data/d<density>/`` at the repository root.  Roughly an
hour of single-core time per density with both modes; use --workers.
"""
import argparse
import os
import sys

from istsat.cli import main

HERE = os.path.dirname(os.path.abspath(__file__))

p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
p.add_argument("--density", choices=["4", "2", "1.5"], nargs="+", default=["4", "2", "1.5"])
p.add_argument("--workers", type=int, default=1)
args = p.parse_args()
for d in args.density:
    rc = main(["sweep", "--spec", os.path.join(HERE, "specs", f"acceptance_d{d}.json"),
               "--out", os.path.join(HERE, "..", "acceptance_data", f"d{d}"), "--seed", "0", "--force",
               "--workers", str(args.workers)])
    if rc:
        sys.exit(rc)
