"""Shared helpers for the repro scripts (desk-scale defaults, CLI wrapper)."""
import argparse
import os
import sys

from istsat.cli import main

HERE = os.path.dirname(os.path.abspath(__file__))


def parser(name: str, count: int, n_grid: list[int]) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=f"desk-scale reproduction: {name}")
    p.add_argument("--out", default=os.path.join(HERE, "out", name))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--count", type=int, default=count, help="instances per (n, density)")
    p.add_argument("--n", type=int, nargs="+", default=n_grid)
    p.add_argument("--density", type=float, nargs="+", default=[1.5, 2.0, 4.0])
    return p


def cli(args, *argv) -> None:
    full = [str(a) for a in argv] + ["--out", args.out, "--seed", str(args.seed), "--workers", str(args.workers),
                                      "--force"]
    rc = main(full)
    if rc:
        sys.exit(rc)


def path(args, name: str) -> str:
    return os.path.join(args.out, name)


def gen_and_brute(args, label: str = "") -> tuple[str, str]:
    extra = ["--label", label] if label else []
    cli(args, "gen", "--n", *args.n, "--density", *args.density, "--epsilon", 0.1, "--count", args.count, *extra)
    inst = path(args, f"instances{'_' + label if label else ''}.jsonl")
    cli(args, "brute", "--instances", inst, *extra)
    return inst, path(args, f"solutions{'_' + label if label else ''}.jsonl")


def show(args, *names: str) -> None:
    for name in names:
        print(f"== {path(args, name)}")
        with open(path(args, name)) as fh:
            print(fh.read().rstrip())
