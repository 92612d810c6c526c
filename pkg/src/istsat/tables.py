"""CSV/JSONL persistence.  Every CSV starts with a ``#`` provenance line
(tool version and a hash of the producing configuration), then a header."""
from __future__ import annotations

import csv
import hashlib
import json
import os
from typing import Iterable, Sequence

from . import __version__


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else str(x)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], command: str, config: dict) -> int:
    count = 0
    with open(path, "w", newline="") as fh:
        fh.write(f"# istsat {__version__} command={command} config={config_hash(config)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
            count += 1
    return count


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def read_provenance(path) -> str:
    with open(path) as fh:
        first = fh.readline()
    return first[2:].strip() if first.startswith("#") else ""


def write_jsonl(path, lines: Iterable[str]) -> int:
    count = 0
    with open(path, "w") as fh:
        for line in lines:
            fh.write(line + "\n")
            count += 1
    return count


def check_writable(path, force: bool) -> None:
    if os.path.exists(path) and not force:
        raise FileExistsError(f"{path} exists; pass --force to overwrite")
