"""Bitstring helpers shared by every module.

Convention (used everywhere): variable ``j`` is bit ``j`` of a basis-state
index (little-endian), and character ``j`` of a ``"0/1"`` string.  The spin
of a bit is ``s = 1 - 2*b``.
"""
from __future__ import annotations

from typing import Sequence, Union

import numpy as np

BitLike = Union[str, Sequence[int], np.ndarray]


def as_bits(x: BitLike) -> np.ndarray:
    """Coerce a ``"0/1"`` string or integer sequence to a uint8 bit array."""
    if isinstance(x, str):
        if x.strip("01"):
            raise ValueError(f"not a 0/1 string: {x!r}")
        return np.frombuffer(x.encode(), dtype=np.uint8) - ord("0")
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError("bitstring must be one-dimensional")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("bits must be 0 or 1")
    return arr.astype(np.uint8)


def bits_to_str(bits: BitLike) -> str:
    return "".join("1" if b else "0" for b in as_bits(bits))


def bits_to_index(bits: BitLike) -> int:
    b = as_bits(bits)
    return int(np.sum(b.astype(np.int64) << np.arange(b.size, dtype=np.int64)))


def index_to_bits(z: int, n: int) -> np.ndarray:
    return ((int(z) >> np.arange(n)) & 1).astype(np.uint8)


def indices_to_bits(z: np.ndarray, n: int) -> np.ndarray:
    """Vectorised ``index_to_bits``: shape (m,) -> (m, n)."""
    z = np.asarray(z, dtype=np.int64)
    return ((z[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def spins(bits: BitLike) -> np.ndarray:
    return 1 - 2 * as_bits(bits).astype(np.int8)


def hamming(a: BitLike, b: BitLike) -> int:
    """Number of positions where two equal-length bitstrings differ."""
    a, b = as_bits(a), as_bits(b)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} != {b.size}")
    return int(np.count_nonzero(a != b))


def popcount(z: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(z, dtype=np.uint64)).astype(np.int64)
