"""Exponential scaling fits P(N) = a * 2**(b N), TTS composition and critical
Hamming radius estimation."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    residual: float  # RMS of log2-space residuals
    n_min: int
    n_max: int
    points_used: int
    points_excluded: int = 0

    @property
    def n_range(self) -> tuple[int, int]:
        return (self.n_min, self.n_max)


def fit_exponential(points: Iterable[tuple[float, float]]) -> FitResult:
    """Least squares of log2(P) against n.  Zero-probability points are dropped and counted."""
    pts = [(float(n), float(p)) for n, p in points]
    keep = [(n, p) for n, p in pts if p > 0]
    if len(keep) < 2:
        raise ValueError(f"need at least 2 points with P > 0, got {len(keep)}")
    ns = np.array([n for n, _ in keep])
    ys = np.log2([p for _, p in keep])
    if np.ptp(ns) == 0:
        raise ValueError("fit needs at least two distinct n")
    A = np.column_stack([ns, np.ones_like(ns)])
    (b, log_a), *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = ys - (b * ns + log_a)
    return FitResult(
        a=float(2.0**log_a),
        b=float(b),
        residual=float(np.sqrt(np.mean(resid**2))),
        n_min=int(ns.min()),
        n_max=int(ns.max()),
        points_used=len(keep),
        points_excluded=len(pts) - len(keep),
    )


def _exponent(x) -> float:
    return x.b if isinstance(x, FitResult) else float(x)


def as_fraction(x) -> Fraction:
    return Fraction(x).limit_denominator(1000)


def compose_tts(seed_fit, downstream_fit, d, r) -> float:
    """Exponent of a two-stage pipeline: seed exponent at distance d plus the
    downstream exponent at guessing error r (which must equal d)."""
    if as_fraction(d) != as_fraction(r):
        raise ValueError(f"seed distance d={d} does not match downstream guessing error r={r}")
    return _exponent(seed_fit) + _exponent(downstream_fit)


@dataclass
class ChrResult:
    r_c: Fraction | None
    table: list[tuple[Fraction, float]]
    tolerance: float


def estimate_chr(fits: Mapping, tolerance: float = 0.01) -> ChrResult:
    """Largest grid r whose fitted exponent satisfies b >= -tolerance (None if no r does)."""
    if not fits:
        raise ValueError("empty r grid")
    table = sorted((as_fraction(r), _exponent(f)) for r, f in fits.items())
    ok = [r for r, b in table if b >= -tolerance]
    return ChrResult(max(ok) if ok else None, table, tolerance)


PIPELINES = ("SGC", "TAQC", "TAQC->SGC", "TAQC->IST-SAT")


@dataclass
class TtsRow:
    pipeline: str
    density: float
    b: float | None
    detail: str = ""


def tts_table(
    density: float,
    sgc_pgs: float | None,
    taqc_by_d: Mapping,
    warm_sgc_by_r: Mapping | None = None,
    r_c=None,
) -> list[TtsRow]:
    """Four pipeline rows for one density.

    ``taqc_by_d`` maps approximation distance d (0 for P_GS) to the TAQC
    exponent; ``warm_sgc_by_r`` maps warm-start r to warm SGC P_GS exponents.
    TAQC->SGC takes the best d = r composition; TAQC->IST-SAT is the TAQC
    exponent at d = r_c (IST-SAT contributes ~0 inside its critical radius).
    """
    taqc = {as_fraction(d): _exponent(f) for d, f in taqc_by_d.items()}
    rows = [
        TtsRow("SGC", density, None if sgc_pgs is None else _exponent(sgc_pgs)),
        TtsRow("TAQC", density, taqc.get(Fraction(0))),
    ]
    best = None
    for r, f in sorted((as_fraction(r), f) for r, f in (warm_sgc_by_r or {}).items()):
        if r in taqc and r > 0:
            b = compose_tts(taqc[r], f, r, r)
            if best is None or b > best[0]:
                best = (b, r)
    rows.append(TtsRow("TAQC->SGC", density, None if best is None else best[0],
                       "" if best is None else f"d=r={best[1]}"))
    if r_c is not None and as_fraction(r_c) in taqc:
        rc = as_fraction(r_c)
        rows.append(TtsRow("TAQC->IST-SAT", density, compose_tts(taqc[rc], 0.0, rc, rc), f"d=r_c={rc}"))
    else:
        rows.append(TtsRow("TAQC->IST-SAT", density, None, "no critical radius"))
    return rows


def group_means(rows: Iterable[dict], keys: tuple[str, ...], value: str = "probability") -> dict:
    """Mean of ``value`` per (keys..., n) group."""
    acc: dict = {}
    for row in rows:
        k = tuple(row[c] for c in keys) + (int(row["n"]),)
        s = acc.setdefault(k, [0.0, 0])
        s[0] += float(row[value])
        s[1] += 1
    return {k: s / c for k, (s, c) in acc.items()}


def fit_groups(means: Mapping[tuple, float], n_min: int | None = None, n_max: int | None = None) -> dict:
    """Fit every group of ``means`` (keyed (..., n)) over the selected n range."""
    by_group: dict = {}
    for key, p in means.items():
        *head, n = key
        if (n_min is not None and n < n_min) or (n_max is not None and n > n_max):
            continue
        by_group.setdefault(tuple(head), []).append((n, p))
    out = {}
    for g, pts in sorted(by_group.items(), key=lambda kv: tuple(str(x) for x in kv[0])):
        try:
            out[g] = fit_exponential(sorted(pts))
        except ValueError:
            out[g] = None
    return out


def fmt_fraction(x) -> str:
    f = as_fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_fraction(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        a, b = s.split("/")
        return Fraction(int(a), int(b))
    return as_fraction(float(s))
