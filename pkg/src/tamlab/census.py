"""Exhaustive census of short Weierstrass curves of bounded height.

Every nonsingular integer pair (a4, a6) with max(4|a4|^3, 27 a6^2) <= X is
counted, non-minimal models and isomorphic duplicates included.  Work is
split into contiguous a4 intervals; partial results are merged in shard
order, so the outcome does not depend on the number of shards or workers.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .arith import factorize
from .curves import HeightBound, enumerate_curves, to_long_model
from .generic_tate import generic_tate
from .heights import NOT_CONVENIENT, archimedean_case
from .tate import classify

DEFAULT_TAM_CEILING = 10**6
# height bounds above this need allow_large=True
DESK_SCALE = 10**7


@dataclass
class CensusResult:
    X: int
    n_total: int = 0
    tam_histogram: dict[int, int] = field(default_factory=dict)
    overflow: int = 0  # curves with Tam above the ceiling (not in the histogram)
    s_tam: int = 0
    n_minimal: int = 0
    n_convenient: int = 0
    n_one_component: int = 0
    oracle_checked: int = 0
    oracle_mismatches: list = field(default_factory=list)
    tam_ceiling: int = DEFAULT_TAM_CEILING
    wall_time: float = field(default=0.0, compare=False)
    shard_count: int = field(default=1, compare=False)

    def merge(self, other: "CensusResult") -> None:
        self.n_total += other.n_total
        for m, k in sorted(other.tam_histogram.items()):
            self.tam_histogram[m] = self.tam_histogram.get(m, 0) + k
        self.overflow += other.overflow
        self.s_tam += other.s_tam
        self.n_minimal += other.n_minimal
        self.n_convenient += other.n_convenient
        self.n_one_component += other.n_one_component
        self.oracle_checked += other.oracle_checked
        self.oracle_mismatches.extend(other.oracle_mismatches)

    def ratio(self, m: int) -> float:
        return self.tam_histogram.get(m, 0) / self.n_total

    @property
    def average_tamagawa(self) -> float:
        return self.s_tam / self.n_total

    @property
    def convenient_ratio(self) -> float:
        return self.n_convenient / self.n_total

    @property
    def minimal_ratio(self) -> float:
        return self.n_minimal / self.n_total

    def to_json(self) -> dict:
        return {
            "X": self.X,
            "n_total": self.n_total,
            "tam_histogram": {str(m): k for m, k in sorted(self.tam_histogram.items())},
            "overflow": self.overflow,
            "s_tam": self.s_tam,
            "n_minimal": self.n_minimal,
            "n_convenient": self.n_convenient,
            "n_one_component": self.n_one_component,
            "oracle_checked": self.oracle_checked,
            "oracle_mismatches": self.oracle_mismatches,
            "tam_ceiling": self.tam_ceiling,
            "wall_time": self.wall_time,
            "shard_count": self.shard_count,
        }

    def csv_rows(self) -> list[tuple]:
        """(X, m, N_m, N, ratio) per histogram key, ratio to 10 places."""
        rows = [(self.X, m, k, self.n_total, f"{k / self.n_total:.10f}")
                for m, k in sorted(self.tam_histogram.items())]
        if self.overflow:
            rows.append((self.X, "overflow", self.overflow, self.n_total,
                         f"{self.overflow / self.n_total:.10f}"))
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("X", "m", "N_m", "N", "ratio"))
        w.writerows(self.csv_rows())
        return buf.getvalue()


def factor_discriminant(delta: int) -> list[tuple[int, int]]:
    """Prime factorisation of |delta|."""
    if delta == 0:
        raise ValueError("zero discriminant")
    return factorize(abs(delta))


def _sampled(a4: int, a6: int, rate: float) -> bool:
    if rate <= 0:
        return False
    h = hashlib.blake2b(f"{a4},{a6}".encode(), digest_size=8).digest()
    return int.from_bytes(h, "big") < rate * 2**64


def _run_shard(X: int, lo: int, hi: int, tam_ceiling: int, rate: float) -> CensusResult:
    out = CensusResult(X, tam_ceiling=tam_ceiling)
    hist: Counter = Counter()
    for curve in enumerate_curves(X, (lo, hi)):
        tam, minimal = 1, True
        rows = [classify(curve, p) for p, _ in factor_discriminant(curve.discriminant)]
        for r in rows:
            tam *= r.c_p
            minimal = minimal and r.short_minimal
        out.n_total += 1
        out.s_tam += tam
        if tam > tam_ceiling:
            out.overflow += 1
        else:
            hist[tam] += 1
        if minimal:
            out.n_minimal += 1
            if tam == 1:
                case = archimedean_case(curve.a4, curve.a6)
                if case != NOT_CONVENIENT:
                    out.n_convenient += 1
                    out.n_one_component += case == "one-component"
        if _sampled(curve.a4, curve.a6, rate):
            out.oracle_checked += 1
            model = to_long_model(curve)
            for r in rows:
                g = generic_tate(model, r.p)
                if g.key() != r.key() or g.short_minimal != r.short_minimal:
                    out.oracle_mismatches.append([curve.a4, curve.a6, r.p])
    out.tam_histogram = dict(sorted(hist.items()))
    return out


def shard_ranges(X: int, shards: int) -> list[tuple[int, int]]:
    """Split [-a4_max, a4_max] into ``shards`` contiguous, possibly empty, intervals."""
    if shards < 1:
        raise ValueError("shards must be positive")
    m = HeightBound(X).a4_max
    lo, n = -m, 2 * m + 1
    cuts = [lo + (n * k) // shards for k in range(shards + 1)]
    return [(cuts[k], cuts[k + 1] - 1) for k in range(shards)]


def default_workers() -> int:
    env = os.environ.get("TAMLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_census(
    X: int,
    shards: int = 1,
    workers: int = 1,
    tam_ceiling: int = DEFAULT_TAM_CEILING,
    sample_oracle_rate: float = 0.0,
    allow_large: bool = False,
) -> CensusResult:
    """Aggregate N, N_m, S_Tam, N_min and N_c over all curves of height <= X.

    ``workers`` bounds the number of processes used; shards are merged in
    order so neither parameter changes the result.
    """
    if X < 1:
        raise ValueError("X must be at least 1")
    if X > DESK_SCALE and not allow_large:
        raise ValueError(f"X = {X} exceeds {DESK_SCALE}; pass allow_large to run it")
    start = time.perf_counter()
    ranges = shard_ranges(X, shards)
    args = [(X, lo, hi, tam_ceiling, sample_oracle_rate) for lo, hi in ranges]
    if workers <= 1 or shards == 1:
        parts = [_run_shard(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, shards)) as pool:
            parts = list(pool.map(_run_shard, *zip(*args)))
    total = CensusResult(X, tam_ceiling=tam_ceiling)
    for part in parts:
        total.merge(part)
    total.tam_histogram = dict(sorted(total.tam_histogram.items()))
    total.wall_time = time.perf_counter() - start
    total.shard_count = shards
    return total


def write_result(result: CensusResult, path: str, fmt: str = "json") -> None:
    with open(path, "w") as fh:
        if fmt == "csv":
            fh.write(result.to_csv())
        else:
            json.dump(result.to_json(), fh, indent=2)
            fh.write("\n")


def census_summary(result: CensusResult) -> dict:
    """The table quantities: N_m / N for m = 1, 2, 3, S_Tam / N, N_c / N, N_min / N."""
    return {
        "X": result.X,
        "N": result.n_total,
        "N1/N": result.ratio(1),
        "N2/N": result.ratio(2),
        "N3/N": result.ratio(3),
        "S_Tam/N": result.average_tamagawa,
        "N_c/N": result.convenient_ratio,
        "N_min/N": result.minimal_ratio,
    }
