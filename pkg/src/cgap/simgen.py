"""Deterministic gap-stream generators and the measurement table harness.

Each table row draws n gaps from one of two families, parameterized by k:
uniform over the integers [1, 2^k+1], or 1 + Binomial(2^k, 1/2).  The row
reports the per-item cost of the raw binary gaps, the delta-coded stream,
and the entropy measures, in a fixed CSV column order.

Every row is seeded independently (sub-seed = hash of seed/distribution/k),
so rows can be produced in any order or in parallel without changing output.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import codec
from .gapcore import GapStream, gap_measure, h0_gaps, u_h0, z_delta

__all__ = [
    "CSV_HEADER",
    "SimSpec",
    "uniform_gaps",
    "binomial_gaps",
    "rank_universe",
    "table_row",
    "table_csv",
]

CSV_HEADER = "dist,k,n,u,d,gap,gap_zdelta,uh0,nh0g,nh0g_zdelta,nh0g_zdelta_cb"

DISTRIBUTIONS = ("uniform", "binomial")


@dataclass(frozen=True, slots=True)
class SimSpec:
    distribution: str
    k: int
    n: int = 100_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")


def _rng(spec: SimSpec) -> np.random.Generator:
    # sub-seed from a stable hash, not Python's salted hash()
    key = f"{spec.seed}/{spec.distribution}/{spec.k}".encode()
    sub = int.from_bytes(hashlib.sha256(key).digest()[:8], "big")
    return np.random.Generator(np.random.PCG64(sub))


def _stream(gaps: np.ndarray) -> GapStream:
    # universe = sum of gaps, so the largest element is universe-1 and the
    # stream carries no tail
    values = tuple(int(g) for g in gaps)
    return GapStream(values, sum(values), tail_present=True)


def uniform_gaps(spec: SimSpec) -> GapStream:
    """n gaps drawn uniformly from the integers [1, 2^k + 1]."""
    if spec.distribution != "uniform":
        raise ValueError(f"spec is for {spec.distribution!r}")
    return _stream(_rng(spec).integers(1, 2**spec.k + 2, size=spec.n))


def binomial_gaps(spec: SimSpec) -> GapStream:
    """n gaps of the form 1 + Binomial(2^k, 1/2)."""
    if spec.distribution != "binomial":
        raise ValueError(f"spec is for {spec.distribution!r}")
    return _stream(1 + _rng(spec).binomial(2**spec.k, 0.5, size=spec.n))


def generate(spec: SimSpec) -> GapStream:
    return uniform_gaps(spec) if spec.distribution == "uniform" else binomial_gaps(spec)


def rank_universe(gaps: tuple[int, ...], alphabet: int) -> int:
    """Universe size of the stream after frequency-rank relabeling.

    Gap values are renamed by ascending frequency over the whole alphabet
    [1, alphabet]: the most frequent value becomes `alphabet`, down to 1 for
    the rarest, with values that never occur ranking below every realized
    one.  Returns the sum of the renamed gaps, i.e. the universe the set
    occupies after the relabeling.  Ties share a block of adjacent ranks, so
    their order never changes the sum.
    """
    arr = np.asarray(gaps, dtype=np.int64)
    values, counts = np.unique(arr, return_counts=True)
    if alphabet < len(values) or int(values[0]) < 1 or int(values[-1]) > alphabet:
        raise ValueError(f"gap values outside alphabet [1, {alphabet}]")
    order = np.lexsort((values, -counts))
    labels = alphabet - np.arange(len(values), dtype=np.int64)
    return int((counts[order] * labels).sum())


def table_row(spec: SimSpec) -> str:
    """One CSV row of per-item measures for the spec's gap stream."""
    g = generate(spec)
    n = g.n
    counts = Counter(g.gaps)
    d = len(counts)
    cb = codec.build_codebook(g)
    c_length = sum(c * codec.delta_length(cb.ord[v]) for v, c in counts.items())
    cb_bits = d * cb.g_max.bit_length()
    gap_bits = gap_measure(g)
    uh0 = u_h0(n, rank_universe(g.gaps, 2**spec.k + 1))
    cells = (
        gap_bits / n,
        (gap_bits + z_delta(g)) / n,
        uh0 / n,
        h0_gaps(g),
        c_length / n,
        (c_length + cb_bits) / n,
    )
    head = f"{spec.distribution},{spec.k},{n},{g.universe},{d}"
    return head + "".join(f",{x:.5f}" for x in cells)


def table_csv(dist: str, k_min: int, k_max: int, n: int, seed: int) -> str:
    """The full table as CSV text, one row per k, byte-deterministic."""
    if not 1 <= k_min <= k_max:
        raise ValueError(f"need 1 <= k_min <= k_max, got {k_min}..{k_max}")
    rows = [CSV_HEADER]
    for k in range(k_min, k_max + 1):
        rows.append(table_row(SimSpec(dist, k, n, seed)))
    return "\n".join(rows) + "\n"
