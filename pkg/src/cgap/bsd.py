"""Binary-searchable dictionary: a blocked, gap-encoded sorted set.

Elements are grouped into blocks of t = ceil(log2 universe).  Each block
stores its first element explicitly (heads) and a bit pointer to the codeword
of its second element's gap; the first gap of a block is never encoded, since
the head already carries that information.  rank binary-searches the heads
and decodes at most t-1 codewords; select decodes exactly i mod t.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .codec import BitWriter, Codebook, EncodedStream, _delta_pair, delta_read
from .gapcore import SortedSet

__all__ = ["Bsd", "QueryStats", "bsd_build", "bsd_rank", "bsd_select", "bsd_elements"]


@dataclass(slots=True)
class QueryStats:
    """Instrumentation tallies: codewords decoded and candidate blocks probed."""

    decoded: int = 0
    probes: int = 0


@dataclass(frozen=True, slots=True)
class Bsd:
    universe: int
    n: int
    t: int
    heads: tuple[int, ...]
    ptrs: tuple[int, ...]
    stream: EncodedStream
    cb: Codebook


def bsd_build(s: SortedSet, cb: Codebook) -> Bsd:
    """Block-encode a set (usually block-relative values) against a codebook."""
    if s.n == 0:
        raise ValueError("cannot build a dictionary over an empty set")
    t = max(1, (s.universe - 1).bit_length())
    elements = s.elements
    heads = []
    ptrs = []
    w = BitWriter()
    pairs = {v: _delta_pair(r) for v, r in cb.ord.items()}
    try:
        for start in range(0, s.n, t):
            heads.append(elements[start])
            ptrs.append(w.bit_length)
            for i in range(start + 1, min(start + t, s.n)):
                value, width = pairs[elements[i] - elements[i - 1]]
                w.write(value, width)
    except KeyError:
        gap = elements[i] - elements[i - 1]
        raise ValueError(f"gap {gap} not present in codebook") from None
    stream = EncodedStream(w.getvalue(), w.bit_length, s.n - len(heads))
    return Bsd(s.universe, s.n, t, tuple(heads), tuple(ptrs), stream, cb)


def bsd_select(b: Bsd, i: int, stats: QueryStats | None = None) -> int:
    """The (i+1)-th smallest element; decodes exactly i mod t codewords."""
    if not 0 <= i < b.n:
        raise IndexError(f"select index {i} out of range [0, {b.n})")
    blk, rem = divmod(i, b.t)
    q = b.heads[blk]
    pos = b.ptrs[blk]
    data, limit, d_arr = b.stream.data, b.stream.bit_len, b.cb.D
    for _ in range(rem):
        rank, pos = delta_read(data, pos, limit)
        q += d_arr[rank - 1]
    if stats is not None:
        stats.decoded += rem
    return q


def bsd_rank(b: Bsd, x: int, stats: QueryStats | None = None) -> int:
    """Number of elements <= x (inclusive rank)."""
    if not 0 <= x < b.universe:
        raise IndexError(f"rank argument {x} out of range [0, {b.universe})")
    if x < b.heads[0]:
        return 0
    blk = bisect_right(b.heads, x) - 1
    base = blk * b.t
    q = b.heads[blk]
    if q == x:
        return base + 1
    block_len = min(b.t, b.n - base)
    pos = b.ptrs[blk]
    data, limit, d_arr = b.stream.data, b.stream.bit_len, b.cb.D
    decoded = 0
    result = base + block_len
    for j in range(1, block_len):
        rank, pos = delta_read(data, pos, limit)
        q += d_arr[rank - 1]
        decoded = j
        if q == x:
            result = base + j + 1
            break
        if q > x:
            result = base + j
            break
    if stats is not None:
        stats.decoded += decoded
    return result


def bsd_elements(b: Bsd) -> list[int]:
    """Decode the whole set back out (testing and reconstruction)."""
    out = []
    data, limit, d_arr = b.stream.data, b.stream.bit_len, b.cb.D
    pos = 0
    for blk, head in enumerate(b.heads):
        q = head
        out.append(q)
        for _ in range(min(b.t, b.n - blk * b.t) - 1):
            rank, pos = delta_read(data, pos, limit)
            q += d_arr[rank - 1]
            out.append(q)
    return out
