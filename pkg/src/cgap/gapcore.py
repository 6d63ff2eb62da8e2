"""Sorted sets, gap streams, and the data-aware size measures defined on them.

A set S = {s_1 < ... < s_n} over the universe {0, ..., u-1} is carried around
as its gap stream g_1 = s_1 + 1, g_i = s_i - s_{i-1}.  When u-1 is not an
element, the distance from the last element to the end of the universe is kept
out of the stream proper and stored as a separate tail gap, so that every g_i
corresponds to exactly one element.  All logarithms are base 2.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import gmpy2

__all__ = [
    "SortedSet",
    "GapStream",
    "MeasureReport",
    "gaps_from_set",
    "set_from_gaps",
    "gap_measure",
    "z_gamma",
    "z_delta",
    "h0_gaps",
    "binom_bound",
    "u_h0",
    "measure_report",
]

_LN2 = math.log(2)


@dataclass(frozen=True, slots=True)
class SortedSet:
    """Strictly increasing integers drawn from {0, ..., universe-1}."""

    universe: int
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.universe < 1:
            raise ValueError(f"universe must be positive, got {self.universe}")
        prev = -1
        for e in self.elements:
            if e <= prev:
                raise ValueError(f"elements not strictly increasing at value {e}")
            prev = e
        if self.elements and self.elements[-1] >= self.universe:
            raise ValueError(
                f"element {self.elements[-1]} outside universe {self.universe}"
            )

    @property
    def n(self) -> int:
        return len(self.elements)


@dataclass(frozen=True, slots=True)
class GapStream:
    """The gaps g_1..g_n plus universe and tail metadata.

    tail_present records whether universe-1 is an element.  When it is not,
    tail_gap holds the remaining distance (universe-1) - s_n, or the whole
    universe for an empty stream.  Invariant: sum(gaps) + (tail_gap or 0)
    equals universe.
    """

    gaps: tuple[int, ...]
    universe: int
    tail_present: bool
    tail_gap: int | None = None

    def __post_init__(self) -> None:
        if self.universe < 1:
            raise ValueError(f"universe must be positive, got {self.universe}")
        total = 0
        for g in self.gaps:
            if g < 1:
                raise ValueError(f"gaps must be positive, got {g}")
            total += g
        if self.tail_present:
            if not self.gaps:
                raise ValueError("empty stream cannot contain universe-1")
            if self.tail_gap is not None:
                raise ValueError("tail_gap must be absent when universe-1 is an element")
            if total != self.universe:
                raise ValueError(
                    f"gaps sum to {total}, expected universe {self.universe}"
                )
        else:
            if self.tail_gap is None or self.tail_gap < 1:
                raise ValueError("tail_gap required when universe-1 is not an element")
            if total + self.tail_gap != self.universe:
                raise ValueError(
                    f"gaps plus tail sum to {total + self.tail_gap}, "
                    f"expected universe {self.universe}"
                )

    @property
    def n(self) -> int:
        return len(self.gaps)


@dataclass(frozen=True, slots=True)
class MeasureReport:
    """Every size measure for one set, in total bits.

    Real-valued entropy measures (u_h0_bits, n_h0_g_bits) are floats; the
    rest are exact integers.  flag_bits is the single bit recording whether
    universe-1 is an element; tail_bits is the binary cost of the tail gap
    when one exists.  Neither is folded into gap_bits: the measures below
    range over the n element gaps only.
    """

    u: int
    n: int
    d: int
    g_max: int
    gap_bits: int
    z_gamma_bits: int
    z_delta_bits: int
    binom_bound_bits: int
    u_h0_bits: float
    n_h0_g_bits: float
    c_length_bits: int
    huffman_bits: int
    cb_bits: int
    flag_bits: int = 1
    tail_bits: int = 0

    # per-item projections
    @property
    def gap_per_item(self) -> float:
        return self.gap_bits / self.n

    @property
    def z_gamma_per_item(self) -> float:
        return self.z_gamma_bits / self.n

    @property
    def z_delta_per_item(self) -> float:
        return self.z_delta_bits / self.n

    @property
    def binom_bound_per_item(self) -> float:
        return self.binom_bound_bits / self.n

    @property
    def u_h0_per_item(self) -> float:
        return self.u_h0_bits / self.n

    @property
    def n_h0_g_per_item(self) -> float:
        return self.n_h0_g_bits / self.n

    @property
    def c_length_per_item(self) -> float:
        return self.c_length_bits / self.n

    @property
    def huffman_per_item(self) -> float:
        return self.huffman_bits / self.n

    @property
    def cb_per_item(self) -> float:
        return self.cb_bits / self.n


def gaps_from_set(s: SortedSet) -> GapStream:
    """Convert a set to its gap stream; empty sets give the empty stream."""
    if s.n == 0:
        return GapStream((), s.universe, tail_present=False, tail_gap=s.universe)
    gaps = [s.elements[0] + 1]
    for i in range(1, s.n):
        gaps.append(s.elements[i] - s.elements[i - 1])
    last = s.elements[-1]
    if last == s.universe - 1:
        return GapStream(tuple(gaps), s.universe, tail_present=True)
    return GapStream(
        tuple(gaps), s.universe, tail_present=False, tail_gap=s.universe - 1 - last
    )


def set_from_gaps(g: GapStream) -> SortedSet:
    """Inverse of gaps_from_set."""
    elements = []
    pos = -1
    for gap in g.gaps:
        pos += gap
        elements.append(pos)
    return SortedSet(g.universe, tuple(elements))


def gap_measure(g: GapStream) -> int:
    """sum of floor(log2 g_i) + 1 over the element gaps (0 for the empty stream)."""
    return sum(gap.bit_length() for gap in g.gaps)


def z_gamma(g: GapStream) -> int:
    """Gamma-code overhead beyond gap_measure: one unary bit per binary bit."""
    return gap_measure(g) - g.n


def z_delta(g: GapStream) -> int:
    """Delta-code overhead: 2 * sum of floor(log2(floor(log2 g_i) + 1))."""
    return 2 * sum(gap.bit_length().bit_length() - 1 for gap in g.gaps)


def h0_gaps(g: GapStream) -> float:
    """Zero-order empirical entropy of the gap values, in bits per gap."""
    n = g.n
    if n == 0:
        return 0.0
    counts = Counter(g.gaps)
    if len(counts) == 1:
        return 0.0
    return math.log2(n) - sum(c * math.log2(c) for c in counts.values()) / n


def binom_bound(n: int, u: int) -> int:
    """ceil(log2 C(u, n)), the information-theoretic minimum for an n-subset.

    Exact for all inputs: small universes go through math.comb; larger ones
    use interval arithmetic over gmpy2's arbitrary-precision lgamma, falling
    back to the exact product only if an interval straddles an integer.
    """
    if not 0 <= n <= u:
        raise ValueError(f"need 0 <= n <= u, got n={n}, u={u}")
    if n == 0 or n == u:
        return 0
    if n == 1 or n == u - 1:
        return (u - 1).bit_length()
    if u <= 4096:
        return (math.comb(u, n) - 1).bit_length()
    for prec in (96, 192, 384, 768):
        with gmpy2.context(precision=prec):
            a = gmpy2.lgamma(u + 1)[0]
            b = gmpy2.lgamma(n + 1)[0]
            c = gmpy2.lgamma(u - n + 1)[0]
            x = (a - b - c) / gmpy2.log(2)
            # generous rounding-error envelope: a few ulps per term
            err = (abs(a) + abs(b) + abs(c)) * gmpy2.exp2(8 - prec)
            lo = gmpy2.ceil(x - err)
            hi = gmpy2.ceil(x + err)
            if lo == hi:
                return int(lo)
    return (int(gmpy2.comb(u, n)) - 1).bit_length()


def u_h0(n: int, u: int) -> float:
    """u times the zero-order entropy of the set's characteristic bitvector."""
    if not 0 <= n <= u:
        raise ValueError(f"need 0 <= n <= u, got n={n}, u={u}")
    if n == 0 or n == u:
        return 0.0
    return n * math.log2(u / n) + (u - n) * math.log2(u / (u - n))


def measure_report(s: SortedSet) -> MeasureReport:
    """Evaluate every measure on one set (requires n >= 1)."""
    # codec lives downstream of this module; import at call time
    from . import codec

    if s.n == 0:
        raise ValueError("measure_report requires a nonempty set")
    g = gaps_from_set(s)
    counts = Counter(g.gaps)
    d = len(counts)
    g_max = max(counts)
    cb = codec.build_codebook(g)
    c_length = sum(c * codec.delta_length(cb.ord[v]) for v, c in counts.items())
    book = codec.huffman_build(g)
    cb_bits = d * g_max.bit_length()
    return MeasureReport(
        u=s.universe,
        n=s.n,
        d=d,
        g_max=g_max,
        gap_bits=gap_measure(g),
        z_gamma_bits=z_gamma(g),
        z_delta_bits=z_delta(g),
        binom_bound_bits=binom_bound(s.n, s.universe),
        u_h0_bits=u_h0(s.n, s.universe),
        n_h0_g_bits=s.n * h0_gaps(g),
        c_length_bits=c_length,
        huffman_bits=book.stream_bits,
        cb_bits=cb_bits,
        flag_bits=1,
        tail_bits=0 if g.tail_present else g.tail_gap.bit_length(),
    )
