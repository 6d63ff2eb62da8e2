"""Elias gamma/delta codes, the frequency-ordered gap codebook, and Huffman.

Bit sequences are most-significant-bit-first within bytes, zero padded at the
byte boundary; that layout is shared with the index container.  Decoding works
on a fixed 136-bit window (17 bytes) pulled once per codeword: wide enough for
any delta codeword this package can emit plus a worst-case 7-bit offset, so
every decode is a constant number of window reads.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass

from .gapcore import GapStream

__all__ = [
    "BitWriter",
    "Codebook",
    "EncodedStream",
    "HuffmanBook",
    "gamma_encode",
    "gamma_decode",
    "delta_encode",
    "delta_decode",
    "gamma_length",
    "delta_length",
    "delta_read",
    "read_bits",
    "build_codebook",
    "encode_stream",
    "decode_at",
    "decode_all",
    "huffman_build",
    "huffman_encode",
    "huffman_decode",
]

_WINDOW_BYTES = 17


class BitWriter:
    """Accumulates fixed-width big-endian bit fields into bytes."""

    __slots__ = ("_acc", "_nbits", "_out")

    def __init__(self) -> None:
        self._acc = 0
        self._nbits = 0
        self._out = bytearray()

    def write(self, value: int, width: int) -> None:
        self._acc = (self._acc << width) | (value & ((1 << width) - 1))
        self._nbits += width
        while self._nbits >= 8:
            self._nbits -= 8
            self._out.append((self._acc >> self._nbits) & 0xFF)
        self._acc &= (1 << self._nbits) - 1

    @property
    def bit_length(self) -> int:
        return len(self._out) * 8 + self._nbits

    def getvalue(self) -> bytes:
        if self._nbits:
            return bytes(self._out) + bytes([(self._acc << (8 - self._nbits)) & 0xFF])
        return bytes(self._out)


def read_bits(data: bytes, pos: int, width: int) -> int:
    """Read a fixed-width big-endian field starting at bit position pos."""
    if width == 0:
        return 0
    end = pos + width
    first = pos >> 3
    last = (end + 7) >> 3
    word = int.from_bytes(data[first:last], "big")
    return (word >> ((last << 3) - end)) & ((1 << width) - 1)


# ---------------------------------------------------------------- Elias codes

def gamma_length(x: int) -> int:
    """Codeword length of gamma(x)."""
    return 2 * x.bit_length() - 1


def delta_length(x: int) -> int:
    """Codeword length of delta(x)."""
    m = x.bit_length()
    return 2 * (m.bit_length() - 1) + m


def _gamma_pair(x: int) -> tuple[int, int]:
    # gamma(x) as (value, width): the integer x written in 2*floor(log x)+1
    # bits is exactly "zeros, 1, low bits"
    return x, 2 * x.bit_length() - 1


def _delta_pair(x: int) -> tuple[int, int]:
    m = x.bit_length()
    value = (m << (m - 1)) | (x & ((1 << (m - 1)) - 1))
    return value, 2 * (m.bit_length() - 1) + m


def gamma_encode(x: int) -> str:
    """Elias gamma codeword of x >= 1 as a bit string."""
    if x < 1:
        raise ValueError(f"gamma is defined for positive integers, got {x}")
    value, width = _gamma_pair(x)
    return format(value, f"0{width}b")


def delta_encode(x: int) -> str:
    """Elias delta codeword of x >= 1 as a bit string."""
    if x < 1:
        raise ValueError(f"delta is defined for positive integers, got {x}")
    value, width = _delta_pair(x)
    return format(value, f"0{width}b")


def gamma_decode(window: str) -> tuple[int, int]:
    """Decode one gamma codeword from the front of a bit string.

    Returns (value, consumed bits).  Raises ValueError on a truncated window.
    """
    zeros = 0
    for ch in window:
        if ch == "1":
            break
        zeros += 1
    else:
        raise ValueError("incomplete gamma code: no terminating 1 in window")
    length = 2 * zeros + 1
    if len(window) < length:
        raise ValueError("incomplete gamma code: window too short")
    low = window[zeros + 1 : length]
    return (1 << zeros) | (int(low, 2) if low else 0), length


def delta_decode(window: str) -> tuple[int, int]:
    """Decode one delta codeword from the front of a bit string."""
    m, consumed = gamma_decode(window)
    length = consumed + m - 1
    if len(window) < length:
        raise ValueError("incomplete delta code: window too short")
    low = window[consumed:length]
    x = (1 << (m - 1)) | (int(low, 2) if low else 0)
    return x, length


def delta_read(data: bytes, pos: int, limit: int) -> tuple[int, int]:
    """Decode the delta codeword at bit position pos; return (value, next pos).

    limit is the stream's bit length; a codeword crossing it means the stream
    is corrupt.
    """
    byte = pos >> 3
    chunk = data[byte : byte + _WINDOW_BYTES]
    width = 8 * len(chunk) - (pos & 7)
    w = int.from_bytes(chunk, "big") & ((1 << width) - 1)
    clz = width - w.bit_length()
    if 2 * clz + 1 > width:
        raise ValueError(f"incomplete delta code at bit {pos}")
    m = (1 << clz) | ((w >> (width - 1 - 2 * clz)) & ((1 << clz) - 1))
    length = 2 * clz + m
    if pos + length > limit:
        raise ValueError(f"incomplete delta code at bit {pos}")
    x = (1 << (m - 1)) | ((w >> (width - length)) & ((1 << (m - 1)) - 1))
    return x, pos + length


# ---------------------------------------------------- frequency-ordered codes

@dataclass(frozen=True, slots=True)
class Codebook:
    """Distinct gaps ranked by descending frequency, ties by ascending value.

    D[r-1] is the gap with rank r (the most frequent gap has rank 1 and so
    the shortest delta codeword); ord is the inverse map.  freq holds the
    occurrence counts the ranking came from; a codebook reconstructed from a
    serialized index carries freq=None and is decode-only.
    """

    D: tuple[int, ...]
    ord: dict[int, int]
    freq: dict[int, int] | None

    def __post_init__(self) -> None:
        if len(set(self.D)) != len(self.D):
            raise ValueError("codebook values must be distinct")
        if self.freq is not None:
            ranked = [self.freq[g] for g in self.D]
            if any(a < b for a, b in zip(ranked, ranked[1:])):
                raise ValueError("codebook order must be frequency-descending")

    @property
    def d(self) -> int:
        return len(self.D)

    @property
    def g_max(self) -> int:
        return max(self.D)


@dataclass(frozen=True, slots=True)
class EncodedStream:
    """A packed codeword sequence: data bytes, exact bit length, codeword count."""

    data: bytes
    bit_len: int
    n: int


def build_codebook(g: GapStream) -> Codebook:
    """Rank the distinct gaps of g by descending frequency."""
    if g.n == 0:
        raise ValueError("cannot build a codebook for an empty stream")
    counts = Counter(g.gaps)
    d_arr = tuple(sorted(counts, key=lambda v: (-counts[v], v)))
    return Codebook(
        D=d_arr,
        ord={v: r for r, v in enumerate(d_arr, start=1)},
        freq=dict(counts),
    )


def encode_stream(g: GapStream, cb: Codebook) -> EncodedStream:
    """Concatenate delta(ord(g_i)) for every gap of g."""
    pairs = {v: _delta_pair(r) for v, r in cb.ord.items()}
    w = BitWriter()
    try:
        for gap in g.gaps:
            value, width = pairs[gap]
            w.write(value, width)
    except KeyError:
        raise ValueError(f"gap {gap} not present in codebook") from None
    return EncodedStream(w.getvalue(), w.bit_length, g.n)


def decode_at(c: EncodedStream, bitpos: int, cb: Codebook) -> tuple[int, int]:
    """Decode the codeword starting at bitpos; return (gap value, next bitpos)."""
    if not 0 <= bitpos < c.bit_len:
        raise IndexError(f"bit position {bitpos} outside stream of {c.bit_len} bits")
    rank, nxt = delta_read(c.data, bitpos, c.bit_len)
    return cb.D[rank - 1], nxt


def decode_all(c: EncodedStream, cb: Codebook) -> list[int]:
    """Decode all n codewords of the stream."""
    data, limit, d_arr = c.data, c.bit_len, cb.D
    out = []
    pos = 0
    for _ in range(c.n):
        rank, pos = delta_read(data, pos, limit)
        out.append(d_arr[rank - 1])
    return out


# -------------------------------------------------------------------- Huffman

@dataclass(frozen=True, slots=True)
class HuffmanBook:
    """Canonical Huffman code over the distinct gaps of one stream.

    Codes are assigned in (length, gap value) order.  book_bits is the
    serialized codebook cost, one gap value plus one length byte per entry;
    stream_bits the cost of the encoded gap sequence.
    """

    lengths: dict[int, int]
    codes: dict[int, tuple[int, int]]
    book_bits: int
    stream_bits: int
    # canonical decode tables, indexed by sorted distinct code length
    _lens: tuple[int, ...]
    _first_code: tuple[int, ...]
    _first_index: tuple[int, ...]
    _counts: tuple[int, ...]
    _symbols: tuple[int, ...]


def _code_lengths(counts: Counter[int]) -> dict[int, int]:
    if len(counts) == 1:
        # degenerate alphabet: spend the one-bit-per-symbol budget
        return {next(iter(counts)): 1}
    heap: list[tuple[int, int, object]] = []
    for tie, (value, c) in enumerate(sorted(counts.items())):
        heap.append((c, tie, value))
    heapq.heapify(heap)
    tie = len(heap)
    while len(heap) > 1:
        w1, _, n1 = heapq.heappop(heap)
        w2, _, n2 = heapq.heappop(heap)
        heapq.heappush(heap, (w1 + w2, tie, (n1, n2)))
        tie += 1
    lengths: dict[int, int] = {}
    stack = [(heap[0][2], 0)]
    while stack:
        node, depth = stack.pop()
        if isinstance(node, tuple):
            stack.append((node[0], depth + 1))
            stack.append((node[1], depth + 1))
        else:
            lengths[node] = depth
    return lengths


def huffman_build(g: GapStream) -> HuffmanBook:
    """Build the canonical Huffman code for the gaps of g."""
    if g.n == 0:
        raise ValueError("cannot build a Huffman code for an empty stream")
    counts = Counter(g.gaps)
    lengths = _code_lengths(counts)
    order = sorted(lengths, key=lambda v: (lengths[v], v))
    codes: dict[int, tuple[int, int]] = {}
    lens: list[int] = []
    first_code: list[int] = []
    first_index: list[int] = []
    n_codes: list[int] = []
    code = 0
    prev = lengths[order[0]]
    for i, v in enumerate(order):
        length = lengths[v]
        code <<= length - prev
        prev = length
        codes[v] = (code, length)
        if not lens or lens[-1] != length:
            lens.append(length)
            first_code.append(code)
            first_index.append(i)
            n_codes.append(0)
        n_codes[-1] += 1
        code += 1
    g_max_width = max(counts).bit_length()
    return HuffmanBook(
        lengths=lengths,
        codes=codes,
        book_bits=len(counts) * (g_max_width + 8),
        stream_bits=sum(c * lengths[v] for v, c in counts.items()),
        _lens=tuple(lens),
        _first_code=tuple(first_code),
        _first_index=tuple(first_index),
        _counts=tuple(n_codes),
        _symbols=tuple(order),
    )


def huffman_encode(g: GapStream, book: HuffmanBook) -> EncodedStream:
    """Encode the gaps of g with the book's canonical codes."""
    w = BitWriter()
    codes = book.codes
    try:
        for gap in g.gaps:
            value, width = codes[gap]
            w.write(value, width)
    except KeyError:
        raise ValueError(f"gap {gap} not present in Huffman book") from None
    return EncodedStream(w.getvalue(), w.bit_length, g.n)


def huffman_decode(
    c: EncodedStream,
    book: HuffmanBook,
    n: int,
    *,
    universe: int | None = None,
    tail_gap: int | None = None,
) -> GapStream:
    """Decode n codewords back into a GapStream.

    The bits carry only the gaps; universe and tail metadata cannot be
    recovered from them.  By default the result is a tail-less stream whose
    universe is the gap sum; pass universe/tail_gap to restore the original
    metadata of a stream whose set did not contain universe-1.
    """
    data, limit = c.data, c.bit_len
    lens, first_code, first_index, counts, symbols = (
        book._lens,
        book._first_code,
        book._first_index,
        book._counts,
        book._symbols,
    )
    gaps = []
    pos = 0
    for _ in range(n):
        byte = pos >> 3
        chunk = data[byte : byte + _WINDOW_BYTES]
        width = 8 * len(chunk) - (pos & 7)
        w = int.from_bytes(chunk, "big") & ((1 << width) - 1)
        for li, length in enumerate(lens):
            if pos + length > limit or length > width:
                continue
            value = w >> (width - length)
            k = value - first_code[li]
            if 0 <= k < counts[li]:
                gaps.append(symbols[first_index[li] + k])
                pos += length
                break
        else:
            raise ValueError(f"no codeword matches the bits at position {pos}")
    total = sum(gaps)
    if universe is None:
        universe = total + (tail_gap or 0)
    if tail_gap is None and universe > total:
        tail_gap = universe - total
    return GapStream(
        tuple(gaps),
        universe,
        tail_present=tail_gap is None,
        tail_gap=tail_gap,
    )
