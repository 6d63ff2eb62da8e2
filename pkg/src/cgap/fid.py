"""Two-level fully-indexable dictionary over a sorted integer set.

The universe is cut into blocks of v = ceil(u * ceil(log2 u)^2 / n) values
(capped at u).  An occupancy bitvector V marks nonempty blocks, R samples the
rank at every block boundary, SEL records the block of every t-th element for
t = ceil(log2 u)^2, and each nonempty block stores its elements, rebased to
the block, in a binary-searchable dictionary.  One codebook, built from the
global gap stream, is shared by all blocks.

Index container (magic CGF1): scalars are little-endian; bit-packed sections
are MSB-first and zero-padded to byte boundaries.  The layout is pinned by a
golden-file test; bump the version byte before changing it.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

from .bitvec import RsBitvector
from .bsd import Bsd, QueryStats, bsd_build, bsd_elements, bsd_rank, bsd_select
from .codec import BitWriter, Codebook, EncodedStream, read_bits
from .errors import FormatError, VerificationError
from .gapcore import SortedSet, gaps_from_set
from . import codec

__all__ = [
    "Fid",
    "SpaceReport",
    "fid_build",
    "fid_rank",
    "fid_select",
    "fid_elements",
    "fid_space_report",
    "serialize",
    "deserialize",
    "verify_index",
]

MAGIC = b"CGF1"
VERSION = 1


@dataclass(frozen=True, slots=True)
class Fid:
    u: int
    n: int
    v: int
    t_sel: int
    cb: Codebook
    V: RsBitvector
    R: tuple[int, ...]
    SEL: tuple[int, ...]
    bsds: tuple[Bsd, ...]
    last_block: int


@dataclass(frozen=True, slots=True)
class SpaceReport:
    """Exact bit accounting of a serialized index.

    The seven payload components sum to payload_bits; payload_bits plus
    framing_bits (scalars, section padding) equals total_bits, which is the
    file size in bits.  v_directory_bits is the in-memory rank/select
    directory rebuilt on load; it is not part of the file.
    """

    streams_bits: int
    heads_bits: int
    ptrs_bits: int
    v_bits: int
    r_bits: int
    sel_bits: int
    codebook_bits: int
    framing_bits: int
    total_bits: int
    v_directory_bits: int

    @property
    def payload_bits(self) -> int:
        return (
            self.streams_bits
            + self.heads_bits
            + self.ptrs_bits
            + self.v_bits
            + self.r_bits
            + self.sel_bits
            + self.codebook_bits
        )


def fid_build(s: SortedSet) -> Fid:
    """Build the index for a nonempty set over a universe of at least 2."""
    if s.n == 0:
        raise ValueError("cannot index an empty set")
    if s.universe < 2:
        raise ValueError("universe must be at least 2")
    u, n, elements = s.universe, s.n, s.elements
    log_u = (u - 1).bit_length()
    v = min(u, (u * log_u * log_u + n - 1) // n)
    t_sel = log_u * log_u
    cb = codec.build_codebook(gaps_from_set(s))
    nblocks = (u + v - 1) // v
    starts = [bisect_left(elements, b * v) for b in range(nblocks)]
    starts.append(n)
    occupancy = [starts[b + 1] > starts[b] for b in range(nblocks)]
    bsds = []
    for b in range(nblocks):
        if not occupancy[b]:
            continue
        base = b * v
        rel = tuple(e - base for e in elements[starts[b] : starts[b + 1]])
        bsds.append(bsd_build(SortedSet(v, rel), cb))
    sel = tuple(elements[j] // v for j in range(0, n, t_sel))
    return Fid(
        u=u,
        n=n,
        v=v,
        t_sel=t_sel,
        cb=cb,
        V=RsBitvector.from_bools(occupancy),
        R=tuple(starts[:nblocks]),
        SEL=sel,
        bsds=tuple(bsds),
        last_block=elements[-1] // v,
    )


def fid_rank(f: Fid, x: int, stats: QueryStats | None = None) -> int:
    """Number of elements <= x (inclusive rank)."""
    if not 0 <= x < f.u:
        raise IndexError(f"rank argument {x} out of range [0, {f.u})")
    b = x // f.v
    if not f.V[b]:
        return f.R[b]
    idx = f.V.rank1(b) - 1
    return f.R[b] + bsd_rank(f.bsds[idx], x - b * f.v, stats)


def fid_select(f: Fid, i: int, stats: QueryStats | None = None) -> int:
    """The (i+1)-th smallest element."""
    if not 0 <= i < f.n:
        raise IndexError(f"select index {i} out of range [0, {f.n})")
    s = i // f.t_sel
    q_l = f.SEL[s]
    # the next sample's block bounds the search; past the last sample any
    # element can only live up to the last nonempty block
    q_r = f.SEL[s + 1] if s + 1 < len(f.SEL) else f.last_block
    lo = f.V.rank1(q_l) - 1
    hi = f.V.rank1(q_r) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if stats is not None:
            stats.probes += 1
        if f.R[f.V.select1(mid)] <= i:
            lo = mid
        else:
            hi = mid - 1
    blk = f.V.select1(lo)
    return blk * f.v + bsd_select(f.bsds[lo], i - f.R[blk], stats)


def fid_elements(f: Fid) -> list[int]:
    """Decode every element back out, in order."""
    out = []
    for idx, b in enumerate(f.bsds):
        base = f.V.select1(idx) * f.v
        out.extend(base + e for e in bsd_elements(b))
    return out


# ------------------------------------------------------------- serialization

def _pack_section(values, width: int, out: bytearray) -> tuple[int, int]:
    """Append a fixed-width bit-packed array; return (payload bits, padding bits)."""
    w = BitWriter()
    for value in values:
        w.write(value, width)
    data = w.getvalue()
    out += data
    return w.bit_length, 8 * len(data) - w.bit_length


def _serialize(f: Fid) -> tuple[bytes, SpaceReport]:
    out = bytearray()
    framing = 0

    def scalar(value: int, size: int) -> None:
        nonlocal framing
        out_extend = value.to_bytes(size, "little")
        out.extend(out_extend)
        framing += 8 * size

    out += MAGIC
    out.append(VERSION)
    framing += 8 * 5
    for value in (f.u, f.n, f.v, f.t_sel, f.cb.d):
        scalar(value, 8)

    gw = f.cb.g_max.bit_length()
    scalar(gw, 1)
    codebook_bits, pad = _pack_section(f.cb.D, gw, out)
    framing += pad

    scalar(f.V.nbits, 8)
    vbytes = f.V.to_bytes()
    out += vbytes
    v_bits = f.V.nbits
    framing += 8 * len(vbytes) - v_bits

    r_width = max(1, f.n.bit_length())
    scalar(r_width, 1)
    scalar(len(f.R), 8)
    r_bits, pad = _pack_section(f.R, r_width, out)
    framing += pad

    nblocks = (f.u + f.v - 1) // f.v
    sel_width = max(1, (nblocks - 1).bit_length())
    scalar(sel_width, 1)
    scalar(len(f.SEL), 8)
    sel_bits, pad = _pack_section(f.SEL, sel_width, out)
    framing += pad

    scalar(len(f.bsds), 8)
    head_width = max(1, (f.v - 1).bit_length())
    heads_bits = ptrs_bits = streams_bits = 0
    for b in f.bsds:
        scalar(b.n, 8)
        ptr_width = max(1, (b.stream.bit_len).bit_length())
        scalar(ptr_width, 1)
        bits, pad = _pack_section(b.heads, head_width, out)
        heads_bits += bits
        framing += pad
        bits, pad = _pack_section(b.ptrs, ptr_width, out)
        ptrs_bits += bits
        framing += pad
        scalar(b.stream.bit_len, 8)
        out += b.stream.data
        streams_bits += b.stream.bit_len
        framing += 8 * len(b.stream.data) - b.stream.bit_len

    report = SpaceReport(
        streams_bits=streams_bits,
        heads_bits=heads_bits,
        ptrs_bits=ptrs_bits,
        v_bits=v_bits,
        r_bits=r_bits,
        sel_bits=sel_bits,
        codebook_bits=codebook_bits,
        framing_bits=framing,
        total_bits=8 * len(out),
        v_directory_bits=f.V.directory_bits,
    )
    return bytes(out), report


def serialize(f: Fid) -> bytes:
    """Encode the index as a CGF1 container."""
    return _serialize(f)[0]


def fid_space_report(f: Fid) -> SpaceReport:
    """Exact component accounting for the serialized form of f."""
    return _serialize(f)[1]


class _Reader:
    __slots__ = ("data", "pos")

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise FormatError("container truncated")
        chunk = self.data[self.pos : self.pos + size]
        self.pos += size
        return chunk

    def scalar(self, size: int) -> int:
        return int.from_bytes(self.take(size), "little")

    def packed(self, count: int, width: int) -> tuple[int, ...]:
        data = self.take((count * width + 7) // 8)
        return tuple(read_bits(data, i * width, width) for i in range(count))


def deserialize(data: bytes) -> Fid:
    """Decode a CGF1 container; raises FormatError on anything malformed."""
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise FormatError("not an index container: bad magic")
    version = r.scalar(1)
    if version != VERSION:
        raise FormatError(f"unsupported container version {version}")
    u = r.scalar(8)
    n = r.scalar(8)
    v = r.scalar(8)
    t_sel = r.scalar(8)
    d = r.scalar(8)
    if u < 2 or n < 1 or v < 1 or t_sel < 1 or d < 1:
        raise FormatError("container header out of range")

    gw = r.scalar(1)
    d_arr = r.packed(d, gw)
    if len(set(d_arr)) != d or any(g < 1 for g in d_arr):
        raise FormatError("corrupt codebook section")
    cb = Codebook(D=d_arr, ord={g: i + 1 for i, g in enumerate(d_arr)}, freq=None)

    v_nbits = r.scalar(8)
    nblocks = (u + v - 1) // v
    if v_nbits != nblocks:
        raise FormatError("occupancy length disagrees with header")
    vec = RsBitvector(r.take((v_nbits + 7) // 8), v_nbits)

    r_width = r.scalar(1)
    r_count = r.scalar(8)
    if r_count != nblocks:
        raise FormatError("rank sample count disagrees with header")
    rank_samples = r.packed(r_count, r_width)

    sel_width = r.scalar(1)
    sel_count = r.scalar(8)
    sel = r.packed(sel_count, sel_width)

    nonempty = r.scalar(8)
    if nonempty != vec.ones:
        raise FormatError("block count disagrees with occupancy vector")
    head_width = max(1, (v - 1).bit_length())
    t_b = max(1, (v - 1).bit_length())
    bsds = []
    total = 0
    for _ in range(nonempty):
        n_b = r.scalar(8)
        if n_b < 1:
            raise FormatError("empty block record")
        total += n_b
        ptr_width = r.scalar(1)
        hb = (n_b + t_b - 1) // t_b
        heads = r.packed(hb, head_width)
        ptrs = r.packed(hb, ptr_width)
        stream_bits = r.scalar(8)
        stream_data = r.take((stream_bits + 7) // 8)
        stream = EncodedStream(stream_data, stream_bits, n_b - hb)
        bsds.append(Bsd(v, n_b, t_b, heads, ptrs, stream, cb))
    if total != n:
        raise FormatError("block populations disagree with header")
    if r.pos != len(data):
        raise FormatError("trailing bytes after container payload")

    return Fid(
        u=u,
        n=n,
        v=v,
        t_sel=t_sel,
        cb=cb,
        V=vec,
        R=rank_samples,
        SEL=sel,
        bsds=tuple(bsds),
        last_block=vec.select1(vec.ones - 1),
    )


def verify_index(f: Fid, s: SortedSet) -> None:
    """Full equivalence check of an index against its source set.

    Reconstructs every element and spot-checks rank at all element
    boundaries against a direct oracle.  Raises VerificationError on the
    first disagreement.
    """
    if f.u != s.universe or f.n != s.n:
        raise VerificationError(
            f"shape mismatch: index has (u={f.u}, n={f.n}), "
            f"set has (u={s.universe}, n={s.n})"
        )
    got = fid_elements(f)
    if got != list(s.elements):
        for i, (a, b) in enumerate(zip(got, s.elements)):
            if a != b:
                raise VerificationError(f"element {i} reconstructs to {a}, expected {b}")
        raise VerificationError("element count mismatch after reconstruction")
    for i, e in enumerate(s.elements):
        if fid_rank(f, e) != i + 1:
            raise VerificationError(f"rank({e}) != {i + 1}")
        if e > 0 and fid_rank(f, e - 1) != i:
            raise VerificationError(f"rank({e - 1}) != {i}")
    if fid_rank(f, f.u - 1) != f.n:
        raise VerificationError(f"rank(u-1) != n")
