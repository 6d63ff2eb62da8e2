"""Plain bitvector with rank/select support.

Directory geometry: 512-bit superblocks holding absolute counts, 64-bit words
holding counts relative to their superblock, plus the position of every 64th
set bit for select.  Select scans at most one sample gap, which is all the
occupancy vector of the index ever needs.
"""

from __future__ import annotations

from collections.abc import Iterable

__all__ = ["RsBitvector"]


class RsBitvector:
    __slots__ = ("nbits", "ones", "_words", "_sb", "_blk", "_sample_word")

    def __init__(self, data: bytes, nbits: int) -> None:
        """Wrap nbits of MSB-first packed bits and build the rank directory."""
        if nbits < 0 or len(data) < (nbits + 7) // 8:
            raise ValueError(f"need {(nbits + 7) // 8} bytes for {nbits} bits")
        nwords = (nbits + 63) // 64
        words = []
        for i in range(nwords):
            chunk = data[8 * i : 8 * i + 8]
            w = int.from_bytes(chunk, "big") << (8 * (8 - len(chunk)))
            words.append(w)
        # mask stray padding past nbits so directory counts stay honest
        if nbits % 64 and words:
            keep = nbits % 64
            words[-1] &= ((1 << keep) - 1) << (64 - keep)
        sb: list[int] = []
        blk: list[int] = []
        sample_word: list[int] = []
        total = 0
        since_sb = 0
        for i, w in enumerate(words):
            if i % 8 == 0:
                sb.append(total)
                since_sb = 0
            blk.append(since_sb)
            c = w.bit_count()
            # record the word containing every 64th set bit
            j = -(total % -64)  # sets until the next multiple of 64
            while j < c:
                sample_word.append(i)
                j += 64
            total += c
            since_sb += c
        self.nbits = nbits
        self.ones = total
        self._words = words
        self._sb = sb
        self._blk = blk
        self._sample_word = sample_word

    @classmethod
    def from_bools(cls, bits: Iterable[bool]) -> "RsBitvector":
        acc = bytearray()
        cur = 0
        fill = 0
        n = 0
        for b in bits:
            cur = (cur << 1) | (1 if b else 0)
            fill += 1
            n += 1
            if fill == 8:
                acc.append(cur)
                cur = 0
                fill = 0
        if fill:
            acc.append(cur << (8 - fill))
        return cls(bytes(acc), n)

    def to_bytes(self) -> bytes:
        out = bytearray()
        for w in self._words:
            out += w.to_bytes(8, "big")
        return bytes(out[: (self.nbits + 7) // 8])

    def __len__(self) -> int:
        return self.nbits

    @property
    def directory_bits(self) -> int:
        """In-memory footprint of the rank/select directory."""
        return 64 * (len(self._sb) + len(self._sample_word)) + 16 * len(self._blk)

    def __getitem__(self, p: int) -> int:
        if not 0 <= p < self.nbits:
            raise IndexError(f"bit {p} out of range [0, {self.nbits})")
        return (self._words[p >> 6] >> (63 - (p & 63))) & 1

    def rank1(self, p: int) -> int:
        """Number of set bits in positions 0..p inclusive."""
        if not 0 <= p < self.nbits:
            raise IndexError(f"rank position {p} out of range [0, {self.nbits})")
        wi = p >> 6
        return (
            self._sb[wi >> 3]
            + self._blk[wi]
            + ((self._words[wi] >> (63 - (p & 63))).bit_count())
        )

    def select1(self, j: int) -> int:
        """Position of the j-th set bit, 0-based."""
        if not 0 <= j < self.ones:
            raise IndexError(f"select index {j} out of range [0, {self.ones})")
        wi = self._sample_word[j >> 6]
        rem = j - (self._sb[wi >> 3] + self._blk[wi])
        while True:
            c = self._words[wi].bit_count()
            if rem < c:
                break
            rem -= c
            wi += 1
        w = self._words[wi]
        off = 0
        for shift in (56, 48, 40, 32, 24, 16, 8, 0):
            byte = (w >> shift) & 0xFF
            c = byte.bit_count()
            if rem < c:
                for bit in range(8):
                    if byte & (0x80 >> bit):
                        if rem == 0:
                            return (wi << 6) + off + bit
                        rem -= 1
            else:
                rem -= c
                off += 8
