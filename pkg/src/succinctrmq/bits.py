"""Bit vectors with rank/select, variable-cell arrays, piecewise-constant arrays.

Logical indices are 1-based throughout; raw bit offsets inside payloads are
0-based.  rank(alpha, i) accepts i = 0 and returns 0.

Space accounting (``space_bits``) reports the designed bit widths of each
array, not CPython object sizes; directory entries that hold machine words
are counted at 64 bits.
"""

from __future__ import annotations

import struct
from array import array
from bisect import bisect_left, bisect_right

from . import opcount
from .serial import DecodeError, pack_uints, read_stream, unpack_uints, write_stream

_WORD = 64
_SUPER_WORDS = 8  # 512-bit superblocks for the plain rank directory
_SPARSE_BLOCK_SHIFT = 9  # 512-bit blocks for the sparse rank directory


def _bitlen(x: int) -> int:
    return max(1, int(x).bit_length())


class BitVec:
    """Plain bit vector with constant-time rank and logarithmic select.

    Bits are stored LSB-first inside 64-bit words.  The rank directory keeps
    one absolute count per 512-bit superblock plus a 16-bit relative count
    per word.
    """

    __slots__ = ("n", "_words", "_super", "_rel", "_ones")

    def __init__(self, bits=None):
        if bits is None:
            bits = []
        words = array("Q")
        cur = 0
        fill = 0
        n = 0
        for b in bits:
            if b:
                cur |= 1 << fill
            fill += 1
            n += 1
            if fill == _WORD:
                words.append(cur)
                cur = 0
                fill = 0
        if fill:
            words.append(cur)
        self.n = n
        self._words = words
        self._build_directory()

    @classmethod
    def from_words(cls, n: int, words: array) -> "BitVec":
        v = cls.__new__(cls)
        v.n = n
        v._words = words
        v._build_directory()
        return v

    def _build_directory(self) -> None:
        nw = len(self._words)
        sup = array("q")
        rel = array("H")
        total = 0
        within = 0
        for w in range(nw + 1):
            if w % _SUPER_WORDS == 0:
                sup.append(total)
                within = 0
            rel.append(within)
            if w < nw:
                ones = self._words[w].bit_count()
                total += ones
                within += ones
        self._super = sup
        self._rel = rel
        self._ones = total

    def __len__(self) -> int:
        return self.n

    @property
    def ones(self) -> int:
        return self._ones

    def access(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"access index {i} out of range 1..{self.n}")
        opcount.add(1)
        j = i - 1
        return (self._words[j >> 6] >> (j & 63)) & 1

    def rank(self, alpha: int, i: int) -> int:
        if not 0 <= i <= self.n:
            raise IndexError(f"rank index {i} out of range 0..{self.n}")
        opcount.add(4)
        fw = i >> 6
        rem = i & 63
        c = self._super[fw >> 3] + self._rel[fw]
        if rem:
            c += (self._words[fw] & ((1 << rem) - 1)).bit_count()
        return c if alpha else i - c

    def rank1(self, i: int) -> int:
        return self.rank(1, i)

    def rank0(self, i: int) -> int:
        return self.rank(0, i)

    def select(self, alpha: int, k: int) -> int:
        """Smallest i with rank_alpha(i) = k.  O(log n) binary search."""
        total = self._ones if alpha else self.n - self._ones
        if k < 1 or k > total:
            raise ValueError(f"select: no {k}-th bit of value {alpha}")
        # largest superblock whose prefix count is < k; for alpha = 0 the
        # trailing phantom bits overcount, which only lands the search early
        # (the word scan below recovers).
        lo, hi = 0, len(self._super) - 1
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            before = self._super[mid] if alpha else mid * _SUPER_WORDS * _WORD - self._super[mid]
            if before < k:
                lo = mid
            else:
                hi = mid - 1
            opcount.add(2)
        sb = lo
        k_rem = k - (self._super[sb] if alpha else min(sb * _SUPER_WORDS * _WORD, self.n) - self._super[sb])
        w = sb * _SUPER_WORDS
        nw = len(self._words)
        while w < nw:
            opcount.add(2)
            word = self._words[w] if alpha else ~self._words[w] & 0xFFFFFFFFFFFFFFFF
            if w == nw - 1 and self.n & 63:
                word &= (1 << (self.n & 63)) - 1
            c = word.bit_count()
            if k_rem <= c:
                return (w << 6) + _select_in_word(word, k_rem) + 1
            k_rem -= c
            w += 1
        raise ValueError("select: internal inconsistency")  # pragma: no cover

    def select1(self, k: int) -> int:
        return self.select(1, k)

    def select0(self, k: int) -> int:
        return self.select(0, k)

    def space_bits(self) -> dict:
        payload = len(self._words) * _WORD
        directory = len(self._super) * _WORD + len(self._rel) * 16
        return {"payload": payload, "directory": directory}

    def to_bytes(self) -> bytes:
        sections = [
            (b"HEAD", struct.pack("<Q", self.n)),
            (b"BITS", pack_uints(self._words, 8)),
        ]
        return write_stream(1, sections)

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitVec":
        _, sections = read_stream(data)
        (n,) = struct.unpack("<Q", sections[b"HEAD"])
        words = array("Q", unpack_uints(sections[b"BITS"], 8))
        if len(words) != (n + 63) // 64:
            raise DecodeError("bit payload length mismatch")
        return cls.from_words(n, words)


def _select_in_word(word: int, k: int) -> int:
    """0-based position of the k-th set bit of a 64-bit word."""
    pos = 0
    for shift in (32, 16, 8, 4, 2, 1):
        low = word & ((1 << shift) - 1)
        c = low.bit_count()
        opcount.add(1)
        if k > c:
            k -= c
            word >>= shift
            pos += shift
        else:
            word = low
    return pos


class CompressedBitVec:
    """Bit vector whose storage adapts to the number of 1-bits.

    Sparse vectors (m * ceil(lg n) <= n/2) store the sorted 1-positions plus a
    per-512-bit-block rank directory; rank then needs one directory read and a
    binary search over at most 512 in-block candidates (<= 9 steps), select is
    a single array read.  Denser vectors fall back to the plain ``BitVec``
    layout, so the payload never exceeds n bits plus directory overhead.
    """

    __slots__ = ("n", "_mode", "_pos", "_block_rank", "_bv", "_ones")

    SPARSE = 0
    DENSE = 1

    def __init__(self, bits=None):
        positions = []
        n = 0
        for b in bits or []:
            n += 1
            if b:
                positions.append(n)
        self._init_from(n, positions)

    @classmethod
    def from_positions(cls, n: int, positions) -> "CompressedBitVec":
        v = cls.__new__(cls)
        v._init_from(n, list(positions))
        return v

    def _init_from(self, n: int, positions: list) -> None:
        self.n = n
        m = len(positions)
        self._ones = m
        for idx in range(1, m):
            if positions[idx - 1] >= positions[idx]:
                raise ValueError("positions must be strictly increasing")
        if m and (positions[0] < 1 or positions[-1] > n):
            raise ValueError("positions out of range")
        if m * _bitlen(n) * 2 <= n:
            self._mode = self.SPARSE
            self._pos = array("q", positions)
            nb = (n >> _SPARSE_BLOCK_SHIFT) + 2
            br = array("q")
            j = 0
            for blk in range(nb):
                limit = blk << _SPARSE_BLOCK_SHIFT
                while j < m and positions[j] <= limit:
                    j += 1
                br.append(j)
            self._block_rank = br
            self._bv = None
        else:
            self._mode = self.DENSE
            self._pos = None
            self._block_rank = None
            words = array("Q", [0]) * ((n + 63) // 64)
            for p in positions:
                words[(p - 1) >> 6] |= 1 << ((p - 1) & 63)
            self._bv = BitVec.from_words(n, words)

    def __len__(self) -> int:
        return self.n

    @property
    def ones(self) -> int:
        return self._ones

    @property
    def mode(self) -> int:
        return self._mode

    def access(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"access index {i} out of range 1..{self.n}")
        if self._mode == self.DENSE:
            return self._bv.access(i)
        opcount.add(2)
        j = bisect_left(self._pos, i)
        return 1 if j < self._ones and self._pos[j] == i else 0

    def rank(self, alpha: int, i: int) -> int:
        if not 0 <= i <= self.n:
            raise IndexError(f"rank index {i} out of range 0..{self.n}")
        if self._mode == self.DENSE:
            return self._bv.rank(alpha, i)
        opcount.add(11)  # directory read + in-block binary search (<= 9 steps)
        blk = i >> _SPARSE_BLOCK_SHIFT
        ones = bisect_right(self._pos, i, self._block_rank[blk], self._block_rank[blk + 1])
        return ones if alpha else i - ones

    def rank1(self, i: int) -> int:
        return self.rank(1, i)

    def rank0(self, i: int) -> int:
        return self.rank(0, i)

    def select(self, alpha: int, k: int) -> int:
        if self._mode == self.DENSE:
            return self._bv.select(alpha, k)
        if alpha:
            if k < 1 or k > self._ones:
                raise ValueError(f"select: no {k}-th 1-bit")
            opcount.add(1)
            return self._pos[k - 1]
        zeros = self.n - self._ones
        if k < 1 or k > zeros:
            raise ValueError(f"select: no {k}-th 0-bit")
        # smallest j with pos[j] - j > k; the k-th zero is then k + j
        lo, hi = 0, self._ones
        while lo < hi:
            mid = (lo + hi) >> 1
            if self._pos[mid] - mid > k:
                hi = mid
            else:
                lo = mid + 1
            opcount.add(2)
        return k + lo

    def select1(self, k: int) -> int:
        return self.select(1, k)

    def select0(self, k: int) -> int:
        return self.select(0, k)

    def payload_bits(self) -> int:
        if self._mode == self.SPARSE:
            return self._ones * _bitlen(self.n)
        return self._bv.space_bits()["payload"]

    def space_bits(self) -> dict:
        if self._mode == self.SPARSE:
            directory = len(self._block_rank) * _bitlen(self._ones)
            return {"payload": self.payload_bits(), "directory": directory}
        return self._bv.space_bits()

    def positions(self) -> list[int]:
        if self._mode == self.SPARSE:
            return list(self._pos)
        return [self._bv.select1(k) for k in range(1, self._ones + 1)]

    def to_bytes(self) -> bytes:
        sections = [
            (b"HEAD", struct.pack("<QQ", self.n, self._ones)),
            (b"ONES", pack_uints(self.positions(), 8)),
        ]
        return write_stream(1, sections)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedBitVec":
        _, sections = read_stream(data)
        n, m = struct.unpack("<QQ", sections[b"HEAD"])
        positions = unpack_uints(sections[b"ONES"], 8)
        if len(positions) != m:
            raise DecodeError("positions length mismatch")
        return cls.from_positions(n, positions)


class VariableCellArray:
    """Contiguous storage for m variable-bit-length objects.

    Object i occupies bits [start(i), start(i) + size(i)) of the payload,
    MSB-first; start offsets are 0-based.  A two-level directory (absolute
    offset per block of b objects, block-local offset per object) gives
    constant-time start lookup.
    """

    __slots__ = ("m", "total_bits", "block_size", "_block_start", "_local", "_words", "_max_size")

    def __init__(self, objects, block_size: int | None = None):
        """objects: iterable of (value, size_bits) with 0 <= value < 2**size."""
        objs = list(objects)
        self.m = len(objs)
        total = sum(s for _, s in objs)
        self.total_bits = total
        if block_size is None:
            lg = _bitlen(total + 2)
            block_size = max(1, lg * lg)
        self.block_size = block_size
        self._max_size = max((s for _, s in objs), default=0)
        block_start = array("q")
        local = array("q")
        words = array("Q", [0]) * ((total + 63) // 64)
        offset = 0
        for idx, (value, size) in enumerate(objs):
            if idx % block_size == 0:
                block_start.append(offset)
            local.append(offset - block_start[-1])
            if value >> size:
                raise ValueError("object value wider than declared size")
            _write_bits(words, offset, value, size)
            offset += size
        self._block_start = block_start
        self._local = local
        self._words = words

    def start(self, i: int) -> int:
        """0-based bit offset of object i (1-based i)."""
        if not 1 <= i <= self.m:
            raise IndexError(f"object index {i} out of range 1..{self.m}")
        opcount.add(2)
        j = i - 1
        return self._block_start[j // self.block_size] + self._local[j]

    def size(self, i: int) -> int:
        end = self.total_bits if i == self.m else self.start(i + 1)
        return end - self.start(i)

    def object_bits(self, i: int) -> tuple[int, int]:
        """(value, size) of object i."""
        s = self.start(i)
        size = self.size(i)
        return _read_bits(self._words, s, size), size

    def space_bits(self) -> dict:
        local_width = _bitlen(self.block_size * max(1, self._max_size))
        return {
            "payload": self.total_bits,
            "directory": len(self._block_start) * _WORD + self.m * local_width,
        }

    def to_bytes(self) -> bytes:
        sizes = [self.size(i) for i in range(1, self.m + 1)]
        sections = [
            (b"HEAD", struct.pack("<QQQ", self.m, self.total_bits, self.block_size)),
            (b"SIZE", pack_uints(sizes, 8)),
            (b"PAYL", pack_uints(self._words, 8)),
        ]
        return write_stream(1, sections)

    @classmethod
    def from_bytes(cls, data: bytes) -> "VariableCellArray":
        _, sections = read_stream(data)
        m, total, block_size = struct.unpack("<QQQ", sections[b"HEAD"])
        sizes = unpack_uints(sections[b"SIZE"], 8)
        words = array("Q", unpack_uints(sections[b"PAYL"], 8))
        if len(sizes) != m or sum(sizes) != total:
            raise DecodeError("variable-cell directory mismatch")
        objs = []
        offset = 0
        for s in sizes:
            objs.append((_read_bits(words, offset, s), s))
            offset += s
        return cls(objs, block_size=block_size)


def _write_bits(words: array, offset: int, value: int, size: int) -> None:
    """Write `size` bits of `value` MSB-first at bit `offset` (LSB-first words)."""
    for b in range(size):
        bit = (value >> (size - 1 - b)) & 1
        if bit:
            pos = offset + b
            words[pos >> 6] |= 1 << (pos & 63)


def _read_bits(words: array, offset: int, size: int) -> int:
    value = 0
    for b in range(size):
        pos = offset + b
        value = (value << 1) | ((words[pos >> 6] >> (pos & 63)) & 1)
    return value


class PiecewiseConstantArray:
    """Run-compressed array with constant-time access and run-length queries.

    Stores the distinct run values densely plus a compressed change-position
    bit vector C (C[1] = 1 always); access(i) = V[rank1(C, i)].  Several
    arrays sharing identical run boundaries may share one C (pass ``shared_c``
    to skip it in this array's space accounting).
    """

    __slots__ = ("n", "C", "values", "_width", "_c_shared")

    def __init__(self, values, run_starts=None, n=None, c=None, c_shared=False):
        if run_starts is None:
            seq = list(values)
            self.n = len(seq)
            starts = []
            vals = []
            prev = object()
            for idx, v in enumerate(seq, start=1):
                if idx == 1 or v != prev:
                    starts.append(idx)
                    vals.append(v)
                prev = v
            self.values = vals
            self.C = CompressedBitVec.from_positions(self.n, starts)
            self._c_shared = False
        else:
            if n is None:
                raise ValueError("n required with explicit run starts")
            self.n = n
            self.values = list(values)
            if c is not None:
                self.C = c
            else:
                self.C = CompressedBitVec.from_positions(n, list(run_starts))
            self._c_shared = c_shared and c is not None
            if self.C.ones != len(self.values):
                raise ValueError("run count must equal value count")
        mx = max((abs(int(v)) for v in self.values), default=0)
        self._width = _bitlen(mx)

    def access(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"access index {i} out of range 1..{self.n}")
        opcount.add(1)
        return self.values[self.C.rank1(i) - 1]

    def runlen(self, i: int) -> int:
        """Distance from the start of i's run through i, inclusive."""
        if not 1 <= i <= self.n:
            raise IndexError(f"runlen index {i} out of range 1..{self.n}")
        opcount.add(1)
        r = self.C.rank1(i)
        return i - self.C.select1(r) + 1

    def space_bits(self) -> dict:
        vbits = len(self.values) * self._width
        if self._c_shared:
            return {"values": vbits, "change_vector": 0}
        c = self.C.space_bits()
        return {"values": vbits, "change_vector": c["payload"] + c["directory"]}

    def to_bytes(self) -> bytes:
        sections = [
            (b"HEAD", struct.pack("<Q", self.n)),
            (b"VALS", struct.pack(f"<{len(self.values)}q", *self.values)),
            (b"CBIT", self.C.to_bytes()),
        ]
        return write_stream(1, sections)

    @classmethod
    def from_bytes(cls, data: bytes) -> "PiecewiseConstantArray":
        _, sections = read_stream(data)
        (n,) = struct.unpack("<Q", sections[b"HEAD"])
        count = len(sections[b"VALS"]) // 8
        values = list(struct.unpack(f"<{count}q", sections[b"VALS"]))
        c = CompressedBitVec.from_bytes(sections[b"CBIT"])
        if c.n != n or c.ones != len(values):
            raise DecodeError("piecewise-constant array mismatch")
        return cls(values, run_starts=c.positions(), n=n, c=c)
