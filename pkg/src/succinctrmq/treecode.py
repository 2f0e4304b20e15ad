"""Whole-tree codes: subtree-size arithmetic code, Zaks sequence, hybrid envelope.

The subtree-size code writes each node's left-subtree size in preorder under a
uniform model on [0..st(v)-1]; a 62-bit integer range coder keeps the payload
within 2 bits (plus termination) of the information content.  The hybrid code
prefixes a node-count header and a selector bit and stores whichever of the
subtree-size or Zaks encodings is shorter.
"""

from __future__ import annotations

from dataclasses import dataclass

from .serial import DecodeError, bits_to_bytes, bytes_to_bits, decode_varint, encode_varint
from .trees import BinaryTree

_P = 62
_FULL = 1 << _P
_MASK = _FULL - 1
_HALF = 1 << (_P - 1)
_QUARTER = 1 << (_P - 2)
_THREE_QUARTER = _HALF + _QUARTER

SELECTOR_SIZECODE = 0
SELECTOR_ZAKS = 1


class RangeEncoder:
    """Integer range coder for uniform symbols: encode(s, k) with 0 <= k < s.

    The current range splits into s integer parts, remainder spread over the
    low symbols, so encode/decode are exact inverses and the emitted length is
    at most sum(lg s) + 2 bits plus negligible subdivision loss.
    """

    def __init__(self):
        self.low = 0
        self.high = _MASK
        self.pending = 0
        self.bits: list[int] = []

    def _emit(self, b: int) -> None:
        self.bits.append(b)
        if self.pending:
            inv = 1 - b
            self.bits.extend([inv] * self.pending)
            self.pending = 0

    def encode(self, s: int, k: int) -> None:
        if not 0 <= k < s:
            raise ValueError(f"symbol {k} outside model range 0..{s - 1}")
        if s == 1:
            return
        low, high = self.low, self.high
        span = high - low + 1
        if s > span:  # pragma: no cover - span >= 2^60 after renormalization
            raise ValueError("model too large for coder precision")
        q, r = divmod(span, s)
        if k < r:
            off = k * (q + 1)
            width = q + 1
        else:
            off = r * (q + 1) + (k - r) * q
            width = q
        low += off
        high = low + width - 1
        while True:
            if high < _HALF:
                self._emit(0)
            elif low >= _HALF:
                self._emit(1)
                low -= _HALF
                high -= _HALF
            elif low >= _QUARTER and high < _THREE_QUARTER:
                self.pending += 1
                low -= _QUARTER
                high -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
        self.low, self.high = low, high

    def finish(self) -> list[int]:
        """Emit the shortest dyadic disambiguation and return all bits."""
        start = 0 if self.pending == 0 else 1
        for kf in range(start, _P + 1):
            block = 1 << (_P - kf)
            c = -(-self.low // block)
            if c * block + block - 1 <= self.high:
                for j in range(kf - 1, -1, -1):
                    self._emit((c >> j) & 1)
                return self.bits
        raise AssertionError("unreachable: unit blocks always fit")


class RangeDecoder:
    """Inverse of RangeEncoder; reads zero bits past the end of the stream."""

    def __init__(self, bits, pos: int = 0):
        self._bits = bits
        self._pos = pos
        self.low = 0
        self.high = _MASK
        code = 0
        for _ in range(_P):
            code = (code << 1) | self._read_bit()
        self.code = code

    def _read_bit(self) -> int:
        b = self._bits[self._pos] if self._pos < len(self._bits) else 0
        self._pos += 1
        return b

    def decode(self, s: int) -> int:
        if s == 1:
            return 0
        low, high, code = self.low, self.high, self.code
        span = high - low + 1
        q, r = divmod(span, s)
        d = code - low
        split = r * (q + 1)
        if d < split:
            k = d // (q + 1)
            off = k * (q + 1)
            width = q + 1
        else:
            k = r + (d - split) // q
            off = split + (k - r) * q
            width = q
        low += off
        high = low + width - 1
        while True:
            if high < _HALF:
                pass
            elif low >= _HALF:
                low -= _HALF
                high -= _HALF
                code -= _HALF
            elif low >= _QUARTER and high < _THREE_QUARTER:
                low -= _QUARTER
                high -= _QUARTER
                code -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
            code = (code << 1) | self._read_bit()
        self.low, self.high, self.code = low, high, code
        return k


def encode_count(n: int) -> list[int]:
    """Prefix-free node-count header within 2*ceil(lg n) bits for n >= 2.

    n >= 3 is the Elias-gamma code of n-1; n in {0, 1, 2} escapes with a
    leading 1 plus two plain bits (gamma(n-1) is undefined or ambiguous
    there).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n <= 2:
        return [1, (n >> 1) & 1, n & 1]
    m = n - 1
    u = m.bit_length() - 1
    bits = [0] * u + [1]
    for j in range(u - 1, -1, -1):
        bits.append((m >> j) & 1)
    return bits


def decode_count(bits, pos: int = 0) -> tuple[int, int]:
    """Return (n, next_pos)."""
    if pos >= len(bits):
        raise DecodeError("empty count header")
    if bits[pos]:
        if pos + 3 > len(bits):
            raise DecodeError("truncated count header")
        return (bits[pos + 1] << 1) | bits[pos + 2], pos + 3
    u = 0
    while pos < len(bits) and bits[pos] == 0:
        u += 1
        pos += 1
    if pos >= len(bits):
        raise DecodeError("truncated count header")
    pos += 1  # the marker 1
    if pos + u > len(bits):
        raise DecodeError("truncated count header")
    m = 1 << u
    for j in range(u):
        m |= bits[pos + j] << (u - 1 - j)
    return m + 1, pos + u


def zaks_bits(t: BinaryTree) -> list[int]:
    """Preorder emission: 1 per node, 0 per empty child; length 2n+1."""
    out = []
    stack = [t.root]
    left, right = t.left, t.right
    while stack:
        v = stack.pop()
        if v:
            out.append(1)
            stack.append(right[v])
            stack.append(left[v])
        else:
            out.append(0)
    return out


def zaks_decode(bits, pos: int = 0) -> tuple[BinaryTree, int]:
    """Parse one Zaks sequence starting at pos; returns (tree, next_pos)."""
    if pos >= len(bits):
        raise DecodeError("empty Zaks stream")
    if bits[pos] == 0:
        return BinaryTree(), pos + 1
    pos += 1
    left = [0, 0]
    right = [0, 0]
    count = 1
    stack = [(1, 1), (1, 0)]  # (parent, side); side 0 = left, popped first
    while stack:
        parent, side = stack.pop()
        if pos >= len(bits):
            raise DecodeError("truncated Zaks stream")
        b = bits[pos]
        pos += 1
        if b:
            count += 1
            left.append(0)
            right.append(0)
            if side == 0:
                left[parent] = count
            else:
                right[parent] = count
            stack.append((count, 1))
            stack.append((count, 0))
    return BinaryTree.from_links(count, left, right, 1), pos


def encode_zaks(t: BinaryTree) -> list[int]:
    """Raw Zaks sequence of the tree (no header)."""
    return zaks_bits(t)


def encode_left_sizes(t: BinaryTree) -> list[int]:
    """Arithmetic-coded preorder left-subtree sizes (no header)."""
    enc = RangeEncoder()
    st, ls = t.st, t.ls
    encode = enc.encode
    for v in range(1, t.n + 1):
        encode(st[v], ls[v])
    return enc.finish()


def decode_left_sizes(n: int, bits, pos: int = 0) -> BinaryTree:
    """Rebuild a tree from its subtree-size code; n must be known."""
    if n == 0:
        return BinaryTree()
    dec = RangeDecoder(bits, pos)
    left = [0] * (n + 1)
    right = [0] * (n + 1)
    count = 0
    stack = [(0, 0, n)]
    while stack:
        parent, side, size = stack.pop()
        if size == 0:
            continue
        count += 1
        node = count
        if parent:
            if side == 0:
                left[parent] = node
            else:
                right[parent] = node
        lsize = dec.decode(size)
        stack.append((node, 1, size - 1 - lsize))
        stack.append((node, 0, lsize))
    return BinaryTree.from_links(n, left, right, 1)


def encode_body(t: BinaryTree) -> tuple[int, list[int]]:
    """(selector, body): whichever of the two encodings is shorter."""
    a = encode_left_sizes(t)
    z = zaks_bits(t)
    if len(a) <= len(z):
        return SELECTOR_SIZECODE, a
    return SELECTOR_ZAKS, z


def decode_body(selector: int, bits, n: int, pos: int = 0) -> BinaryTree:
    if selector == SELECTOR_ZAKS:
        tree, end = zaks_decode(bits, pos)
        if tree.n != n:
            raise DecodeError(f"Zaks body decodes to {tree.n} nodes, expected {n}")
        return tree
    if selector == SELECTOR_SIZECODE:
        return decode_left_sizes(n, bits, pos)
    raise DecodeError(f"unknown selector {selector}")


@dataclass
class TreeCode:
    """A serialized tree: count header, selector bit, and chosen body."""

    n: int
    selector: int | None
    bits: list[int]
    header_len: int
    body_len: int

    @property
    def bit_len(self) -> int:
        return len(self.bits)

    @property
    def payload_bits(self) -> int:
        return self.body_len

    def to_bytes(self) -> bytes:
        payload = bits_to_bytes(self.bits)
        return encode_varint(len(payload)) + payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "TreeCode":
        nbytes, pos = decode_varint(data)
        if pos + nbytes > len(data):
            raise DecodeError("truncated tree code")
        bits = bytes_to_bits(data[pos : pos + nbytes], nbytes * 8)
        n, hdr = decode_count(bits)
        selector = None
        body_len = len(bits) - hdr
        if n > 0:
            if hdr >= len(bits):
                raise DecodeError("missing selector bit")
            selector = bits[hdr]
            body_len = len(bits) - hdr - 1
        return cls(n=n, selector=selector, bits=bits, header_len=hdr, body_len=body_len)


def encode_hybrid(t: BinaryTree) -> TreeCode:
    """Header + selector + the shorter of {subtree-size code, Zaks code}."""
    header = encode_count(t.n)
    if t.n == 0:
        return TreeCode(n=0, selector=None, bits=header, header_len=len(header), body_len=0)
    sel, body = encode_body(t)
    return TreeCode(
        n=t.n,
        selector=sel,
        bits=header + [sel] + body,
        header_len=len(header),
        body_len=len(body),
    )


def encode_subtree_size(t: BinaryTree) -> TreeCode:
    """Header + the subtree-size body, regardless of its length."""
    if t.n < 1:
        raise ValueError("encode_subtree_size requires n >= 1")
    header = encode_count(t.n)
    body = encode_left_sizes(t)
    return TreeCode(
        n=t.n,
        selector=SELECTOR_SIZECODE,
        bits=header + [SELECTOR_SIZECODE] + body,
        header_len=len(header),
        body_len=len(body),
    )


def decode_tree(code) -> BinaryTree:
    """Inverse of encode_hybrid / encode_subtree_size."""
    bits = code.bits if isinstance(code, TreeCode) else list(code)
    n, pos = decode_count(bits)
    if n == 0:
        return BinaryTree()
    if pos >= len(bits):
        raise DecodeError("missing selector bit")
    selector = bits[pos]
    return decode_body(selector, bits, n, pos + 1)
