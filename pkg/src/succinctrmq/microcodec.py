"""Micro-tree type encodings and the shared lookup-table machinery.

A micro tree's *type* is the canonical Zaks sequence of its shape (portal
leaves included) plus two flag bits marking whether any portal hangs off a
left resp. right child edge.  Types index per-shape lookup tables that answer
micro-local queries in constant time.  Three payload encodings are supported:

* fixed:    flags + raw Zaks sequence (2s+3 bits for an s-node shape)
* entropy:  flags + selector + the shorter of {subtree-size code, Zaks};
            the node count is *not* stored (the per-micro index knows it),
            which keeps the per-shape cost within sum(lg st(v)) + O(1)
* huffman:  a canonical, length-limited Huffman codeword per distinct type
"""

from __future__ import annotations

import heapq
import struct
from array import array
from dataclasses import dataclass, field

from .bits import VariableCellArray
from .serial import DecodeError, bits_to_bytes, bytes_to_bits
from .treecode import decode_body, encode_body, zaks_decode
from .trees import BinaryTree, EulerTourLca

MODE_FIXED = "fixed"
MODE_ENTROPY = "entropy"
MODE_HUFFMAN = "huffman"
MODES = (MODE_FIXED, MODE_ENTROPY, MODE_HUFFMAN)

HUFFMAN_LENGTH_LIMIT = 128  # two machine words


def micro_type_key(zaks: list[int], flag_left: int, flag_right: int) -> tuple:
    """Canonical dictionary key: equal shapes and flags give equal keys."""
    return (bits_to_bytes(zaks), len(zaks), flag_left, flag_right)


class ShapeTable:
    """Per-type lookup tables: LCA pairs, inorder<->preorder, subtree sizes,
    left sizes, and left depths, all addressed by shape-local preorder."""

    __slots__ = ("tree", "ld", "_lca")

    def __init__(self, tree: BinaryTree):
        self.tree = tree
        n = tree.n
        ld = array("i", [0]) * (n + 1)
        for v in range(1, n + 1):
            l = tree.left[v]
            if l:
                ld[l] = ld[v] + 1
            r = tree.right[v]
            if r:
                ld[r] = ld[v]
        self.ld = ld
        children = [[] for _ in range(n + 1)]
        for v in range(1, n + 1):
            if tree.left[v]:
                children[v].append(tree.left[v])
            if tree.right[v]:
                children[v].append(tree.right[v])
        self._lca = EulerTourLca(n, children, 1)

    @classmethod
    def from_zaks(cls, bits) -> "ShapeTable":
        tree, _ = zaks_decode(list(bits))
        return cls(tree)

    def lca(self, a: int, b: int) -> int:
        return self._lca.lca(a, b)

    @property
    def in2pre(self):
        return self.tree.id_at_inorder

    @property
    def pre2in(self):
        return self.tree.inorder_of

    def space_bits(self) -> int:
        """Designed table footprint (reported, not asserted)."""
        n = self.tree.n
        w = max(1, (2 * n).bit_length())
        arrays = 6 * (n + 1) * w  # left, right, st, ls, in2pre, pre2in
        euler = 4 * (2 * n + 1) * w
        return arrays + euler + (n + 1) * w  # + left depths


class TypeRegistry:
    """Interned micro-tree types with lazily built lookup tables."""

    def __init__(self):
        self.keys: list[tuple] = []
        self._index: dict[tuple, int] = {}
        self._tables: dict[int, ShapeTable] = {}

    def intern(self, zaks: list[int], flag_left: int, flag_right: int) -> int:
        key = micro_type_key(zaks, flag_left, flag_right)
        idx = self._index.get(key)
        if idx is None:
            idx = len(self.keys)
            self.keys.append(key)
            self._index[key] = idx
        return idx

    def __len__(self) -> int:
        return len(self.keys)

    def zaks_bits(self, type_id: int) -> list[int]:
        data, nbits, _, _ = self.keys[type_id]
        return bytes_to_bits(data, nbits)

    def flags(self, type_id: int) -> tuple[int, int]:
        _, _, fl, fr = self.keys[type_id]
        return fl, fr

    def table(self, type_id: int) -> ShapeTable:
        tbl = self._tables.get(type_id)
        if tbl is None:
            tbl = ShapeTable.from_zaks(self.zaks_bits(type_id))
            self._tables[type_id] = tbl
        return tbl

    def tables_built(self) -> int:
        return len(self._tables)

    def tables_space_bits(self) -> int:
        return sum(t.space_bits() for t in self._tables.values())

    def to_bytes(self) -> bytes:
        out = bytearray(struct.pack("<I", len(self.keys)))
        for data, nbits, fl, fr in self.keys:
            out += struct.pack("<IBB", nbits, fl, fr)
            out += struct.pack("<I", len(data))
            out += data
        return bytes(out)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "TypeRegistry":
        reg = cls()
        (count,) = struct.unpack_from("<I", blob, 0)
        pos = 4
        for _ in range(count):
            nbits, fl, fr = struct.unpack_from("<IBB", blob, pos)
            pos += 6
            (nb,) = struct.unpack_from("<I", blob, pos)
            pos += 4
            data = blob[pos : pos + nb]
            pos += nb
            key = (data, nbits, fl, fr)
            reg._index[key] = len(reg.keys)
            reg.keys.append(key)
        return reg


def _huffman_lengths(weights: list[int]) -> list[int]:
    """Codeword lengths of a Huffman code; deterministic tie-breaking by
    (weight, first-symbol order).  weights must be positive."""
    m = len(weights)
    if m == 1:
        return [1]
    heap = [(w, i, -1 - i) for i, w in enumerate(weights)]  # leaf marker < 0
    nodes: list[tuple[int, int]] = []  # (child_a, child_b) for internal nodes
    heapq.heapify(heap)
    seq = m
    while len(heap) > 1:
        wa, _, a = heapq.heappop(heap)
        wb, _, b = heapq.heappop(heap)
        nodes.append((a, b))
        heapq.heappush(heap, (wa + wb, seq, len(nodes) - 1))
        seq += 1
    lengths = [0] * m
    depth = [0] * len(nodes)
    for idx in range(len(nodes) - 1, -1, -1):
        for child in nodes[idx]:
            if child < 0:
                lengths[-1 - child] = depth[idx] + 1
            else:
                depth[child] = depth[idx] + 1
    return lengths


def _package_merge_lengths(weights: list[int], limit: int) -> list[int]:
    """Length-limited prefix-code lengths (package-merge)."""
    m = len(weights)
    if m == 1:
        return [1]
    if (1 << limit) < m:
        raise ValueError("length limit too small for alphabet")
    order = sorted(range(m), key=lambda i: weights[i])
    items = [(weights[i], {i: 1}) for i in order]
    prev: list[tuple[int, dict]] = []
    for _ in range(limit):
        packages = []
        for j in range(0, len(prev) - 1, 2):
            w = prev[j][0] + prev[j + 1][0]
            counts = dict(prev[j][1])
            for sym, c in prev[j + 1][1].items():
                counts[sym] = counts.get(sym, 0) + c
            packages.append((w, counts))
        merged = sorted(items + packages, key=lambda e: e[0])
        prev = merged
    lengths = [0] * m
    for _, counts in prev[: 2 * m - 2]:
        for sym, c in counts.items():
            lengths[sym] += c
    return lengths


def _canonical_codes(lengths: dict[int, int], registry: TypeRegistry) -> dict[int, tuple[int, int]]:
    """Assign canonical codes ordered by (length, canonical key)."""
    symbols = sorted(lengths, key=lambda s: (lengths[s], registry.keys[s]))
    codes = {}
    code = 0
    prev_len = 0
    for s in symbols:
        code <<= lengths[s] - prev_len
        prev_len = lengths[s]
        codes[s] = (code, lengths[s])
        code += 1
    return codes


@dataclass
class Codebook:
    """Prefix-free code over micro-tree types."""

    mode: str
    codes: dict[int, tuple[int, int]] = field(default_factory=dict)  # type_id -> (code, len)
    _decode: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        self._decode = {cl: s for s, cl in self.codes.items()}

    def length(self, type_id: int) -> int:
        return self.codes[type_id][1]

    def kraft_sum(self) -> float:
        return sum(2.0 ** -l for _, l in self.codes.values())

    def encode_bits(self, type_id: int) -> list[int]:
        code, length = self.codes[type_id]
        return [(code >> (length - 1 - j)) & 1 for j in range(length)]

    def decode_prefix(self, bits, pos: int = 0) -> tuple[int, int]:
        """Return (type_id, next_pos)."""
        code = 0
        length = 0
        while length < HUFFMAN_LENGTH_LIMIT and pos + length < len(bits):
            code = (code << 1) | bits[pos + length]
            length += 1
            sym = self._decode.get((code, length))
            if sym is not None:
                return sym, pos + length
        raise DecodeError("invalid Huffman prefix")

    def serialized_bits(self) -> int:
        return len(self.to_bytes()) * 8

    def to_bytes(self) -> bytes:
        out = bytearray(struct.pack("<I", len(self.codes)))
        for type_id in sorted(self.codes):
            _, length = self.codes[type_id]
            out += struct.pack("<IH", type_id, length)
        return bytes(out)

    @classmethod
    def from_bytes(cls, blob: bytes, registry: TypeRegistry) -> "Codebook":
        (count,) = struct.unpack_from("<I", blob, 0)
        pos = 4
        lengths = {}
        for _ in range(count):
            type_id, length = struct.unpack_from("<IH", blob, pos)
            pos += 6
            lengths[type_id] = length
        return cls(mode=MODE_HUFFMAN, codes=_canonical_codes(lengths, registry))


def build_huffman_codebook(type_counts: dict[int, int], registry: TypeRegistry,
                           limit: int = HUFFMAN_LENGTH_LIMIT) -> Codebook:
    """Length-limited Huffman code over empirical type frequencies with
    deterministic tie-breaking (frequency, then canonical key)."""
    if not type_counts:
        raise ValueError("huffman codebook needs at least one micro tree")
    symbols = sorted(type_counts, key=lambda s: (type_counts[s], registry.keys[s]))
    weights = [type_counts[s] for s in symbols]
    lens = _huffman_lengths(weights)
    if max(lens) > limit:
        lens = _package_merge_lengths(weights, limit)
    lengths = {s: l for s, l in zip(symbols, lens)}
    return Codebook(mode=MODE_HUFFMAN, codes=_canonical_codes(lengths, registry))


class TypeArray:
    """Encoded micro-tree types in micro-tree order, in a variable-cell array."""

    def __init__(self, mode: str, vca: VariableCellArray, registry: TypeRegistry,
                 codebook: Codebook | None = None):
        self.mode = mode
        self.vca = vca
        self.registry = registry
        self.codebook = codebook

    def total_payload_bits(self) -> int:
        return self.vca.total_bits

    def type_bits(self, i: int) -> list[int]:
        value, size = self.vca.object_bits(i)
        return [(value >> (size - 1 - j)) & 1 for j in range(size)]

    def decode_type(self, i: int, shape_size: int | None = None):
        """Reconstruct (tree, flag_left, flag_right) for the i-th micro tree."""
        bits = self.type_bits(i)
        if self.mode == MODE_FIXED:
            tree, _ = zaks_decode(bits, 2)
            return tree, bits[0], bits[1]
        if self.mode == MODE_ENTROPY:
            if shape_size is None:
                raise ValueError("entropy mode needs the shape size")
            selector = bits[2]
            tree = decode_body(selector, bits, shape_size, 3)
            return tree, bits[0], bits[1]
        if self.mode == MODE_HUFFMAN:
            type_id, _ = self.codebook.decode_prefix(bits)
            tree, _ = zaks_decode(self.registry.zaks_bits(type_id))
            fl, fr = self.registry.flags(type_id)
            return tree, fl, fr
        raise ValueError(f"unknown mode {self.mode}")

    def space_bits(self) -> dict:
        sp = self.vca.space_bits()
        return {"payload": sp["payload"], "directory": sp["directory"]}


def _bits_to_object(bits: list[int]) -> tuple[int, int]:
    value = 0
    for b in bits:
        value = (value << 1) | b
    return value, len(bits)


def encode_types(type_ids: list[int], registry: TypeRegistry, mode: str,
                 codebook: Codebook | None = None) -> TypeArray:
    """Encode the micro-tree type sequence under the selected codec."""
    if mode not in MODES:
        raise ValueError(f"unknown codec mode {mode}")
    if mode == MODE_HUFFMAN and codebook is None:
        counts: dict[int, int] = {}
        for t in type_ids:
            counts[t] = counts.get(t, 0) + 1
        codebook = build_huffman_codebook(counts, registry)
    per_type: dict[int, tuple[int, int]] = {}
    objects = []
    for t in type_ids:
        obj = per_type.get(t)
        if obj is None:
            if mode == MODE_FIXED:
                fl, fr = registry.flags(t)
                bits = [fl, fr] + registry.zaks_bits(t)
            elif mode == MODE_ENTROPY:
                fl, fr = registry.flags(t)
                tree, _ = zaks_decode(registry.zaks_bits(t))
                selector, body = encode_body(tree)
                bits = [fl, fr, selector] + body
            else:
                bits = codebook.encode_bits(t)
            obj = _bits_to_object(bits)
            per_type[t] = obj
        objects.append(obj)
    vca = VariableCellArray(objects)
    return TypeArray(mode, vca, registry, codebook)
