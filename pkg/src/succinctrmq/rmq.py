"""User-facing range-minimum index over the compressed Cartesian tree.

The index keeps only the tree cover of the Cartesian tree; the input array is
discarded at build time (encoding model), so queries never consult it:
rmq(i, j) = inorder-rank(lca(inorder-select(i), inorder-select(j))).
"""

from __future__ import annotations

import random

from .bits import VariableCellArray
from .cover import TreeCover, build_cover
from .microcodec import MODE_ENTROPY, MODE_HUFFMAN, MODES, Codebook, TypeArray, encode_types
from .serial import DecodeError, read_stream, write_stream
from .trees import build_cartesian


class RmqIndex:
    """Constant-time range-minimum queries in compressed space."""

    __slots__ = ("n", "codec", "cover", "type_array")

    def __init__(self, n: int, codec: str, cover: TreeCover, type_array: TypeArray):
        self.n = n
        self.codec = codec
        self.cover = cover
        self.type_array = type_array

    @classmethod
    def build(cls, values, codec: str = MODE_ENTROPY, mini_b: int | None = None,
              micro_b: int | None = None, validate: bool = True) -> "RmqIndex":
        vals = list(values)
        if not vals:
            raise ValueError("cannot build an RMQ index over an empty array")
        if codec not in MODES:
            raise ValueError(f"unknown codec {codec!r}")
        tree = build_cartesian(vals)
        cover = build_cover(tree, mini_b=mini_b, micro_b=micro_b)
        type_array = encode_types(cover.type_ids, cover.registry, codec)
        index = cls(len(vals), codec, cover, type_array)
        if validate:
            index._validate_sample(vals)
        return index

    def query(self, i: int, j: int) -> int:
        """Leftmost index of the minimum in positions i..j (1-based)."""
        if not 1 <= i <= j <= self.n:
            raise IndexError(f"invalid range ({i},{j}) for n={self.n}")
        c = self.cover
        u = c.nodeselect_inorder(i)
        v = c.nodeselect_inorder(j)
        return c.noderank_inorder(c.lca(u, v))

    def _validate_sample(self, vals) -> None:
        """Build-time spot check against the source array (then forget it)."""
        rng = random.Random(0xC0FFEE ^ self.n)
        n = self.n
        queries = [(1, 1), (1, n), (n, n)]
        for _ in range(min(128, n * n)):
            i = rng.randint(1, n)
            j = min(n, i + rng.randint(0, 63))
            queries.append((i, j))
        for _ in range(16):
            i = rng.randint(1, n)
            j = rng.randint(i, n)
            queries.append((i, j))
        for i, j in queries:
            got = self.query(i, j)
            best = i
            for k in range(i + 1, j + 1):
                if vals[k - 1] < vals[best - 1]:
                    best = k
            if got != best:
                raise AssertionError(
                    f"build validation failed: rmq({i},{j}) = {got}, scan says {best}")

    # ---- reporting ----------------------------------------------------------

    def space_report(self) -> dict:
        cov = self.cover
        aux = cov.space_bits()
        ta_space = self.type_array.space_bits()
        codebook_bits = 0
        if self.codec == MODE_HUFFMAN and self.type_array.codebook is not None:
            # codeword lengths plus the canonical keys needed to decode
            codebook_bits = self.type_array.codebook.serialized_bits()
            codebook_bits += len(cov.registry.to_bytes()) * 8
        breakdown = {
            "micro_payload": ta_space["payload"],
            "codebook": codebook_bits,
            "type_directory": ta_space["directory"],
            "index_directories": (aux["per_micro_tables"] + aux["per_mini_tables"]
                                  + aux["pca_preorder"] + aux["pca_inorder"]),
            "macro_tiers": aux["micro_root_tree"],
        }
        total = sum(breakdown.values())
        return {
            "n": self.n,
            "codec": self.codec,
            "total_bits": total,
            "bits_per_element": total / self.n,
            "micro_payload_per_element": breakdown["micro_payload"] / self.n,
            "breakdown": breakdown,
            "aux_detail": aux,
            "micro_trees": cov.micro_count(),
            "mini_trees": len(cov.minis),
            "distinct_types": len(cov.registry),
        }

    # ---- serialization -------------------------------------------------------

    def to_bytes(self) -> bytes:
        sections = [(b"RMET", self.codec.encode("ascii").ljust(8, b"\0"))]
        sections += self.cover.to_sections()
        sections.append((b"TARR", self.type_array.vca.to_bytes()))
        if self.type_array.codebook is not None:
            sections.append((b"HUFF", self.type_array.codebook.to_bytes()))
        return write_stream(1, sections)

    @classmethod
    def from_bytes(cls, data: bytes) -> "RmqIndex":
        version, sections = read_stream(data)
        if version != 1:
            raise DecodeError(f"unsupported index version {version}")
        if b"RMET" not in sections:
            raise DecodeError("missing index metadata")
        codec = sections[b"RMET"].rstrip(b"\0").decode("ascii")
        if codec not in MODES:
            raise DecodeError(f"unknown codec {codec!r} in index file")
        cover = TreeCover.from_sections(sections)
        vca = VariableCellArray.from_bytes(sections[b"TARR"])
        codebook = None
        if codec == MODE_HUFFMAN:
            if b"HUFF" not in sections:
                raise DecodeError("huffman index without codebook section")
            codebook = Codebook.from_bytes(sections[b"HUFF"], cover.registry)
        type_array = TypeArray(codec, vca, cover.registry, codebook)
        return cls(cover.n, codec, cover, type_array)


class OracleRmq:
    """Reference oracles: naive scan and an O(n log n)-space sparse table,
    both with exact leftmost-minimum semantics."""

    def __init__(self, values, method: str = "naive"):
        self.values = list(values)
        self.n = len(self.values)
        self.method = method
        if method == "sparse":
            self._build_sparse()
        elif method != "naive":
            raise ValueError("method must be 'naive' or 'sparse'")

    def _build_sparse(self) -> None:
        n = self.n
        vals = self.values
        log = [0] * (n + 1)
        for i in range(2, n + 1):
            log[i] = log[i >> 1] + 1
        self._log = log
        table = [list(range(n))]
        span = 1
        while 2 * span <= n:
            prev = table[-1]
            cur = []
            for i in range(n - 2 * span + 1):
                a, b = prev[i], prev[i + span]
                cur.append(a if vals[a] <= vals[b] else b)
            table.append(cur)
            span *= 2
        self._table = table

    def query(self, i: int, j: int) -> int:
        if not 1 <= i <= j <= self.n:
            raise IndexError(f"invalid range ({i},{j}) for n={self.n}")
        if self.method == "naive":
            vals = self.values
            best = i
            for k in range(i + 1, j + 1):
                if vals[k - 1] < vals[best - 1]:
                    best = k
            return best
        k = self._log[j - i + 1]
        a = self._table[k][i - 1]
        b = self._table[k][j - (1 << k)]
        return (a if self.values[a] <= self.values[b] else b) + 1


def adversarial_arrays(n: int, seed: int = 0) -> dict[str, list[int]]:
    """Standard adversarial RMQ inputs."""
    rng = random.Random(seed)
    up = list(range(1, n // 2 + 1))
    down = list(range(n - len(up), 0, -1))
    return {
        "sorted": list(range(1, n + 1)),
        "reverse": list(range(n, 0, -1)),
        "organ_pipe": up + down,
        "constant": [7] * n,
        "few_distinct": [rng.randint(0, 2) for _ in range(n)],
    }
