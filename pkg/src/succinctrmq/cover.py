"""Two-tier tree covering: decomposition, tau-names, rank/select, LCA.

The tree splits into mini trees, each mini tree into micro trees.  Components
are disjoint connected subtrees with at most one outgoing edge in the root's
left subtree and one in its right subtree; outgoing edges materialize as
*portal* leaves in the parent component's shape (a mini tree's own outgoing
edges surface as extra portal leaves inside whichever micro tree holds the
source node, so a micro shape can carry up to four portals).  Nodes are
addressed by tau-names (mini index, mini-local micro index, micro-local shape
preorder); piecewise-constant arrays map global preorder/inorder positions to
tau-names, portal-offset arithmetic maps them back, and cross-component LCA
runs on the ordinal tree of all micro roots.
"""

from __future__ import annotations

import math
import struct
from array import array
from dataclasses import dataclass
from typing import NamedTuple

from . import opcount
from .bits import CompressedBitVec, PiecewiseConstantArray, _bitlen
from .microcodec import TypeRegistry
from .treecode import zaks_bits
from .trees import BinaryTree, EulerTourLca


class CoverError(ValueError):
    """A decomposition or cover invariant failed."""


# ---------------------------------------------------------------------------
# decomposition (single tier)
# ---------------------------------------------------------------------------

class Decomposition:
    """Partition of a tree's nodes into connected components of <= 2B nodes.

    Component ids are 1-based in root-preorder order; ``members[cid]`` lists
    the component's nodes in preorder.  Node ids must be preorder ranks
    (root = 1), which `BinaryTree` guarantees.
    """

    __slots__ = ("n", "B", "comp_of", "members", "roots")

    def __init__(self, n, B, comp_of, members, roots):
        self.n = n
        self.B = B
        self.comp_of = comp_of
        self.members = members
        self.roots = roots

    @property
    def count(self) -> int:
        return len(self.roots)


def _decompose_links(n: int, left, right, B: int) -> Decomposition:
    """Bottom-up packing: merge open child components into the parent; close a
    child when it already carries two external edges or when merging would
    exceed 2B nodes (the heavier child closes first, so every weight-closed
    component has >= B nodes)."""
    cap = 2 * B
    comp_of = array("i", [0]) * (n + 1)
    pend_w = array("i", [0]) * (n + 1)
    pend_e = array("i", [0]) * (n + 1)
    close_roots = []

    def close(r: int) -> None:
        close_roots.append(r)
        cid = len(close_roots)
        stack = [r]
        while stack:
            u = stack.pop()
            comp_of[u] = cid
            l, rr = left[u], right[u]
            if l and not comp_of[l]:
                stack.append(l)
            if rr and not comp_of[rr]:
                stack.append(rr)

    for v in range(n, 0, -1):  # reverse preorder = bottom-up
        e = 0
        opens = []
        for c in (left[v], right[v]):
            if not c:
                continue
            if comp_of[c]:
                e += 1
            elif pend_e[c] >= 2:
                close(c)
                e += 1
            else:
                opens.append(c)
        total = 1 + sum(pend_w[c] for c in opens)
        while total > cap and opens:
            if len(opens) == 2 and pend_w[opens[0]] > pend_w[opens[1]]:
                big = opens.pop(0)
            else:
                big = opens.pop()
            total -= pend_w[big]
            close(big)
            e += 1
        pend_w[v] = total
        pend_e[v] = e + sum(pend_e[c] for c in opens)
    close(1)

    # renumber components by root preorder
    order = sorted(range(1, len(close_roots) + 1), key=lambda cid: close_roots[cid - 1])
    remap = array("i", [0]) * (len(close_roots) + 1)
    roots = []
    for new_id, old_id in enumerate(order, start=1):
        remap[old_id] = new_id
        roots.append(close_roots[old_id - 1])
    members = [[] for _ in range(len(roots) + 1)]
    for v in range(1, n + 1):
        comp_of[v] = remap[comp_of[v]]
        members[comp_of[v]].append(v)
    return Decomposition(n, B, comp_of, members, roots)


def decompose(t: BinaryTree, B: int) -> Decomposition:
    """Decompose a binary tree into disjoint subtrees of <= 2B nodes with at
    most three external connections each; deterministic and linear time."""
    if t.n < 1:
        raise CoverError("decompose requires a non-empty tree")
    if B < 1:
        raise CoverError("B must be >= 1")
    return _decompose_links(t.n, t.left, t.right, B)


def verify_decomposition(t: BinaryTree, B: int, d: Decomposition) -> dict:
    """Brute-force checker for the decomposition contract.  Raises CoverError
    on any violation and returns measured statistics."""
    n = t.n
    if d.n != n or d.count < 1:
        raise CoverError("decomposition does not match tree")
    seen = 0
    for cid in range(1, d.count + 1):
        mem = d.members[cid]
        seen += len(mem)
        if not mem:
            raise CoverError(f"component {cid} is empty")
        if len(mem) > 2 * B:
            raise CoverError(f"component {cid} has {len(mem)} nodes > 2B = {2 * B}")
        root = d.roots[cid - 1]
        inside = set(mem)
        tops = [v for v in mem if t.parent[v] == 0 or t.parent[v] not in inside]
        if tops != [root]:
            raise CoverError(f"component {cid} is not a single-rooted subtree")
        for v in mem:
            if v != root and d.comp_of[t.parent[v]] != cid:
                raise CoverError(f"component {cid} is disconnected at node {v}")
        # external child edges, classified by side of the component root
        sides = {0: 0, 1: 0}
        child_comps = set()
        for v in mem:
            for side, c in ((0, t.left[v]), (1, t.right[v])):
                if c and c not in inside:
                    child_comps.add(d.comp_of[c])
                    if v == root:
                        sides[side] += 1
                    else:
                        lr = t.left[root]
                        in_left = bool(lr) and lr <= v < lr + t.st[lr]
                        sides[0 if in_left else 1] += 1
        if sides[0] > 1 or sides[1] > 1:
            raise CoverError(f"component {cid} has {sides} external edges per side")
        if len(child_comps) > 2:
            raise CoverError(f"component {cid} contracts to degree {len(child_comps)}")
    if seen != n:
        raise CoverError("components do not cover all nodes")
    bound = 3 * n / B + 4
    if d.count > bound:
        raise CoverError(f"component count {d.count} exceeds {bound}")
    return {
        "count": d.count,
        "max_size": max(len(d.members[c]) for c in range(1, d.count + 1)),
        "c1": (d.count - 1) * B / n if n else 0.0,
        "bound": bound,
    }


# ---------------------------------------------------------------------------
# two-tier cover
# ---------------------------------------------------------------------------

class TauName(NamedTuple):
    """(mini index, mini-local micro index, micro-local shape preorder)."""

    t1: int
    t2: int
    t3: int


PORTAL_MICRO = 0  # edge to another micro inside the same mini
PORTAL_MINI = 1  # edge to another mini


@dataclass(slots=True)
class _Portal:
    shape_pos: int  # shape preorder of the portal leaf
    kind: int
    s_mini: int  # members below the edge within this mini (0 for mini portals)
    child_k: int  # micro-root-tree preorder of the child micro


@dataclass(slots=True)
class _MicroInfo:
    t1: int
    t2: int
    k: int
    root_global: int
    root_minilocal: int
    n_members: int
    shape_size: int
    ld_minilocal: int
    type_id: int
    portals: list


@dataclass(slots=True)
class _MiniPortal:
    c_before: int  # members of the mini visited before diving into the edge
    side: int
    parent_minilocal: int
    s_global: int
    child_mini: int


@dataclass(slots=True)
class _MiniInfo:
    root_global: int
    ld_global: int
    n_members: int
    portals: list


def default_params(n: int) -> tuple[int, int]:
    """(mini_B, micro_B) defaults.  Micro trees of ~lg^2 n nodes keep both the
    per-micro index overhead and the per-micro code header at a few percent
    per node at desk scale; mini trees of ~lg^3 n make the mini tier
    negligible."""
    lg = math.log2(n + 2)
    micro_b = max(8, math.ceil(lg * lg))
    mini_b = max(4 * micro_b, math.ceil(lg ** 3))
    return mini_b, micro_b


class TreeCover:
    """Queryable two-tier cover; immutable after construction."""

    __slots__ = (
        "n", "mini_B", "micro_B", "minis", "micros", "micros_by_k", "registry",
        "type_ids", "c_pre", "v1_pre", "v2_pre", "v3_pre", "c_in", "v1_in",
        "v2_in", "v3_in", "tb", "_pca_pre", "_pca_in",
    )

    def __init__(self):
        raise TypeError("use build_cover or TreeCover.from_sections")

    @classmethod
    def _new(cls) -> "TreeCover":
        return object.__new__(cls)

    # ---- queries ----------------------------------------------------------

    def _micro(self, t1: int, t2: int) -> _MicroInfo:
        if not 1 <= t1 <= len(self.minis):
            raise ValueError(f"no mini tree {t1}")
        row = self.micros[t1 - 1]
        if not 1 <= t2 <= len(row):
            raise ValueError(f"no micro tree ({t1},{t2})")
        return row[t2 - 1]

    def _check_t3(self, m: _MicroInfo, t3: int) -> None:
        if not 1 <= t3 <= m.shape_size:
            raise ValueError(f"shape position {t3} out of range")
        for p in m.portals:
            opcount.add(1)
            if p.shape_pos == t3:
                raise ValueError(f"shape position {t3} is a portal copy, not a node")

    def nodeselect_preorder(self, p: int) -> TauName:
        if not 1 <= p <= self.n:
            raise IndexError(f"preorder index {p} out of range 1..{self.n}")
        r = self.c_pre.rank1(p)
        base = self.c_pre.select1(r)
        opcount.add(3)
        return TauName(self.v1_pre[r - 1], self.v2_pre[r - 1], self.v3_pre[r - 1] + (p - base))

    def _minilocal(self, m: _MicroInfo, t3: int) -> int:
        """Mini-local preorder of the member at shape position t3."""
        before = 0
        skipped = 0
        for p in m.portals:
            opcount.add(1)
            if p.shape_pos < t3:
                before += 1
                skipped += p.s_mini
        return m.root_minilocal - 1 + (t3 - before) + skipped

    def noderank_preorder(self, name: TauName) -> int:
        t1, t2, t3 = name
        m = self._micro(t1, t2)
        self._check_t3(m, t3)
        loc = self._minilocal(m, t3)
        mini = self.minis[t1 - 1]
        g = mini.root_global - 1 + loc
        for q in mini.portals:
            opcount.add(1)
            if q.c_before < loc:
                g += q.s_global
        return g

    def nodeselect_inorder(self, i: int) -> TauName:
        if not 1 <= i <= self.n:
            raise IndexError(f"inorder index {i} out of range 1..{self.n}")
        r = self.c_in.rank1(i)
        base = self.c_in.select1(r)
        t1, t2 = self.v1_in[r - 1], self.v2_in[r - 1]
        t3_in = self.v3_in[r - 1] + (i - base)
        m = self._micro(t1, t2)
        table = self.registry.table(m.type_id)
        opcount.add(4)
        return TauName(t1, t2, table.in2pre[t3_in])

    def _ls_global(self, m: _MicroInfo, t3: int, loc: int, table) -> int:
        """Left-subtree size of the node in the whole tree: shape value, plus
        portal subtrees hanging inside the shape-left range, plus mini-portal
        subtrees hanging inside the mini-local left range."""
        ls_shape = table.tree.ls[t3]
        lo, hi = t3 + 1, t3 + ls_shape
        ls_mini = ls_shape
        for p in m.portals:
            opcount.add(1)
            if lo <= p.shape_pos <= hi:
                ls_mini += p.s_mini - 1
        ls_g = ls_mini
        mini = self.minis[m.t1 - 1]
        for q in mini.portals:
            opcount.add(1)
            w = q.parent_minilocal
            if (w == loc and q.side == 0) or (loc < w <= loc + ls_mini):
                ls_g += q.s_global
        return ls_g

    def noderank_inorder(self, name: TauName) -> int:
        t1, t2, t3 = name
        m = self._micro(t1, t2)
        self._check_t3(m, t3)
        table = self.registry.table(m.type_id)
        loc = self._minilocal(m, t3)
        mini = self.minis[t1 - 1]
        g = mini.root_global - 1 + loc
        for q in mini.portals:
            opcount.add(1)
            if q.c_before < loc:
                g += q.s_global
        ls_g = self._ls_global(m, t3, loc, table)
        ld = mini.ld_global + m.ld_minilocal + table.ld[t3]
        opcount.add(4)
        return g + ls_g - ld

    def lca(self, u: TauName, v: TauName) -> TauName:
        mu = self._micro(u.t1, u.t2)
        self._check_t3(mu, u.t3)
        mv = self._micro(v.t1, v.t2)
        self._check_t3(mv, v.t3)
        if mu.k == mv.k:
            table = self.registry.table(mu.type_id)
            return TauName(u.t1, u.t2, table.lca(u.t3, v.t3))
        k = self.tb.lca(mu.k, mv.k)
        if k != mu.k and k != mv.k:
            # both entry points are portals of the meeting micro
            mk = self.micros_by_k[k - 1]
            pu = self._portal_toward(mk, mu.k)
            pv = self._portal_toward(mk, mv.k)
            table = self.registry.table(mk.type_id)
            return TauName(mk.t1, mk.t2, table.lca(pu.shape_pos, pv.shape_pos))
        if k == mv.k:
            u, v, mu, mv = v, u, mv, mu
        # mu's root is an ancestor of v: meet inside mu via the portal toward v
        p = self._portal_toward(mu, mv.k)
        table = self.registry.table(mu.type_id)
        return TauName(mu.t1, mu.t2, table.lca(u.t3, p.shape_pos))

    def _portal_toward(self, m: _MicroInfo, k_target: int) -> _Portal:
        for p in m.portals:
            opcount.add(1)
            if self.tb.is_ancestor(p.child_k, k_target):
                return p
        raise AssertionError("portal descent failed")  # pragma: no cover

    # ---- reporting ---------------------------------------------------------

    def micro_count(self) -> int:
        return len(self.micros_by_k)

    def all_micros(self):
        return self.micros_by_k

    def space_bits(self) -> dict:
        """Designed widths of every index structure, in bits.  Lazily built
        lookup tables are reported but belong to a separate budget."""
        n = self.n
        lg_n = _bitlen(n)
        lg_mini = _bitlen(2 * self.mini_B)
        lg_micro = _bitlen(2 * max(1, self.micro_B))
        lg_k = _bitlen(len(self.micros_by_k))
        lg_types = _bitlen(max(1, len(self.registry)))
        per_micro = 0
        for m in self.micros_by_k:
            per_micro += 2 * lg_mini  # root_minilocal, left depth within mini
            per_micro += 2 * lg_micro  # shape size, member count
            per_micro += lg_k + lg_types + 3
            per_micro += len(m.portals) * (lg_micro + 1 + lg_mini + lg_k)
        per_mini = 0
        for mini in self.minis:
            per_mini += 3 * lg_n + 2
            per_mini += len(mini.portals) * (2 * lg_mini + 1 + 2 * lg_n)
        return {
            "per_micro_tables": per_micro,
            "per_mini_tables": per_mini,
            "pca_preorder": self._pca_space(self._pca_pre, self.c_pre),
            "pca_inorder": self._pca_space(self._pca_in, self.c_in),
            "micro_root_tree": self._tb_space(),
            "lookup_tables_built": self.registry.tables_space_bits(),
        }

    @staticmethod
    def _pca_space(pcas, c) -> int:
        csp = c.space_bits()
        total = csp["payload"] + csp["directory"]
        for p in pcas:
            total += p.space_bits()["values"]
        return total

    def _tb_space(self) -> int:
        ell = len(self.micros_by_k)
        w = _bitlen(2 * ell + 1)
        tour = 2 * (2 * ell + 1) * w  # euler node + depth entries
        times = 3 * (ell + 1) * w  # first/enter/exit
        blocks = (2 * ell // EulerTourLca.BLOCK + 2) * w * 2
        return tour + times + blocks

    def dump(self) -> str:
        """Human-readable component listing."""
        out = [f"cover: n={self.n} minis={len(self.minis)} micros={len(self.micros_by_k)} "
               f"mini_B={self.mini_B} micro_B={self.micro_B} types={len(self.registry)}"]
        for t1, (mini, row) in enumerate(zip(self.minis, self.micros), start=1):
            out.append(f"mini {t1}: root_pre={mini.root_global} members={mini.n_members} "
                       f"portals={len(mini.portals)}")
            for m in row:
                ports = ",".join(f"@{p.shape_pos}->k{p.child_k}" for p in m.portals)
                out.append(f"  micro ({t1},{m.t2}) k={m.k}: root_pre={m.root_global} "
                           f"members={m.n_members} shape={m.shape_size} type={m.type_id} "
                           f"portals=[{ports}]")
        return "\n".join(out)

    # ---- serialization ------------------------------------------------------

    def to_sections(self) -> list[tuple[bytes, bytes]]:
        meta = struct.pack("<QQQ", self.n, self.mini_B, self.micro_B)
        mini_blob = bytearray(struct.pack("<I", len(self.minis)))
        for mini in self.minis:
            mini_blob += struct.pack("<QQQB", mini.root_global, mini.ld_global,
                                     mini.n_members, len(mini.portals))
            for q in mini.portals:
                mini_blob += struct.pack("<QBQQI", q.c_before, q.side,
                                         q.parent_minilocal, q.s_global, q.child_mini)
        micro_blob = bytearray(struct.pack("<I", len(self.minis)))
        for row in self.micros:
            micro_blob += struct.pack("<I", len(row))
            for m in row:
                micro_blob += struct.pack("<QQQQQQIB", m.k, m.root_global,
                                          m.root_minilocal, m.n_members, m.shape_size,
                                          m.ld_minilocal, m.type_id, len(m.portals))
                for p in m.portals:
                    micro_blob += struct.pack("<QBQQ", p.shape_pos, p.kind, p.s_mini, p.child_k)
        pca_blob = bytearray()
        for c, values in ((self.c_pre, (self.v1_pre, self.v2_pre, self.v3_pre)),
                          (self.c_in, (self.v1_in, self.v2_in, self.v3_in))):
            starts = c.positions()
            pca_blob += struct.pack("<I", len(starts))
            pca_blob += struct.pack(f"<{len(starts)}Q", *starts)
            for varr in values:
                pca_blob += struct.pack(f"<{len(varr)}Q", *varr)
        return [
            (b"CMET", bytes(meta)),
            (b"MINI", bytes(mini_blob)),
            (b"MICR", bytes(micro_blob)),
            (b"PCAS", bytes(pca_blob)),
            (b"TYPR", self.registry.to_bytes()),
        ]

    @classmethod
    def from_sections(cls, sections: dict[bytes, bytes]) -> "TreeCover":
        cov = cls._new()
        n, mini_b, micro_b = struct.unpack("<QQQ", sections[b"CMET"])
        cov.n, cov.mini_B, cov.micro_B = n, mini_b, micro_b
        blob = sections[b"MINI"]
        (count,) = struct.unpack_from("<I", blob, 0)
        pos = 4
        minis = []
        for _ in range(count):
            rg, ld, nm, np_ = struct.unpack_from("<QQQB", blob, pos)
            pos += 25
            portals = []
            for _ in range(np_):
                cb, side, pm, sg, cm = struct.unpack_from("<QBQQI", blob, pos)
                pos += 29
                portals.append(_MiniPortal(cb, side, pm, sg, cm))
            minis.append(_MiniInfo(rg, ld, nm, portals))
        cov.minis = minis
        blob = sections[b"MICR"]
        (count,) = struct.unpack_from("<I", blob, 0)
        pos = 4
        micros: list[list[_MicroInfo]] = []
        flat: list[_MicroInfo] = []
        for t1 in range(1, count + 1):
            (row_len,) = struct.unpack_from("<I", blob, pos)
            pos += 4
            row = []
            for t2 in range(1, row_len + 1):
                k, rg, rml, nm, ss, ld, tid, np_ = struct.unpack_from("<QQQQQQIB", blob, pos)
                pos += 53
                portals = []
                for _ in range(np_):
                    sp, kind, sm, ck = struct.unpack_from("<QBQQ", blob, pos)
                    pos += 25
                    portals.append(_Portal(sp, kind, sm, ck))
                row.append(_MicroInfo(t1, t2, k, rg, rml, nm, ss, ld, tid, portals))
            micros.append(row)
            flat.extend(row)
        cov.micros = micros
        flat.sort(key=lambda m: m.k)
        cov.micros_by_k = flat
        blob = sections[b"PCAS"]
        pos = 0
        arrays = []
        for _ in range(2):
            (runs,) = struct.unpack_from("<I", blob, pos)
            pos += 4
            starts = list(struct.unpack_from(f"<{runs}Q", blob, pos))
            pos += 8 * runs
            vals = []
            for _ in range(3):
                vals.append(array("q", struct.unpack_from(f"<{runs}Q", blob, pos)))
                pos += 8 * runs
            arrays.append((starts, vals))
        cov.registry = TypeRegistry.from_bytes(sections[b"TYPR"])
        cov.type_ids = [m.type_id for m in cov.micros_by_k]
        cov._install_pcas(arrays[0][0], arrays[0][1], order="pre")
        cov._install_pcas(arrays[1][0], arrays[1][1], order="in")
        cov._build_tb()
        return cov

    # ---- shared assembly -----------------------------------------------------

    def _install_pcas(self, starts, values, order: str) -> None:
        c = CompressedBitVec.from_positions(self.n, starts)
        pcas = tuple(
            PiecewiseConstantArray(vals, run_starts=starts, n=self.n, c=c, c_shared=(idx > 0))
            for idx, vals in enumerate(values)
        )
        if order == "pre":
            self.c_pre = c
            self.v1_pre, self.v2_pre, self.v3_pre = values
            self._pca_pre = pcas
        else:
            self.c_in = c
            self.v1_in, self.v2_in, self.v3_in = values
            self._pca_in = pcas

    def _build_tb(self) -> None:
        ell = len(self.micros_by_k)
        children: list[list[int]] = [[] for _ in range(ell + 1)]
        has_parent = [False] * (ell + 1)
        for m in self.micros_by_k:
            for p in m.portals:
                children[m.k].append(p.child_k)
                has_parent[p.child_k] = True
        root_k = 0
        for m in self.micros_by_k:
            children[m.k].sort(key=lambda k: self.micros_by_k[k - 1].root_global)
            if not has_parent[m.k]:
                root_k = m.k
        self.tb = EulerTourLca(ell, children, root_k)


def build_cover(t: BinaryTree, mini_b: int | None = None, micro_b: int | None = None) -> TreeCover:
    """Build the two-tier cover of a binary tree."""
    n = t.n
    if n < 1:
        raise CoverError("build_cover requires a non-empty tree")
    d_mini, d_micro = default_params(n)
    if micro_b is None:
        micro_b = d_micro
    if mini_b is None:
        mini_b = max(d_mini, micro_b)
    if micro_b < 1 or mini_b < micro_b:
        raise CoverError("need 1 <= micro_b <= mini_b")

    cov = TreeCover._new()
    cov.n = n
    cov.mini_B = mini_b
    cov.micro_B = micro_b
    registry = TypeRegistry()
    cov.registry = registry

    left, right, st = t.left, t.right, t.st

    tier1 = decompose(t, mini_b)
    n_minis = tier1.count

    ld_global = array("i", [0]) * (n + 1)
    for v in range(1, n + 1):
        l = left[v]
        if l:
            ld_global[l] = ld_global[v] + 1
        r = right[v]
        if r:
            ld_global[r] = ld_global[v]

    # transient per-node maps feeding the PCA passes
    tau1_of = tier1.comp_of
    tau2_of = array("i", [0]) * (n + 1)
    shape_pre_of = array("i", [0]) * (n + 1)
    shape_in_of = array("i", [0]) * (n + 1)

    minis: list[_MiniInfo] = []
    micros: list[list[_MicroInfo]] = []
    micro_targets: list[list[tuple]] = []  # per (t1,t2): portal target descriptors
    micro_effective_b = max(1, micro_b - 2)

    for m_id in range(1, n_minis + 1):
        mem = tier1.members[m_id]
        k_mem = len(mem)
        loc_of = {g: i for i, g in enumerate(mem, start=1)}
        lleft = array("i", [0]) * (k_mem + 1)
        lright = array("i", [0]) * (k_mem + 1)
        mini_portal_edges = {}  # (local id, side) -> target mini id
        for i, g in enumerate(mem, start=1):
            for side, c in ((0, left[g]), (1, right[g])):
                if not c:
                    continue
                if tier1.comp_of[c] == m_id:
                    if side == 0:
                        lleft[i] = loc_of[c]
                    else:
                        lright[i] = loc_of[c]
                else:
                    mini_portal_edges[(i, side)] = tier1.comp_of[c]
        if len(mini_portal_edges) > 2:
            raise CoverError("mini tree with more than two outgoing edges")

        st_loc = array("i", [0]) * (k_mem + 1)
        ls_loc = array("i", [0]) * (k_mem + 1)
        for i in range(k_mem, 0, -1):
            s = 1
            if lleft[i]:
                s += st_loc[lleft[i]]
                ls_loc[i] = st_loc[lleft[i]]
            if lright[i]:
                s += st_loc[lright[i]]
            st_loc[i] = s
        ld_loc = array("i", [0]) * (k_mem + 1)
        for i in range(1, k_mem + 1):
            if lleft[i]:
                ld_loc[lleft[i]] = ld_loc[i] + 1
            if lright[i]:
                ld_loc[lright[i]] = ld_loc[i]

        tier2 = _decompose_links(k_mem, lleft, lright, micro_effective_b)

        mini_portal_records = []
        for (i, side), target_mini in sorted(mini_portal_edges.items()):
            c_before = i if side == 0 else i + ls_loc[i]
            mini_portal_records.append(_MiniPortal(c_before, side, i, 0, target_mini))
        minis.append(_MiniInfo(mem[0], ld_global[mem[0]], k_mem, mini_portal_records))

        row: list[_MicroInfo] = []
        row_targets: list[tuple] = []
        for mu_id in range(1, tier2.count + 1):
            mu_mem = tier2.members[mu_id]
            mu_root = tier2.roots[mu_id - 1]
            shape_left = [0, 0]
            shape_right = [0, 0]
            counter = 0
            portals: list[_Portal] = []
            targets: list[tuple] = []
            flag_l = flag_r = 0
            stack = [(mu_root, 0, 0)]  # (payload, parent shape id, side); portals < 0
            while stack:
                node, par, side = stack.pop()
                counter += 1
                sid = counter
                if sid >= len(shape_left):
                    shape_left.append(0)
                    shape_right.append(0)
                if par:
                    if side == 0:
                        shape_left[par] = sid
                    else:
                        shape_right[par] = sid
                if node < 0:
                    portals[-node - 1].shape_pos = sid
                    continue
                g = mem[node - 1]
                shape_pre_of[g] = sid
                tau2_of[g] = mu_id
                # push right first so the left child pops first (preorder ids)
                for child_side, c in ((1, lright[node]), (0, lleft[node])):
                    if c:
                        if tier2.comp_of[c] == mu_id:
                            stack.append((c, sid, child_side))
                        else:
                            stack.append((-len(portals) - 1, sid, child_side))
                            portals.append(_Portal(0, PORTAL_MICRO, st_loc[c], 0))
                            targets.append(("micro", m_id, tier2.comp_of[c]))
                            if child_side == 0:
                                flag_l = 1
                            else:
                                flag_r = 1
                    elif (node, child_side) in mini_portal_edges:
                        stack.append((-len(portals) - 1, sid, child_side))
                        portals.append(_Portal(0, PORTAL_MINI, 0, 0))
                        targets.append(("mini", mini_portal_edges[(node, child_side)]))
                        if child_side == 0:
                            flag_l = 1
                        else:
                            flag_r = 1
            shape_size = counter
            if micro_b >= 3 and shape_size > 2 * micro_b:
                raise CoverError(  # pragma: no cover - guards decomposition bugs
                    f"micro shape of {shape_size} nodes exceeds 2*micro_b={2 * micro_b}")
            shape = BinaryTree.from_links(shape_size, shape_left, shape_right, 1)
            for lid in mu_mem:
                g = mem[lid - 1]
                shape_in_of[g] = shape.inorder_of[shape_pre_of[g]]
            if portals:
                paired = sorted(zip(portals, targets), key=lambda e: e[0].shape_pos)
                portals = [p for p, _ in paired]
                targets = [tg for _, tg in paired]
            type_id = registry.intern(zaks_bits(shape), flag_l, flag_r)
            row.append(_MicroInfo(
                t1=m_id, t2=mu_id, k=0,
                root_global=mem[mu_root - 1],
                root_minilocal=mu_root,
                n_members=len(mu_mem),
                shape_size=shape_size,
                ld_minilocal=ld_loc[mu_root],
                type_id=type_id,
                portals=portals,
            ))
            row_targets.append(targets)
        micros.append(row)
        micro_targets.append(row_targets)

    # global subtree sizes of mini-portal targets
    for mini in minis:
        for q in mini.portals:
            q.s_global = st[tier1.roots[q.child_mini - 1]]

    # assign micro-root-tree preorder ids (k) and resolve portal child links
    resolved: list[list[list[_MicroInfo]]] = []
    for t1, row in enumerate(micros, start=1):
        row_children = []
        for t2, m in enumerate(row, start=1):
            kids = []
            for tgt in micro_targets[t1 - 1][t2 - 1]:
                if tgt[0] == "micro":
                    kids.append(micros[tgt[1] - 1][tgt[2] - 1])
                else:
                    kids.append(micros[tgt[1] - 1][0])
            row_children.append(kids)
        resolved.append(row_children)
    counter = 0
    stack = [micros[0][0]]
    while stack:
        m = stack.pop()
        counter += 1
        m.k = counter
        kids = resolved[m.t1 - 1][m.t2 - 1]
        for child in sorted(kids, key=lambda c: c.root_global, reverse=True):
            stack.append(child)
    if counter != sum(len(r) for r in micros):
        raise CoverError("micro-root tree does not reach every micro tree")
    for t1, row in enumerate(micros, start=1):
        for t2, m in enumerate(row, start=1):
            kids = resolved[t1 - 1][t2 - 1]
            for p, child in zip(m.portals, kids):
                p.child_k = child.k
    cov.minis = minis
    cov.micros = micros
    flat = [m for row in micros for m in row]
    flat.sort(key=lambda m: m.k)
    cov.micros_by_k = flat
    cov.type_ids = [m.type_id for m in flat]

    # piecewise-constant arrays over both traversal orders; a run breaks when
    # the (mini, micro) pair changes or the shape-local index fails to step
    for order in ("pre", "in"):
        starts = []
        v1 = array("q")
        v2 = array("q")
        v3 = array("q")
        pt1 = pt2 = pt3 = -1
        for pos in range(1, n + 1):
            g = pos if order == "pre" else t.id_at_inorder[pos]
            t1 = tau1_of[g]
            t2 = tau2_of[g]
            t3 = shape_pre_of[g] if order == "pre" else shape_in_of[g]
            if t1 != pt1 or t2 != pt2 or t3 != pt3 + 1:
                starts.append(pos)
                v1.append(t1)
                v2.append(t2)
                v3.append(t3)
            pt1, pt2, pt3 = t1, t2, t3
        cov._install_pcas(starts, (v1, v2, v3), order=order)

    cov._build_tb()
    return cov
