"""Static binary trees, Cartesian-tree construction, and shape statistics.

Nodes are identified by their preorder rank (1-based, root = 1); inorder is a
derived permutation.  All traversals are iterative so degenerate shapes
(paths of many thousands of nodes) stay within the interpreter's limits.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass

import numpy as np

from . import opcount


class BinaryTree:
    """Pointer-free static binary tree.

    Arrays are 1-based (slot 0 unused); ``left``/``right`` hold child ids with
    0 as the null sentinel.  ``st`` is the subtree size, ``ls`` the left
    subtree size, ``inorder_of[v]`` the inorder index of node v and
    ``id_at_inorder`` its inverse.
    """

    __slots__ = ("n", "left", "right", "parent", "st", "ls", "inorder_of", "id_at_inorder", "_depth")

    def __init__(self):
        self.n = 0
        self.left = array("i", [0])
        self.right = array("i", [0])
        self.parent = array("i", [0])
        self.st = array("i", [0])
        self.ls = array("i", [0])
        self.inorder_of = array("i", [0])
        self.id_at_inorder = array("i", [0])
        self._depth = None

    @property
    def root(self) -> int:
        return 1 if self.n else 0

    @classmethod
    def from_links(cls, n: int, left, right, root: int) -> "BinaryTree":
        """Build from child arrays in any 1-based id space; ids are renumbered
        to preorder ranks."""
        t = cls()
        if n == 0:
            return t
        order = array("i", [0]) * (n + 1)
        newid = array("i", [0]) * (n + 1)
        stack = [root]
        k = 0
        while stack:
            v = stack.pop()
            k += 1
            order[k] = v
            newid[v] = k
            r = right[v]
            if r:
                stack.append(r)
            l = left[v]
            if l:
                stack.append(l)
        if k != n:
            raise ValueError("child links do not form a single tree with n nodes")
        nleft = array("i", [0]) * (n + 1)
        nright = array("i", [0]) * (n + 1)
        nparent = array("i", [0]) * (n + 1)
        for v in range(1, n + 1):
            old = order[v]
            l, r = left[old], right[old]
            if l:
                nleft[v] = newid[l]
                nparent[newid[l]] = v
            if r:
                nright[v] = newid[r]
                nparent[newid[r]] = v
        st = array("i", [0]) * (n + 1)
        ls = array("i", [0]) * (n + 1)
        for v in range(n, 0, -1):  # reverse preorder is bottom-up
            s = 1
            l, r = nleft[v], nright[v]
            if l:
                s += st[l]
                ls[v] = st[l]
            if r:
                s += st[r]
            st[v] = s
        inorder_of = array("i", [0]) * (n + 1)
        id_at_inorder = array("i", [0]) * (n + 1)
        stack = []
        cur = 1
        k = 0
        while stack or cur:
            while cur:
                stack.append(cur)
                cur = nleft[cur]
            cur = stack.pop()
            k += 1
            inorder_of[cur] = k
            id_at_inorder[k] = cur
            cur = nright[cur]
        t.n = n
        t.left, t.right, t.parent = nleft, nright, nparent
        t.st, t.ls = st, ls
        t.inorder_of, t.id_at_inorder = inorder_of, id_at_inorder
        return t

    @classmethod
    def from_shape(cls, shape) -> "BinaryTree":
        """Build from nested (left, right) tuples; None is the empty tree."""
        if shape is None:
            return cls()
        left = array("i", [0, 0])
        right = array("i", [0, 0])
        n = 1
        stack = [(1, shape)]
        while stack:
            v, (l, r) = stack.pop()
            if l is not None:
                n += 1
                left.append(0)
                right.append(0)
                left[v] = n
                stack.append((n, l))
            if r is not None:
                n += 1
                left.append(0)
                right.append(0)
                right[v] = n
                stack.append((n, r))
        return cls.from_links(n, left, right, 1)

    def depth(self, v: int) -> int:
        if self._depth is None:
            d = array("i", [0]) * (self.n + 1)
            for u in range(2, self.n + 1):
                d[u] = d[self.parent[u]] + 1
            self._depth = d
        return self._depth[v]

    def lca(self, u: int, v: int) -> int:
        """Pointer-walk LCA; reference oracle, not constant time."""
        while self.depth(u) > self.depth(v):
            u = self.parent[u]
        while self.depth(v) > self.depth(u):
            v = self.parent[v]
        while u != v:
            u = self.parent[u]
            v = self.parent[v]
        return u

    def same_shape(self, other: "BinaryTree") -> bool:
        return self.n == other.n and self.left == other.left and self.right == other.right

    def to_paren(self) -> str:
        """Parenthesized shape; '.' is an empty subtree."""
        if self.n == 0:
            return "."
        out = []
        stack = [(1, 0)]
        while stack:
            v, phase = stack.pop()
            if v == 0:
                out.append(".")
                continue
            if phase == 0:
                out.append("(")
                stack.append((v, 1))
                stack.append((self.right[v], 0))
                stack.append((self.left[v], 0))
            else:
                out.append(")")
        # children were pushed right-then-left so they pop left-then-right
        return "".join(out)

    def __repr__(self):
        return f"BinaryTree(n={self.n})"


def _cartesian_from_ranks(ranks) -> BinaryTree:
    """Stack-based linear construction; positions (1-based) are inorder."""
    n = len(ranks)
    if n == 0:
        return BinaryTree()
    left = array("i", [0]) * (n + 1)
    right = array("i", [0]) * (n + 1)
    stack = []
    for pos in range(1, n + 1):
        r = ranks[pos - 1]
        last = 0
        while stack and ranks[stack[-1] - 1] > r:
            last = stack.pop()
        if last:
            left[pos] = last
        if stack:
            right[stack[-1]] = pos
        stack.append(pos)
    return BinaryTree.from_links(n, left, right, stack[0])


def build_cartesian(values) -> BinaryTree:
    """Cartesian tree of `values`: root at the minimum, left/right subtrees on
    the subarrays.  Equal keys break ties to the leftmost minimum.  The node
    with inorder index i corresponds to values[i-1]."""
    vals = list(values)
    n = len(vals)
    order = sorted(range(n), key=lambda i: (vals[i], i))
    ranks = [0] * n
    for r, idx in enumerate(order):
        ranks[idx] = r
    return _cartesian_from_ranks(ranks)


def sample_random_bst(n: int, seed: int) -> BinaryTree:
    """Cartesian tree of a uniformly random permutation; deterministic per seed."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    return _cartesian_from_ranks(perm.tolist())


@dataclass(frozen=True)
class EntropyReport:
    hst: float
    hn: float
    per_node: float


def subtree_entropy(t: BinaryTree) -> EntropyReport:
    """Sum of lg(subtree size) over all nodes, with the model entropy for
    comparison."""
    if t.n == 0:
        return EntropyReport(0.0, 0.0, 0.0)
    sizes = np.frombuffer(t.st, dtype=np.int32)[1:].astype(np.float64)
    hst = float(np.log2(sizes).sum())
    return EntropyReport(hst, model_entropy(t.n), hst / t.n)


_H: list[float] = [0.0, 0.0]
_HSUM: list[float] = [0.0, 0.0]


def model_entropy(n: int) -> float:
    """Shape entropy of the random-permutation model:
    H(0) = H(1) = 0, H(n) = lg n + (1/n) * sum_{i=1..n} (H(i-1) + H(n-i))."""
    if n < 0:
        raise ValueError("n must be non-negative")
    while len(_H) <= n:
        m = len(_H)
        h = math.log2(m) + 2.0 / m * _HSUM[m - 1]
        _H.append(h)
        _HSUM.append(_HSUM[m - 1] + h)
    return _H[n]


def model_entropy_closed(n: int) -> float:
    """Closed-form evaluation of the same recurrence; cross-checks the DP."""
    if n <= 1:
        return 0.0
    i = np.arange(2, n, dtype=np.float64)
    if i.size == 0:
        s = 0.0
    else:
        s = float(np.sum(np.log2(i) / ((i + 2.0) * (i + 1.0))))
    return math.log2(n) + 2.0 * (n + 1) * s


#: limit of model_entropy(n)/n for large n (bits per element)
ENTROPY_RATE_LIMIT = 1.7363771


def shape_probability(t: BinaryTree) -> float:
    """Probability of this shape under the random-permutation model:
    product over nodes of 1/st(v).  Underflows to 0.0 for very large trees."""
    if t.n < 1:
        raise ValueError("shape_probability requires n >= 1")
    return float(2.0 ** -subtree_entropy(t).hst)


def enumerate_shapes(n: int):
    """Yield every binary-tree shape with n nodes (Catalan enumeration)."""
    memo = {0: [None]}

    def shapes(k):
        if k not in memo:
            out = []
            for i in range(k):
                for l in shapes(i):
                    for r in shapes(k - 1 - i):
                        out.append((l, r))
            memo[k] = out
        return memo[k]

    for s in shapes(n):
        yield BinaryTree.from_shape(s)


def left_path(n: int) -> BinaryTree:
    if n == 0:
        return BinaryTree()
    left = array("i", [0] + [v + 1 if v < n else 0 for v in range(1, n + 1)])
    right = array("i", [0]) * (n + 1)
    return BinaryTree.from_links(n, left, right, 1)


def right_path(n: int) -> BinaryTree:
    if n == 0:
        return BinaryTree()
    right = array("i", [0] + [v + 1 if v < n else 0 for v in range(1, n + 1)])
    left = array("i", [0]) * (n + 1)
    return BinaryTree.from_links(n, left, right, 1)


def zigzag_path(n: int) -> BinaryTree:
    left = array("i", [0]) * (n + 1)
    right = array("i", [0]) * (n + 1)
    for v in range(1, n):
        if v % 2:
            right[v] = v + 1
        else:
            left[v] = v + 1
    return BinaryTree.from_links(n, left, right, 1) if n else BinaryTree()


def complete_tree(levels: int) -> BinaryTree:
    n = (1 << levels) - 1
    left = array("i", [0]) * (n + 1)
    right = array("i", [0]) * (n + 1)
    for v in range(1, n + 1):
        if 2 * v <= n:
            left[v] = 2 * v
        if 2 * v + 1 <= n:
            right[v] = 2 * v + 1
    return BinaryTree.from_links(n, left, right, 1) if n else BinaryTree()


class EulerTourLca:
    """Constant-time LCA and ancestor tests over a rooted ordinal tree.

    Euler tour with depth minima over fixed 32-entry blocks plus a sparse
    table over the block minima: queries scan at most two partial blocks,
    so the operation count is bounded independently of the tree size.
    """

    BLOCK = 32

    __slots__ = ("first", "enter", "exit", "_euler", "_edepth", "_bmin_pos", "_sparse", "_log")

    def __init__(self, size: int, children, root: int):
        """children: list of child-id lists, indexed 1..size."""
        euler = array("i")
        edepth = array("i")
        first = array("i", [0]) * (size + 1)
        enter = array("i", [0]) * (size + 1)
        exit_ = array("i", [0]) * (size + 1)
        depth = array("i", [0]) * (size + 1)
        timer = 0
        stack = [(root, 0)]
        while stack:
            v, ci = stack[-1]
            if ci == 0:
                timer += 1
                enter[v] = timer
                first[v] = len(euler)
            euler.append(v)
            edepth.append(depth[v])
            kids = children[v]
            if ci < len(kids):
                stack[-1] = (v, ci + 1)
                c = kids[ci]
                depth[c] = depth[v] + 1
                stack.append((c, 0))
            else:
                timer += 1
                exit_[v] = timer
                stack.pop()
        self.first = first
        self.enter = enter
        self.exit = exit_
        self._euler = euler
        self._edepth = edepth
        # block minima (position of minimum depth per block)
        nb = (len(euler) + self.BLOCK - 1) // self.BLOCK
        bpos = array("i")
        for b in range(nb):
            lo = b * self.BLOCK
            hi = min(lo + self.BLOCK, len(euler))
            best = lo
            for i in range(lo + 1, hi):
                if edepth[i] < edepth[best]:
                    best = i
            bpos.append(best)
        self._bmin_pos = bpos
        # sparse table of argmin positions over blocks
        log = array("b", [0]) * (nb + 1)
        for i in range(2, nb + 1):
            log[i] = log[i >> 1] + 1
        self._log = log
        levels = [bpos]
        span = 1
        while 2 * span <= nb:
            prev = levels[-1]
            cur = array("i")
            for i in range(nb - 2 * span + 1):
                a, b = prev[i], prev[i + span]
                cur.append(a if edepth[a] <= edepth[b] else b)
            levels.append(cur)
            span *= 2
        self._sparse = levels

    def _argmin_blocks(self, b1: int, b2: int) -> int:
        """Euler position of the minimum depth across blocks b1..b2 inclusive."""
        k = self._log[b2 - b1 + 1]
        left = self._sparse[k][b1]
        right = self._sparse[k][b2 - (1 << k) + 1]
        opcount.add(4)
        return left if self._edepth[left] <= self._edepth[right] else right

    def lca(self, a: int, b: int) -> int:
        ia, ib = self.first[a], self.first[b]
        if ia > ib:
            ia, ib = ib, ia
        edepth = self._edepth
        ba, bb = ia // self.BLOCK, ib // self.BLOCK
        best = ia
        if ba == bb:
            for i in range(ia + 1, ib + 1):
                if edepth[i] < edepth[best]:
                    best = i
            opcount.add(ib - ia + 2)
        else:
            end_a = (ba + 1) * self.BLOCK
            for i in range(ia + 1, end_a):
                if edepth[i] < edepth[best]:
                    best = i
            for i in range(bb * self.BLOCK, ib + 1):
                if edepth[i] < edepth[best]:
                    best = i
            opcount.add(2 * self.BLOCK + 2)
            if bb > ba + 1:
                mid = self._argmin_blocks(ba + 1, bb - 1)
                if edepth[mid] < edepth[best]:
                    best = mid
        return self._euler[best]

    def is_ancestor(self, a: int, b: int) -> bool:
        """True iff a is an ancestor of b (or a == b)."""
        opcount.add(2)
        return self.enter[a] <= self.enter[b] and self.exit[b] <= self.exit[a]


def caterpillar(n: int) -> BinaryTree:
    """Right spine whose nodes each carry one left leaf."""
    left = array("i", [0]) * (n + 1)
    right = array("i", [0]) * (n + 1)
    v = 1
    nxt = 2
    while nxt <= n:
        left[v] = nxt
        nxt += 1
        if nxt <= n:
            right[v] = nxt
            v = nxt
            nxt += 1
        else:
            break
    return BinaryTree.from_links(n, left, right, 1) if n else BinaryTree()
