"""Suffix arrays, LCP arrays (Kasai), and longest-common-extension queries.

Conventions: positions are 1-based; SA[k] is the start of the k-th smallest
suffix; LCP[k] is the length of the longest common prefix of the k-th and
(k-1)-st suffixes in lexicographic order, with LCP[1] = 0.
"""

from __future__ import annotations

from dataclasses import dataclass


def suffix_array(text: bytes) -> list[int]:
    """Prefix-doubling suffix array; O(n log^2 n), fine at desk scale."""
    n = len(text)
    if n == 0:
        raise ValueError("empty text")
    rank = list(text)
    sa = list(range(n))
    k = 1
    while True:
        def key(i):
            return (rank[i], rank[i + k] if i + k < n else -1)

        sa.sort(key=key)
        new = [0] * n
        for idx in range(1, n):
            new[sa[idx]] = new[sa[idx - 1]] + (key(sa[idx]) != key(sa[idx - 1]))
        rank = new
        if rank[sa[-1]] == n - 1:
            break
        k <<= 1
    return [p + 1 for p in sa]


def lcp_array(text: bytes, sa: list[int]) -> list[int]:
    """Kasai's algorithm; returns LCP[1..n] as a 1-based list (index 0 unused)."""
    n = len(text)
    rank = [0] * (n + 1)
    for pos, start in enumerate(sa, start=1):
        rank[start] = pos
    lcp = [0] * (n + 1)
    h = 0
    for i in range(1, n + 1):
        r = rank[i]
        if r > 1:
            j = sa[r - 2]
            while i + h <= n and j + h <= n and text[i + h - 1] == text[j + h - 1]:
                h += 1
            lcp[r] = h
            if h:
                h -= 1
        else:
            h = 0
    return lcp


@dataclass
class LcpData:
    text: bytes
    sa: list[int]
    isa: list[int]
    lcp: list[int]  # 1-based, index 0 unused

    @classmethod
    def from_text(cls, text: bytes) -> "LcpData":
        sa = suffix_array(text)
        isa = [0] * (len(text) + 1)
        for pos, start in enumerate(sa, start=1):
            isa[start] = pos
        return cls(text=text, sa=sa, isa=isa, lcp=lcp_array(text, sa))

    def lce(self, i: int, j: int, rmq_query) -> int:
        """Longest common extension of suffixes i and j via an RMQ over the
        LCP array: the range is (min+1 .. max) of the suffix-array positions."""
        n = len(self.text)
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexError("suffix positions out of range")
        if i == j:
            return n - i + 1
        a, b = self.isa[i], self.isa[j]
        if a > b:
            a, b = b, a
        return self.lcp[rmq_query(a + 1, b)]

    def lce_naive(self, i: int, j: int) -> int:
        n = len(self.text)
        h = 0
        while i + h <= n and j + h <= n and self.text[i + h - 1] == self.text[j + h - 1]:
            h += 1
        return h
