"""Exact matching counts.

Three independent routes: the full matching polynomial by subset DP
(small n), fixed-size counts by ordered-edge enumeration (large sparse
graphs, small j), and the closed form for complete graphs.  The compiled
kernels run on machine words and fall back automatically to the
arbitrary-precision pure-Python kernels on overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

from . import _backend, _kernels_py
from .graphs import BipGraph

FULL_POLY_CAP = 22
UPTO_DEFAULT_GUARD = 7


class CapExceededError(ValueError):
    pass


@dataclass(frozen=True)
class MatchVector:
    """Exact matching counts m_0..m_J with a source tag."""

    counts: tuple[int, ...]
    source: str

    def __getitem__(self, i: int) -> int:
        return self.counts[i]

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def j_max(self) -> int:
        return len(self.counts) - 1

    def to_text(self) -> str:
        return " ".join(str(c) for c in self.counts)

    def validate_regular(self, n: int, r: int) -> None:
        """Invariants forced for an r-regular bipartite source."""
        assert self.counts[0] == 1, "m_0 must be 1"
        if self.j_max >= 1:
            assert self.counts[1] == n * r, f"m_1 = {self.counts[1]} != nr"
        if self.j_max >= 2:
            expect = comb(n * r, 2) - 2 * n * comb(r, 2)
            assert self.counts[2] == expect, "m_2 closed form violated"
        for i, c in enumerate(self.counts):
            if i <= n and c < 1:
                raise AssertionError(
                    f"m_{i} = {c} < 1 on a regular bipartite graph")


def match_poly_full(g: BipGraph, cap: int = FULL_POLY_CAP) -> MatchVector:
    """Full matching polynomial m_0..m_n (subset DP; memory 2^n cells)."""
    if g.n > cap:
        raise CapExceededError(f"n={g.n} exceeds full-polynomial cap {cap}")
    neigh = [list(row) for row in g.adj]
    try:
        counts = _backend.match_poly_counts(neigh)
    except OverflowError:
        counts = _kernels_py.match_poly_counts(neigh)
    return MatchVector(tuple(int(c) for c in counts), g.graph_id())


def match_count_upto(g: BipGraph, j_max: int,
                     guard: int = UPTO_DEFAULT_GUARD) -> MatchVector:
    """Counts m_0..m_j_max by ordered-edge DFS enumeration."""
    if j_max > guard:
        raise CapExceededError(f"j_max={j_max} exceeds guard {guard}")
    edges = [(u, g.n + v) for u, v in g.edges()]
    try:
        counts = _backend.match_upto_counts(edges, 2 * g.n, j_max)
    except OverflowError:
        counts = _kernels_py.match_upto_counts(edges, 2 * g.n, j_max)
    return MatchVector(tuple(int(c) for c in counts), g.graph_id())


def mbar_vector(v: int, j_max: int | None = None) -> MatchVector:
    """i-matching counts of the complete graph K_v: v!/((v-2i)! i! 2^i)."""
    if v % 2:
        raise ValueError("v must be even")
    if j_max is None:
        j_max = v // 2
    if j_max > v // 2:
        raise ValueError(f"j_max={j_max} exceeds v/2")
    counts = [factorial(v) // (factorial(v - 2 * i) * factorial(i) * 2 ** i)
              for i in range(j_max + 1)]
    return MatchVector(tuple(counts), f"complete-graph v={v}")


def match_poly_general_bruteforce(nverts: int, edges) -> MatchVector:
    """Deletion-contraction matching counts for an arbitrary small graph:
    m(G) = m(G - e) + x * m(G - endpoints).  Independent validator for the
    complete-graph closed form."""
    if nverts > 10:
        raise CapExceededError("brute force capped at 10 vertices")
    edges = [tuple(e) for e in edges]

    def rec(es: tuple) -> list[int]:
        if not es:
            return [1]
        u, v = es[0]
        without = rec(es[1:])
        using = rec(tuple(e for e in es[1:]
                          if u not in e and v not in e))
        out = [0] * max(len(without), len(using) + 1)
        for i, c in enumerate(without):
            out[i] += c
        for i, c in enumerate(using):
            out[i + 1] += c
        return out

    counts = rec(tuple(edges))
    return MatchVector(tuple(counts), f"bruteforce v={nverts}")


def complete_graph_edges(v: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(v) for b in range(a + 1, v)]
