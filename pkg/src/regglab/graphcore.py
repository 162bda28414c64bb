"""Labelled simple graphs on [n] = {0, ..., n-1} with bitset adjacency.

Adjacency rows are arbitrary-width Python ints (bit v of rows[u] set iff uv
is an edge), which keeps set algebra exact for any n and hands off to the
machine-word kernels whenever n <= 64.  Graphs are immutable after
construction and all operations here are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DuplicateEdge,
    EdgeListFormatError,
    LoopEdge,
    NotAPermutation,
    OverlappingEdges,
    SizeMismatch,
    VertexOutOfRange,
)


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


class Graph:
    """Immutable labelled simple graph: n, bitset rows, cached edge count."""

    __slots__ = ("n", "rows", "m")

    def __init__(self, n: int, rows: Sequence[int]):
        if n < 1:
            raise VertexOutOfRange(f"need n >= 1, got {n}")
        if len(rows) != n:
            raise SizeMismatch(f"expected {n} adjacency rows, got {len(rows)}")
        rows = tuple(int(r) for r in rows)
        full = (1 << n) - 1
        total = 0
        for u, r in enumerate(rows):
            if r & ~full:
                raise VertexOutOfRange(f"row {u} has bits beyond vertex {n - 1}")
            if (r >> u) & 1:
                raise LoopEdge(f"loop at vertex {u}")
            total += r.bit_count()
        for u, r in enumerate(rows):
            for v in _iter_bits(r):
                if not (rows[v] >> u) & 1:
                    raise SizeMismatch(f"adjacency not symmetric at ({u},{v})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "m", total // 2)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def degree(self, u: int) -> int:
        return self.rows[u].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def edges(self) -> list[tuple[int, int]]:
        """Edges (u, v) with u < v in lexicographic order."""
        out = []
        for u in range(self.n):
            r = self.rows[u] >> (u + 1)
            for off in _iter_bits(r):
                out.append((u, u + 1 + off))
        return out

    def neighbours(self, u: int) -> list[int]:
        return list(_iter_bits(self.rows[u]))

    def is_regular(self) -> "RegularityCertificate":
        degs = self.degrees()
        d = degs[0]
        return RegularityCertificate(degree=d, valid=all(x == d for x in degs))

    def is_subgraph_of(self, host: "Graph") -> bool:
        if self.n != host.n:
            raise SizeMismatch("vertex counts differ")
        return all((r & ~h) == 0 for r, h in zip(self.rows, host.rows))

    def to_masks(self) -> np.ndarray:
        """Rows as uint64 machine words for the kernels (n <= 64 only)."""
        if self.n > 64:
            raise SizeMismatch("machine-word masks require n <= 64")
        return np.array(self.rows, dtype=np.uint64)

    @staticmethod
    def from_masks(masks: Iterable[int], n: int) -> "Graph":
        return Graph(n, [int(x) for x in masks])


@dataclass(frozen=True)
class DegreeSequence:
    """Vertex degrees of a target subgraph; sum must be even."""

    h: tuple[int, ...]

    def __init__(self, h: Iterable[int]):
        h = tuple(int(x) for x in h)
        object.__setattr__(self, "h", h)
        if any(x < 0 for x in h):
            raise VertexOutOfRange("degrees must be non-negative")
        if any(x > len(h) - 1 for x in h):
            raise VertexOutOfRange("degree exceeds n - 1")
        if sum(h) % 2:
            from .errors import ParityError

            raise ParityError("degree sum must be even")

    @property
    def n(self) -> int:
        return len(self.h)

    @property
    def edge_count(self) -> int:
        return sum(self.h) // 2

    @property
    def mean_square(self) -> float:
        return sum(x * x for x in self.h) / len(self.h)


@dataclass(frozen=True)
class RegularityCertificate:
    degree: int
    valid: bool


def from_edge_list(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a Graph from (u, v) pairs; rejects loops, duplicates, bad vertices."""
    if n < 1:
        raise VertexOutOfRange(f"need n >= 1, got {n}")
    rows = [0] * n
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise VertexOutOfRange(f"edge ({u},{v}) outside [0,{n})")
        if u == v:
            raise LoopEdge(f"loop edge ({u},{v})")
        if u > v:
            u, v = v, u
        if (rows[u] >> v) & 1:
            raise DuplicateEdge(f"duplicate edge ({u},{v})")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, rows)


def empty_graph(n: int) -> Graph:
    return Graph(n, [0] * n)


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, [full ^ (1 << u) for u in range(n)])


def complement(g: Graph) -> Graph:
    full = (1 << g.n) - 1
    return Graph(g.n, [(full ^ r) & ~(1 << u) for u, r in enumerate(g.rows)])


def union_disjoint(g1: Graph, g2: Graph) -> Graph:
    """Edge union of edge-disjoint graphs; reports one witness on overlap."""
    if g1.n != g2.n:
        raise SizeMismatch(f"vertex counts differ: {g1.n} vs {g2.n}")
    for u in range(g1.n):
        inter = g1.rows[u] & g2.rows[u]
        if inter:
            v = (inter & -inter).bit_length() - 1
            raise OverlappingEdges(f"edge ({min(u, v)},{max(u, v)}) present in both")
    return Graph(g1.n, [a | b for a, b in zip(g1.rows, g2.rows)])


def intersection_size(g1: Graph, g2: Graph) -> int:
    if g1.n != g2.n:
        raise SizeMismatch(f"vertex counts differ: {g1.n} vs {g2.n}")
    return sum((a & b).bit_count() for a, b in zip(g1.rows, g2.rows)) // 2


def common_neighbour_range(g: Graph) -> tuple[int, int]:
    """(min, max) of |N(j) ∩ N(k)| over unordered pairs of distinct vertices."""
    if g.n < 2:
        raise SizeMismatch("need at least two vertices")
    lo, hi = g.n, 0
    for u in range(g.n):
        ru = g.rows[u]
        for v in range(u + 1, g.n):
            c = (ru & g.rows[v]).bit_count()
            if c < lo:
                lo = c
            if c > hi:
                hi = c
    return lo, hi


def signless_laplacian(g: Graph):
    """Q = D + A; satisfies theta^T Q theta = sum over edges of (theta_u + theta_v)^2."""
    from .symmat import SymmetricMatrix

    n = g.n
    a = np.zeros((n, n))
    for u in range(n):
        for v in _iter_bits(g.rows[u]):
            a[u, v] = 1.0
        a[u, u] = g.degree(u)
    return SymmetricMatrix(a)


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Image graph: edge uv maps to (perm[u], perm[v])."""
    if len(perm) != g.n or sorted(perm) != list(range(g.n)):
        raise NotAPermutation(f"not a permutation of [{g.n}]")
    rows = [0] * g.n
    for u in range(g.n):
        pu = perm[u]
        r = 0
        for v in _iter_bits(g.rows[u]):
            r |= 1 << perm[v]
        rows[pu] = r
    return Graph(g.n, rows)


def transposition(n: int, a: int, b: int) -> list[int]:
    perm = list(range(n))
    perm[a], perm[b] = perm[b], perm[a]
    return perm


# -- edge-list text format ---------------------------------------------------
#
# First line "n m", then m lines "u v" with 0 <= u < v < n, ASCII decimal,
# LF-terminated.  Anything else (including trailing garbage) is rejected.


def dumps_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def loads_edge_list(text: str) -> Graph:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise EdgeListFormatError(1, "empty input")
    head = lines[0].split(" ")
    if len(head) != 2 or not all(t.isdigit() for t in head):
        raise EdgeListFormatError(1, f"expected 'n m', got {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    if len(lines) != m + 1:
        raise EdgeListFormatError(len(lines), f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    seen = set()
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        if len(parts) != 2 or not all(t.isdigit() for t in parts):
            raise EdgeListFormatError(i, f"expected 'u v', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if not u < v:
            raise EdgeListFormatError(i, f"need u < v, got {u} {v}")
        if v >= n:
            raise EdgeListFormatError(i, f"vertex {v} outside [0,{n})")
        if (u, v) in seen:
            raise EdgeListFormatError(i, f"duplicate edge ({u},{v})")
        seen.add((u, v))
        edges.append((u, v))
    return from_edge_list(n, edges)


def load_edge_list(path) -> Graph:
    with open(path, "r", encoding="ascii") as fh:
        return loads_edge_list(fh.read())


def dump_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps_edge_list(g))
