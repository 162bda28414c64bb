"""Exact big-integer counting of regular spanning subgraphs and partitions.

Counts are exact Python ints and probabilities exact Fractions: these are the
brute-force oracles every closed-form estimate in the toolkit is judged
against, so nothing here is allowed to round.  The backtracking kernels carry
the load; this module owns parity/feasibility checking and the recursions
that stack counts into partition numbers and moments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import DegreeSumMismatch, ParityError, SizeMismatch, TooLarge
from .graphcore import Graph, complement, complete_graph
from .sampler import enumerate_regular

DEFAULT_MAX_PARTITION_N = 8


@dataclass(frozen=True)
class MomentPair:
    """First and second moments of a random count, as exact rationals."""

    first: Fraction
    second: Fraction

    def __post_init__(self):
        if self.second < self.first * self.first:
            raise ValueError("second moment below first^2 violates Cauchy-Schwarz")

    @property
    def ratio(self) -> Fraction:
        """second / first^2, the concentration diagnostic."""
        return self.second / (self.first * self.first)


def count_regular_spanning_subgraphs(g: Graph, h: int) -> int:
    """Exact |{h-regular spanning subgraphs of g}| by pruned backtracking."""
    if (g.n * h) % 2:
        raise ParityError(f"no {h}-regular subgraph on {g.n} vertices (nh odd)")
    if h < 0:
        raise ParityError("negative degree")
    if h > min(g.degrees()):
        return 0
    if g.n > 64:
        raise TooLarge("counting requires n <= 64")
    return kernels.count_regular_subgraphs(g.to_masks(), g.n, h)


def count_matchings_avoiding(n: int, f: Graph) -> int:
    """Perfect matchings of K_n edge-disjoint from f."""
    if n % 2:
        raise ParityError(f"no perfect matching on odd n={n}")
    if f.n != n:
        raise SizeMismatch(f"forbidden graph has n={f.n}, expected {n}")
    host = complement(f)
    return kernels.count_perfect_matchings(host.to_masks(), n)


def count_clique_partitions(n: int, degrees: list[int],
                            max_n: int = DEFAULT_MAX_PARTITION_N) -> int:
    """Ordered partitions of the complete graph's edges into regular spanning
    subgraphs of the given degrees, by nested choose-and-recurse."""
    degrees = list(degrees)
    if sum(degrees) != n - 1:
        raise DegreeSumMismatch(f"degrees sum to {sum(degrees)}, need n-1={n - 1}")
    for d in degrees:
        if (n * d) % 2:
            raise ParityError(f"no {d}-regular graph on {n} vertices (nd odd)")
    if n > max_n:
        raise TooLarge(f"partition counting guarded at n <= {max_n}")

    def recurse(host_masks: np.ndarray, degs: list[int]) -> int:
        if len(degs) == 1:
            # remaining host is degs[0]-regular, so it is its own unique part
            return kernels.count_regular_subgraphs(host_masks, n, degs[0])
        d0 = degs[0]
        rest = degs[1:]
        total = 0
        for sub in kernels.enumerate_regular_subgraphs(host_masks, n, d0):
            total += recurse(host_masks & ~sub, rest)
        return total

    return recurse(complete_graph(n).to_masks(), degrees)


def exact_moments(n: int, d1: int, d: int, max_enum: int = 12) -> MomentPair:
    """Exact E[count] and E[count^2] of d1-regular spanning subgraphs over the
    uniform d-regular ensemble on [n]."""
    if (n * d1) % 2:
        raise ParityError(f"no {d1}-regular subgraph on {n} vertices")
    support = enumerate_regular(n, d, max_enum=max_enum)
    s1 = 0
    s2 = 0
    for g in support:
        c = count_regular_spanning_subgraphs(g, d1)
        s1 += c
        s2 += c * c
    total = len(support)
    return MomentPair(first=Fraction(s1, total), second=Fraction(s2, total))


def exact_containment_probability(h: Graph, d: int, max_enum: int = 12) -> Fraction:
    """Fraction of d-regular graphs on [n] containing h as a subgraph."""
    support = enumerate_regular(h.n, d, max_enum=max_enum)
    hm = h.to_masks()
    hits = 0
    for g in support:
        gm = g.to_masks()
        if int((hm & ~gm).max()) == 0:
            hits += 1
    return Fraction(hits, len(support))
