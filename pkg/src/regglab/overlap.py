"""Common-edge statistics of a graph against a randomly relabelled copy.

Exhaustive mode scans all n! permutations (exact rational pmf); Monte Carlo
mode estimates the same law with per-bin standard errors.  The transposition
switching move that drives the tail bound is also exposed as an executable
graph operation so its counting identities can be checked directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import InvalidChoice, TooLarge
from .graphcore import Graph, relabel, transposition
from .rng import SeedSpec, Stream

MAX_EXHAUSTIVE_N = 9


@dataclass(frozen=True)
class OverlapDistribution:
    """Law of the common-edge count.  Exhaustive pmf values are exact
    Fractions; Monte Carlo values are (estimate, stderr) pairs."""

    mode: str  # "exhaustive" | "mc"
    pmf: dict
    samples: int  # n! or the trial count

    def __post_init__(self):
        if self.mode not in ("exhaustive", "mc"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "exhaustive":
            if sum(self.pmf.values(), Fraction(0)) != 1:
                raise ValueError("exhaustive pmf must sum to exactly 1")

    def tail_probability(self, threshold: float):
        """P(overlap >= threshold); exact Fraction in exhaustive mode."""
        if self.mode == "exhaustive":
            return sum((p for m, p in self.pmf.items() if m >= threshold), Fraction(0))
        return sum(est for m, (est, _) in self.pmf.items() if m >= threshold)

    def tv_distance_to(self, reference: dict) -> float:
        """Total variation distance to a reference pmf given as m -> mass.

        The reference may have mass beyond the keys it lists (e.g. a truncated
        Poisson); that residual counts fully since this law puts 0 there.
        """
        support = set(self.pmf) | set(reference)
        total = 0.0
        ref_covered = 0.0
        for m in support:
            if self.mode == "mc":
                mine = self.pmf[m][0] if m in self.pmf else 0.0
            else:
                mine = float(self.pmf.get(m, 0))
            q = float(reference.get(m, 0.0))
            ref_covered += q
            total += abs(mine - q)
        total += max(0.0, 1.0 - ref_covered)
        return total / 2.0

    def dumps_csv(self) -> str:
        if self.mode == "exhaustive":
            lines = ["m,numerator,denominator"]
            for m in sorted(self.pmf):
                p = self.pmf[m]
                lines.append(f"{m},{p.numerator},{p.denominator}")
        else:
            lines = ["m,estimate,stderr"]
            for m in sorted(self.pmf):
                est, se = self.pmf[m]
                lines.append(f"{m},{est!r},{se!r}")
        return "\n".join(lines) + "\n"


def _h2_edge_arrays(h2: Graph):
    e = h2.edges()
    u = np.array([a for a, _ in e], dtype=np.int32)
    v = np.array([b for _, b in e], dtype=np.int32)
    return u, v


def overlap_distribution_exact(h1: Graph, h2: Graph,
                               max_perm: int = MAX_EXHAUSTIVE_N) -> OverlapDistribution:
    """Exact law of |H1 ∩ σ(H2)| over all n! permutations σ."""
    if h1.n != h2.n:
        raise TooLarge(f"vertex counts differ: {h1.n} vs {h2.n}")
    n = h1.n
    if n > max_perm:
        raise TooLarge(f"exhaustive mode guarded at n <= {max_perm} (n! permutations)")
    eu, ev = _h2_edge_arrays(h2)
    hist = kernels.overlap_histogram(h1.to_masks(), eu, ev, n)
    total = math.factorial(n)
    assert int(hist.sum()) == total
    pmf = {m: Fraction(int(c), total) for m, c in enumerate(hist) if c}
    return OverlapDistribution(mode="exhaustive", pmf=pmf, samples=total)


def overlap_distribution_mc(h1: Graph, h2: Graph, trials: int,
                            seed: SeedSpec) -> OverlapDistribution:
    """Monte Carlo law of |H1 ∩ σ(H2)| over `trials` uniform relabellings."""
    if h1.n != h2.n:
        raise TooLarge(f"vertex counts differ: {h1.n} vs {h2.n}")
    if trials < 1:
        raise ValueError("need trials >= 1")
    n = h1.n
    eu, ev = _h2_edge_arrays(h2)
    stream = Stream(seed)
    hist, _ = kernels.overlap_mc_histogram(h1.to_masks(), eu, ev, n, trials,
                                           stream.seed, stream.counter)
    pmf = {}
    for m, c in enumerate(hist):
        if c:
            p = int(c) / trials
            pmf[m] = (p, math.sqrt(p * (1.0 - p) / trials))
    return OverlapDistribution(mode="mc", pmf=pmf, samples=trials)


# -- transposition switching ----------------------------------------------------


def forward_switching(g_sigma: Graph, h1: Graph,
                      choice: tuple[tuple[int, int], int, int]) -> Graph:
    """Relabel g_sigma by the transposition (u z), where uw is a common edge
    of g_sigma and h1, u the end being moved, and z a vertex outside the
    closed neighbourhood of w in g_sigma.  Afterwards uw is no longer a
    common edge (the common-edge count can otherwise move freely)."""
    (eu, ew), u, z = choice
    if u == ew:
        eu, ew = ew, eu
    if u != eu:
        raise InvalidChoice(f"end {u} does not belong to edge ({eu},{ew})")
    w = ew
    if not (g_sigma.has_edge(u, w) and h1.has_edge(u, w)):
        raise InvalidChoice(f"({u},{w}) is not a common edge")
    if z == w or z == u or g_sigma.has_edge(z, w):
        raise InvalidChoice(f"vertex {z} is in the closed neighbourhood of {w}")
    return relabel(g_sigma, transposition(g_sigma.n, u, z))


def valid_forward_choices(g_sigma: Graph, h1: Graph):
    """All (common edge, moved end, z) triples the forward switching accepts.
    For h-regular graphs with i common edges there are exactly i * 2(n-h-1)."""
    n = g_sigma.n
    out = []
    for u in range(n):
        common = (g_sigma.rows[u] & h1.rows[u]) >> (u + 1)
        for off in _bits(common):
            w = u + 1 + off
            for end, anchor in ((u, w), (w, u)):
                blocked = g_sigma.rows[anchor] | (1 << anchor) | (1 << end)
                for z in range(n):
                    if not (blocked >> z) & 1:
                        out.append(((u, w), end, z))
    return out


def _bits(mask: int):
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b
