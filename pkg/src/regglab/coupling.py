"""Exact finite couplings of uniform marginals under bipartite constraints.

The minimal deficiency eps* = min P(pair outside the allowed set D) is
computed by integer max-flow after scaling every mass to units of
1/(|S||T|), so it is an exact rational with denominator dividing |S||T|.
A subset-enumeration oracle over all 2^|S| choices of Omega provides the
matching Hall-style quantity max(pi_S(Omega) - pi_T(N(Omega)), 0); the two
must agree exactly, which is the executable form of the deficiency theorem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import kernels
from .errors import EmptySide, ParityError, SizeMismatch, TooLarge
from .exactcount import count_regular_spanning_subgraphs
from .graphcore import Graph
from .sampler import enumerate_regular

HALL_SUBSET_GUARD = 20


@dataclass(frozen=True)
class BipartiteConstraint:
    """Allowed pairs D between parts S and T, stored as per-s neighbour tuples."""

    s_size: int
    t_size: int
    edges: tuple[tuple[int, ...], ...]
    labels_s: Optional[tuple] = None
    labels_t: Optional[tuple] = None

    def __post_init__(self):
        if self.s_size < 1 or self.t_size < 1:
            raise EmptySide("both sides must be non-empty")
        if len(self.edges) != self.s_size:
            raise SizeMismatch("edges must list neighbours for every s")
        canon = []
        for s, nbrs in enumerate(self.edges):
            nbrs = tuple(sorted(nbrs))
            if any(not (0 <= t < self.t_size) for t in nbrs):
                raise SizeMismatch(f"s={s} has a neighbour outside T")
            if len(set(nbrs)) != len(nbrs):
                raise SizeMismatch(f"s={s} has duplicate edges")
            canon.append(nbrs)
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.edges)

    def s_degrees(self) -> list[int]:
        return [len(nbrs) for nbrs in self.edges]

    def t_degrees(self) -> list[int]:
        deg = [0] * self.t_size
        for nbrs in self.edges:
            for t in nbrs:
                deg[t] += 1
        return deg


@dataclass(frozen=True)
class JointDistribution:
    """Exact joint law on S x T with uniform marginals on both sides."""

    s_size: int
    t_size: int
    mass: dict[tuple[int, int], Fraction]

    def __post_init__(self):
        row = [Fraction(0)] * self.s_size
        col = [Fraction(0)] * self.t_size
        for (s, t), p in self.mass.items():
            if p < 0:
                raise ValueError(f"negative mass at ({s},{t})")
            row[s] += p
            col[t] += p
        if any(r != Fraction(1, self.s_size) for r in row):
            raise ValueError("row sums are not exactly uniform")
        if any(c != Fraction(1, self.t_size) for c in col):
            raise ValueError("column sums are not exactly uniform")

    def prob_outside(self, d: BipartiteConstraint) -> Fraction:
        allowed = {(s, t) for s, nbrs in enumerate(d.edges) for t in nbrs}
        return sum((p for k, p in self.mass.items() if k not in allowed), Fraction(0))

    def dumps(self) -> str:
        """Sparse triple-list text format, one '<s> <t> <num> <den>' per line."""
        lines = [f"regglab-joint v1 {self.s_size} {self.t_size}"]
        for (s, t) in sorted(self.mass):
            p = self.mass[(s, t)]
            if p:
                lines.append(f"{s} {t} {p.numerator} {p.denominator}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def loads(text: str) -> "JointDistribution":
        lines = [ln for ln in text.split("\n") if ln]
        head = lines[0].split(" ")
        if head[:2] != ["regglab-joint", "v1"] or len(head) != 4:
            raise ValueError("bad joint-distribution header")
        s_size, t_size = int(head[2]), int(head[3])
        mass = {}
        for ln in lines[1:]:
            s, t, num, den = (int(x) for x in ln.split(" "))
            mass[(s, t)] = Fraction(num, den)
        return JointDistribution(s_size=s_size, t_size=t_size, mass=mass)


@dataclass(frozen=True)
class CouplingBound:
    """Sufficient-condition certificate: eps_star <= 2*delta + eps/(1-eps)."""

    eps: Fraction
    delta: Fraction
    bound: Fraction
    s_good_size: int
    t_good_size: int


# -- integer max-flow (Dinic) --------------------------------------------------


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.to: list[int] = []
        self.cap: list[int] = []
        self.head: list[list[int]] = [[] for _ in range(n)]

    def add_edge(self, u: int, v: int, c: int) -> int:
        idx = len(self.to)
        self.to.append(v)
        self.cap.append(c)
        self.head[u].append(idx)
        self.to.append(u)
        self.cap.append(0)
        self.head[v].append(idx + 1)
        return idx

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        n = self.n
        while True:
            level = [-1] * n
            level[s] = 0
            queue = [s]
            for u in queue:
                for idx in self.head[u]:
                    v = self.to[idx]
                    if self.cap[idx] > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return flow
            it = [0] * n

            def dfs(u: int, pushed: int) -> int:
                if u == t:
                    return pushed
                while it[u] < len(self.head[u]):
                    idx = self.head[u][it[u]]
                    v = self.to[idx]
                    if self.cap[idx] > 0 and level[v] == level[u] + 1:
                        got = dfs(v, min(pushed, self.cap[idx]))
                        if got:
                            self.cap[idx] -= got
                            self.cap[idx ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                pushed = dfs(s, 1 << 62)
                if not pushed:
                    break
                flow += pushed


def min_deficiency(d: BipartiteConstraint) -> tuple[Fraction, JointDistribution]:
    """Minimal achievable P(pair outside D) over couplings with uniform
    marginals, plus a joint law attaining it.

    Mass is scaled to integer units of 1/(|S||T|): source->s carries |T|
    units, t->sink carries |S| units, allowed pairs are uncapped, and the
    greedy lexicographic completion restores exact uniform marginals.
    """
    ns, nt = d.s_size, d.t_size
    inf = ns * nt + 1
    source = 0
    sink = ns + nt + 1
    net = _Dinic(ns + nt + 2)
    s_edges = []
    for s in range(ns):
        net.add_edge(source, 1 + s, nt)
    mid = {}
    for s, nbrs in enumerate(d.edges):
        for t in nbrs:
            mid[(s, t)] = net.add_edge(1 + s, 1 + ns + t, inf)
    for t in range(nt):
        s_edges.append(net.add_edge(1 + ns + t, sink, ns))
    total_flow = net.max_flow(source, sink)
    eps_star = Fraction(ns * nt - total_flow, ns * nt)

    unit = Fraction(1, ns * nt)
    mass: dict[tuple[int, int], Fraction] = {}
    row_left = [nt] * ns
    col_left = [ns] * nt
    for (s, t), idx in mid.items():
        f = net.cap[idx ^ 1]  # reverse capacity = routed flow
        if f:
            mass[(s, t)] = f * unit
            row_left[s] -= f
            col_left[t] -= f
    # deterministic greedy completion in lexicographic (s, t) order
    rows = [s for s in range(ns) if row_left[s]]
    cols = [t for t in range(nt) if col_left[t]]
    si = ti = 0
    while si < len(rows) and ti < len(cols):
        s, t = rows[si], cols[ti]
        amount = min(row_left[s], col_left[t])
        mass[(s, t)] = mass.get((s, t), Fraction(0)) + amount * unit
        row_left[s] -= amount
        col_left[t] -= amount
        if row_left[s] == 0:
            si += 1
        if col_left[t] == 0:
            ti += 1
    joint = JointDistribution(s_size=ns, t_size=nt, mass=mass)
    return eps_star, joint


def hall_deficiency_bruteforce(d: BipartiteConstraint) -> Fraction:
    """max over all Omega ⊆ S of pi_S(Omega) - pi_T(N(Omega)), clamped at 0.

    The independent oracle for min_deficiency: enumerates all 2^|S| subsets.
    """
    ns, nt = d.s_size, d.t_size
    if ns > HALL_SUBSET_GUARD:
        raise TooLarge(f"subset enumeration guarded at |S| <= {HALL_SUBSET_GUARD}")
    tmasks = []
    for nbrs in d.edges:
        m = 0
        for t in nbrs:
            m |= 1 << t
        tmasks.append(m)
    best = 0  # numerator of (|Omega|*|T| - |N|*|S|) / (|S||T|)
    for omega in range(1, 1 << ns):
        nmask = 0
        o = omega
        while o:
            b = o & -o
            nmask |= tmasks[b.bit_length() - 1]
            o ^= b
        num = omega.bit_count() * nt - nmask.bit_count() * ns
        if num > best:
            best = num
    return Fraction(best, ns * nt)


def sufficient_bound(d: BipartiteConstraint, eps: float | Fraction) -> CouplingBound:
    """Good-vertex certificate: sides whose degrees stay within (1-eps) of the
    average yield eps_star <= 2*delta + eps/(1-eps)."""
    eps = Fraction(eps)
    if not 0 <= eps < 1:
        raise ValueError("need 0 <= eps < 1")
    ns, nt = d.s_size, d.t_size
    ecount = d.edge_count
    s_good = sum(1 for deg in d.s_degrees() if Fraction(deg) >= (1 - eps) * Fraction(ecount, ns))
    t_good = sum(1 for deg in d.t_degrees() if Fraction(deg) >= (1 - eps) * Fraction(ecount, nt))
    delta = max(Fraction(ns - s_good, ns), Fraction(nt - t_good, nt))
    bound = 2 * delta + eps / (1 - eps)
    return CouplingBound(eps=eps, delta=delta, bound=bound,
                         s_good_size=s_good, t_good_size=t_good)


# -- the union-decomposition constraint ---------------------------------------


def sprinkling_constraint(n: int, d1: int, d2: int, max_n: int = 8) -> BipartiteConstraint:
    """S = all (d1+d2)-regular graphs on [n]; T = ordered edge-disjoint
    (d1, d2)-regular pairs; s ~ t iff the pair's union is s.

    Every T-node has degree exactly 1, and the S-degree of a graph equals its
    count of d1-regular spanning subgraphs.
    """
    if n > max_n:
        raise TooLarge(f"sprinkling constraint guarded at n <= {max_n}")
    if (n * d1) % 2 or (n * d2) % 2:
        raise ParityError("both part degrees need even nd")
    support = enumerate_regular(n, d1 + d2, max_enum=max(n, 12))
    edges = []
    labels_t = []
    t_index = 0
    for s, g in enumerate(support):
        gm = g.to_masks()
        subs = kernels.enumerate_regular_subgraphs(gm, n, d1)
        nbrs = []
        for sub in subs:
            nbrs.append(t_index)
            labels_t.append((s, tuple(int(x) for x in sub)))
            t_index += 1
        edges.append(tuple(nbrs))
    if t_index == 0:
        raise EmptySide(f"no edge-disjoint ({d1},{d2})-regular pairs on n={n}")
    return BipartiteConstraint(
        s_size=len(support),
        t_size=t_index,
        edges=tuple(edges),
        labels_s=tuple(support),
        labels_t=tuple(labels_t),
    )


@dataclass(frozen=True)
class SprinklingReport:
    """Concentration picture of the decomposition counts across the ensemble."""

    s_size: int
    t_size: int
    mean_count: Fraction
    count_histogram: dict[int, int] = field(default_factory=dict)

    def ratio_distribution(self) -> dict[Fraction, Fraction]:
        """Law of count/mean over a uniform ensemble draw."""
        return {
            Fraction(c) / self.mean_count: Fraction(k, self.s_size)
            for c, k in sorted(self.count_histogram.items())
        }


def build_sprinkling_coupling(n: int, d1: int, d2: int, max_n: int = 8
                              ) -> tuple[Fraction, JointDistribution, SprinklingReport]:
    """Optimal coupling for the union-decomposition constraint, plus the exact
    distribution of per-graph decomposition counts."""
    d = sprinkling_constraint(n, d1, d2, max_n=max_n)
    eps_star, joint = min_deficiency(d)
    hist: dict[int, int] = {}
    for deg in d.s_degrees():
        hist[deg] = hist.get(deg, 0) + 1
    mean = Fraction(d.edge_count, d.s_size)
    report = SprinklingReport(s_size=d.s_size, t_size=d.t_size,
                              mean_count=mean, count_histogram=hist)
    return eps_star, joint, report


def sprinkling_eps_closed_form(d: BipartiteConstraint) -> Fraction:
    """For constraints whose T-degrees are all 1, eps* has the closed form
    sum over s of max(0, 1/|S| - deg(s)/|T|)."""
    if any(deg != 1 for deg in d.t_degrees()):
        raise ValueError("closed form requires every t to have degree 1")
    ns, nt = d.s_size, d.t_size
    total = Fraction(0)
    for deg in d.s_degrees():
        gap = Fraction(1, ns) - Fraction(deg, nt)
        if gap > 0:
            total += gap
    return total


def verify_subgraph_count_degrees(d: BipartiteConstraint, d1: int) -> bool:
    """S-degree of each graph equals its count of d1-regular spanning subgraphs."""
    if d.labels_s is None:
        raise ValueError("constraint lacks S labels")
    for g, nbrs in zip(d.labels_s, d.edges):
        if count_regular_spanning_subgraphs(g, d1) != len(nbrs):
            return False
    return True
