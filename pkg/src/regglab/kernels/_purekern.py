"""Pure-Python kernels: the fallback backend.

Bit-for-bit identical semantics to the compiled backend in _fastkern.pyx,
including the order in which random draws are consumed.  Rows are machine
words (n <= 64), passed in and out as uint64 numpy arrays.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class _Rng:
    """Scalar view of the counter-based stream; mirrors rng.Stream draws."""

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int):
        self.seed = seed
        self.counter = counter

    def next_u64(self) -> int:
        self.counter += 1
        return _mix((self.seed + self.counter * _GAMMA) & _MASK)

    def randbelow(self, k: int) -> int:
        t = ((1 << 64) - k) % k
        while True:
            z = self.next_u64()
            if z >= t:
                return z % k


def _lowbit_index(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


# -- degree-constrained subgraph backtracking --------------------------------


def _prepare(host_rows, n: int):
    rows = [int(x) for x in host_rows]
    if len(rows) != n:
        raise ValueError("row count mismatch")
    return rows


def _future_feasible(rows, res, pos_mask) -> bool:
    # Every vertex still owing edges must have enough live candidate partners.
    mask = pos_mask
    while mask:
        b = mask & -mask
        v = b.bit_length() - 1
        mask ^= b
        if res[v] > (rows[v] & pos_mask & ~b).bit_count():
            return False
    return True


def count_regular_subgraphs(host_rows, n: int, h: int) -> int:
    """Exact number of h-regular spanning subgraphs of the host graph."""
    rows = _prepare(host_rows, n)
    if h == 0:
        return 1
    res = [h] * n
    pos_mask = (1 << n) - 1

    def fill(u: int, pos_mask: int) -> int:
        while u < n and res[u] == 0:
            pos_mask &= ~(1 << u)
            u += 1
        if u == n:
            return 1
        need = res[u]
        above = ~((1 << (u + 1)) - 1)
        cand_mask = rows[u] & pos_mask & above
        cands = []
        while cand_mask:
            b = cand_mask & -cand_mask
            cands.append(b.bit_length() - 1)
            cand_mask ^= b
        if len(cands) < need:
            return 0
        base_mask = pos_mask & ~(1 << u)
        total = 0

        def choose(idx: int, need: int, pmask: int) -> int:
            if need == 0:
                if _future_feasible(rows, res, pmask):
                    return fill(u + 1, pmask)
                return 0
            if len(cands) - idx < need:
                return 0
            acc = 0
            v = cands[idx]
            # include v
            res[v] -= 1
            new_pmask = pmask & ~(1 << v) if res[v] == 0 else pmask
            acc += choose(idx + 1, need - 1, new_pmask)
            res[v] += 1
            # exclude v
            acc += choose(idx + 1, need, pmask)
            return acc

        res[u] = 0
        total = choose(0, need, base_mask)
        res[u] = need
        return total

    return fill(0, pos_mask)


def enumerate_regular_subgraphs(host_rows, n: int, h: int) -> np.ndarray:
    """All h-regular spanning subgraphs, rows as uint64, lexicographic order."""
    rows = _prepare(host_rows, n)
    out: list[tuple[int, ...]] = []
    chosen = [0] * n
    if h == 0:
        return np.zeros((1, n), dtype=np.uint64)
    res = [h] * n

    def fill(u: int, pos_mask: int):
        while u < n and res[u] == 0:
            pos_mask &= ~(1 << u)
            u += 1
        if u == n:
            out.append(tuple(chosen))
            return
        need = res[u]
        above = ~((1 << (u + 1)) - 1)
        cand_mask = rows[u] & pos_mask & above
        cands = []
        while cand_mask:
            b = cand_mask & -cand_mask
            cands.append(b.bit_length() - 1)
            cand_mask ^= b
        if len(cands) < need:
            return
        base_mask = pos_mask & ~(1 << u)

        def choose(idx: int, need: int, pmask: int):
            if need == 0:
                if _future_feasible(rows, res, pmask):
                    fill(u + 1, pmask)
                return
            if len(cands) - idx < need:
                return
            v = cands[idx]
            res[v] -= 1
            chosen[u] |= 1 << v
            chosen[v] |= 1 << u
            new_pmask = pmask & ~(1 << v) if res[v] == 0 else pmask
            choose(idx + 1, need - 1, new_pmask)
            chosen[u] &= ~(1 << v)
            chosen[v] &= ~(1 << u)
            res[v] += 1
            choose(idx + 1, need, pmask)

        res[u] = 0
        choose(0, need, base_mask)
        res[u] = need

    fill(0, (1 << n) - 1)
    arr = np.zeros((len(out), n), dtype=np.uint64)
    for i, tup in enumerate(out):
        for j, x in enumerate(tup):
            arr[i, j] = x
    return arr


def count_perfect_matchings(host_rows, n: int) -> int:
    """Perfect matchings of the host graph by direct recursion (no memo)."""
    rows = _prepare(host_rows, n)
    if n % 2:
        return 0

    def rec(unmatched: int) -> int:
        if unmatched == 0:
            return 1
        b = unmatched & -unmatched
        u = b.bit_length() - 1
        rest = unmatched ^ b
        partners = rows[u] & rest
        total = 0
        while partners:
            pb = partners & -partners
            partners ^= pb
            total += rec(rest ^ pb)
        return total

    return rec((1 << n) - 1)


# -- permutation scans --------------------------------------------------------


def _next_permutation(p: list[int]) -> bool:
    n = len(p)
    i = n - 2
    while i >= 0 and p[i] >= p[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while p[j] <= p[i]:
        j -= 1
    p[i], p[j] = p[j], p[i]
    p[i + 1 :] = reversed(p[i + 1 :])
    return True


def overlap_histogram(h1_rows, h2_u, h2_v, n: int) -> np.ndarray:
    """Histogram of |H1 ∩ σ(H2)| over all n! permutations σ, lex order."""
    rows = _prepare(h1_rows, n)
    eu = [int(x) for x in h2_u]
    ev = [int(x) for x in h2_v]
    m2 = len(eu)
    hist = [0] * (m2 + 1)
    perm = list(range(n))
    while True:
        c = 0
        for a, b in zip(eu, ev):
            if (rows[perm[a]] >> perm[b]) & 1:
                c += 1
        hist[c] += 1
        if not _next_permutation(perm):
            break
    return np.array(hist, dtype=np.int64)


def overlap_mc_histogram(h1_rows, h2_u, h2_v, n: int, trials: int, seed: int, counter: int):
    """Histogram of |H1 ∩ σ(H2)| over `trials` uniform relabellings."""
    rows = _prepare(h1_rows, n)
    eu = [int(x) for x in h2_u]
    ev = [int(x) for x in h2_v]
    m2 = len(eu)
    hist = [0] * (m2 + 1)
    rng = _Rng(seed, counter)
    for _ in range(trials):
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = rng.randbelow(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        c = 0
        for a, b in zip(eu, ev):
            if (rows[perm[a]] >> perm[b]) & 1:
                c += 1
        hist[c] += 1
    return np.array(hist, dtype=np.int64), rng.counter


# -- random samplers ----------------------------------------------------------


def switching_chain(start_rows, n: int, steps: int, seed: int, counter: int):
    """Double-edge-swap chain: `steps` proposals from the start graph.

    Each step draws exactly three words (two edge indices and an orientation
    bit); invalid proposals leave the graph unchanged.
    """
    rows = _prepare(start_rows, n)
    eu: list[int] = []
    ev: list[int] = []
    for u in range(n):
        r = rows[u] >> (u + 1)
        while r:
            b = r & -r
            eu.append(u)
            ev.append(u + 1 + b.bit_length() - 1)
            r ^= b
    m = len(eu)
    rng = _Rng(seed, counter)
    accepted = 0
    if m == 0:
        return np.array(rows, dtype=np.uint64), 0, rng.counter
    for _ in range(steps):
        i = rng.randbelow(m)
        j = rng.randbelow(m)
        orient = rng.next_u64() & 1
        if i == j:
            continue
        u, v = eu[i], ev[i]
        x, y = eu[j], ev[j]
        if orient:
            x, y = y, x
        if u == x or u == y or v == x or v == y:
            continue
        if (rows[u] >> x) & 1 or (rows[v] >> y) & 1:
            continue
        rows[u] &= ~(1 << v)
        rows[v] &= ~(1 << u)
        rows[x] &= ~(1 << y)
        rows[y] &= ~(1 << x)
        rows[u] |= 1 << x
        rows[x] |= 1 << u
        rows[v] |= 1 << y
        rows[y] |= 1 << v
        eu[i], ev[i] = (u, x) if u < x else (x, u)
        eu[j], ev[j] = (v, y) if v < y else (y, v)
        accepted += 1
    return np.array(rows, dtype=np.uint64), accepted, rng.counter


def pairing_attempts(n: int, d: int, seed: int, counter: int, max_attempts: int):
    """Configuration-model rejection sampling for a simple d-regular graph.

    Repeatedly shuffles the dn half-edge stubs and rejects any pairing with a
    loop or multi-edge: conditioned on acceptance the graph is exactly uniform.
    Returns (rows or None, attempts, counter).
    """
    rng = _Rng(seed, counter)
    stubs_init = [v for v in range(n) for _ in range(d)]
    k = len(stubs_init)
    attempts = 0
    while attempts < max_attempts:
        attempts += 1
        stubs = stubs_init.copy()
        for i in range(k - 1, 0, -1):
            j = rng.randbelow(i + 1)
            stubs[i], stubs[j] = stubs[j], stubs[i]
        rows = [0] * n
        ok = True
        for i in range(0, k, 2):
            a, b = stubs[i], stubs[i + 1]
            if a == b or (rows[a] >> b) & 1:
                ok = False
                break
            rows[a] |= 1 << b
            rows[b] |= 1 << a
        if ok:
            return np.array(rows, dtype=np.uint64), attempts, rng.counter
    return None, attempts, rng.counter
