# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: machine-word twins of _purekern.

Same algorithms, same random-draw consumption, bit-identical outputs.
Rows are uint64 bitsets, so everything here requires n <= 64.
"""

from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcpy

import numpy as np

cdef extern from *:
    """
    #include <stdint.h>
    #define POPCNT64(x) ((int)__builtin_popcountll((unsigned long long)(x)))
    #define CTZ64(x) ((int)__builtin_ctzll((unsigned long long)(x)))
    """
    int POPCNT64(unsigned long long x) nogil
    int CTZ64(unsigned long long x) nogil

ctypedef unsigned long long u64

cdef u64 GAMMA = 0x9E3779B97F4A7C15
cdef u64 MIX1 = 0xBF58476D1CE4E5B9
cdef u64 MIX2 = 0x94D049BB133111EB


cdef inline u64 _mix(u64 z) nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef struct Rng:
    u64 seed
    u64 counter


cdef inline u64 rng_next(Rng* r) nogil:
    r.counter += 1
    return _mix(r.seed + r.counter * GAMMA)


cdef inline u64 rng_randbelow(Rng* r, u64 k) nogil:
    cdef u64 t = (0 - k) % k   # 2^64 mod k
    cdef u64 z
    while True:
        z = rng_next(r)
        if z >= t:
            return z % k


cdef inline void _load_rows(object host_rows, int n, u64* rows):
    arr = np.ascontiguousarray(host_rows, dtype=np.uint64)
    if arr.shape[0] != n:
        raise ValueError("row count mismatch")
    cdef u64[::1] view = arr
    cdef int i
    for i in range(n):
        rows[i] = view[i]


# -- degree-constrained subgraph backtracking --------------------------------


cdef inline bint _future_ok(u64* rows, int* res, u64 pos_mask) nogil:
    cdef u64 mask = pos_mask
    cdef u64 b
    cdef int v
    while mask:
        v = CTZ64(mask)
        b = (<u64>1) << v
        mask ^= b
        if res[v] > POPCNT64(rows[v] & pos_mask & ~b):
            return False
    return True


cdef long long _count_fill(u64* rows, int* res, u64 pos_mask, int u, int n) nogil:
    cdef int need, ncand, v
    cdef u64 cand_mask, base_mask
    cdef int cands[64]
    cdef long long total
    while u < n and res[u] == 0:
        pos_mask &= ~((<u64>1) << u)
        u += 1
    if u == n:
        return 1
    need = res[u]
    if u + 1 >= 64:
        cand_mask = 0
    else:
        cand_mask = rows[u] & pos_mask & ~((((<u64>1) << (u + 1))) - 1)
    ncand = 0
    while cand_mask:
        v = CTZ64(cand_mask)
        cands[ncand] = v
        ncand += 1
        cand_mask &= cand_mask - 1
    if ncand < need:
        return 0
    base_mask = pos_mask & ~((<u64>1) << u)
    res[u] = 0
    total = _count_choose(rows, res, cands, ncand, 0, need, base_mask, u, n)
    res[u] = need
    return total


cdef long long _count_choose(u64* rows, int* res, int* cands, int ncand,
                             int idx, int need, u64 pmask, int u, int n) nogil:
    cdef long long acc = 0
    cdef int v
    cdef u64 newp
    if need == 0:
        if _future_ok(rows, res, pmask):
            return _count_fill(rows, res, pmask, u + 1, n)
        return 0
    if ncand - idx < need:
        return 0
    v = cands[idx]
    res[v] -= 1
    if res[v] == 0:
        newp = pmask & ~((<u64>1) << v)
    else:
        newp = pmask
    acc += _count_choose(rows, res, cands, ncand, idx + 1, need - 1, newp, u, n)
    res[v] += 1
    acc += _count_choose(rows, res, cands, ncand, idx + 1, need, pmask, u, n)
    return acc


def count_regular_subgraphs(host_rows, int n, int h):
    """Exact number of h-regular spanning subgraphs of the host graph."""
    cdef u64 rows[64]
    cdef int res[64]
    cdef int i
    cdef long long out
    if n < 1 or n > 64:
        raise ValueError("need 1 <= n <= 64")
    _load_rows(host_rows, n, rows)
    if h == 0:
        return 1
    for i in range(n):
        res[i] = h
    with nogil:
        out = _count_fill(rows, res, ((<u64>1) << n) - 1 if n < 64 else <u64>0 - 1, 0, n)
    return int(out)


cdef struct Collector:
    u64* buf
    size_t used
    size_t cap


cdef int _collect(Collector* col, u64* chosen, int n) nogil:
    cdef u64* nbuf
    if col.used + n > col.cap:
        col.cap = col.cap * 2 if col.cap else 1024
        if col.cap < col.used + n:
            col.cap = col.used + n
        nbuf = <u64*>realloc(col.buf, col.cap * sizeof(u64))
        if nbuf == NULL:
            return -1
        col.buf = nbuf
    memcpy(col.buf + col.used, chosen, n * sizeof(u64))
    col.used += n
    return 0


cdef int _enum_fill(u64* rows, int* res, u64* chosen, Collector* col,
                    u64 pos_mask, int u, int n) nogil:
    cdef int need, ncand, v
    cdef u64 cand_mask, base_mask
    cdef int cands[64]
    cdef int rc
    while u < n and res[u] == 0:
        pos_mask &= ~((<u64>1) << u)
        u += 1
    if u == n:
        return _collect(col, chosen, n)
    need = res[u]
    if u + 1 >= 64:
        cand_mask = 0
    else:
        cand_mask = rows[u] & pos_mask & ~((((<u64>1) << (u + 1))) - 1)
    ncand = 0
    while cand_mask:
        v = CTZ64(cand_mask)
        cands[ncand] = v
        ncand += 1
        cand_mask &= cand_mask - 1
    if ncand < need:
        return 0
    base_mask = pos_mask & ~((<u64>1) << u)
    res[u] = 0
    rc = _enum_choose(rows, res, chosen, col, cands, ncand, 0, need, base_mask, u, n)
    res[u] = need
    return rc


cdef int _enum_choose(u64* rows, int* res, u64* chosen, Collector* col,
                      int* cands, int ncand, int idx, int need, u64 pmask,
                      int u, int n) nogil:
    cdef int v, rc
    cdef u64 newp
    if need == 0:
        if _future_ok(rows, res, pmask):
            return _enum_fill(rows, res, chosen, col, pmask, u + 1, n)
        return 0
    if ncand - idx < need:
        return 0
    v = cands[idx]
    res[v] -= 1
    chosen[u] |= (<u64>1) << v
    chosen[v] |= (<u64>1) << u
    if res[v] == 0:
        newp = pmask & ~((<u64>1) << v)
    else:
        newp = pmask
    rc = _enum_choose(rows, res, chosen, col, cands, ncand, idx + 1, need - 1, newp, u, n)
    chosen[u] &= ~((<u64>1) << v)
    chosen[v] &= ~((<u64>1) << u)
    res[v] += 1
    if rc == 0:
        rc = _enum_choose(rows, res, chosen, col, cands, ncand, idx + 1, need, pmask, u, n)
    return rc


def enumerate_regular_subgraphs(host_rows, int n, int h):
    """All h-regular spanning subgraphs, rows as uint64, lexicographic order."""
    cdef u64 rows[64]
    cdef u64 chosen[64]
    cdef int res[64]
    cdef int i, rc
    cdef Collector col
    if n < 1 or n > 64:
        raise ValueError("need 1 <= n <= 64")
    _load_rows(host_rows, n, rows)
    if h == 0:
        return np.zeros((1, n), dtype=np.uint64)
    for i in range(n):
        res[i] = h
        chosen[i] = 0
    col.buf = NULL
    col.used = 0
    col.cap = 0
    with nogil:
        rc = _enum_fill(rows, res, chosen, &col,
                        ((<u64>1) << n) - 1 if n < 64 else <u64>0 - 1, 0, n)
    if rc != 0:
        free(col.buf)
        raise MemoryError("collector allocation failed")
    count = col.used // n
    out = np.empty((count, n), dtype=np.uint64)
    cdef u64[:, ::1] oview = out
    cdef size_t k
    if count:
        memcpy(&oview[0, 0], col.buf, col.used * sizeof(u64))
    free(col.buf)
    return out


cdef long long _pm_rec(u64* rows, u64 unmatched) nogil:
    cdef int u
    cdef u64 rest, partners, pb
    cdef long long total = 0
    if unmatched == 0:
        return 1
    u = CTZ64(unmatched)
    rest = unmatched ^ ((<u64>1) << u)
    partners = rows[u] & rest
    while partners:
        pb = partners & (0 - partners)
        partners ^= pb
        total += _pm_rec(rows, rest ^ pb)
    return total


def count_perfect_matchings(host_rows, int n):
    """Perfect matchings of the host graph by direct recursion (no memo)."""
    cdef u64 rows[64]
    cdef long long out
    if n < 1 or n > 64:
        raise ValueError("need 1 <= n <= 64")
    _load_rows(host_rows, n, rows)
    if n % 2:
        return 0
    with nogil:
        out = _pm_rec(rows, ((<u64>1) << n) - 1 if n < 64 else <u64>0 - 1)
    return int(out)


# -- permutation scans --------------------------------------------------------


cdef inline bint _next_perm(int* p, int n) nogil:
    cdef int i = n - 2
    cdef int j, t, lo, hi
    while i >= 0 and p[i] >= p[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while p[j] <= p[i]:
        j -= 1
    t = p[i]; p[i] = p[j]; p[j] = t
    lo = i + 1
    hi = n - 1
    while lo < hi:
        t = p[lo]; p[lo] = p[hi]; p[hi] = t
        lo += 1
        hi -= 1
    return True


def overlap_histogram(h1_rows, h2_u, h2_v, int n):
    """Histogram of |H1 ∩ σ(H2)| over all n! permutations σ, lex order."""
    cdef u64 rows[64]
    cdef int perm[64]
    cdef int eu[2080]
    cdef int ev[2080]
    cdef int m2, i, c
    if n < 1 or n > 64:
        raise ValueError("need 1 <= n <= 64")
    _load_rows(h1_rows, n, rows)
    u_arr = np.ascontiguousarray(h2_u, dtype=np.int32)
    v_arr = np.ascontiguousarray(h2_v, dtype=np.int32)
    m2 = u_arr.shape[0]
    if m2 > 2080:
        raise ValueError("too many edges")
    cdef int[::1] uv = u_arr
    cdef int[::1] vv = v_arr
    for i in range(m2):
        eu[i] = uv[i]
        ev[i] = vv[i]
    hist_arr = np.zeros(m2 + 1, dtype=np.int64)
    cdef long long[::1] hist = hist_arr
    for i in range(n):
        perm[i] = i
    with nogil:
        while True:
            c = 0
            for i in range(m2):
                if (rows[perm[eu[i]]] >> perm[ev[i]]) & 1:
                    c += 1
            hist[c] += 1
            if not _next_perm(perm, n):
                break
    return hist_arr


def overlap_mc_histogram(h1_rows, h2_u, h2_v, int n, long long trials,
                         u64 seed, u64 counter):
    """Histogram of |H1 ∩ σ(H2)| over `trials` uniform relabellings."""
    cdef u64 rows[64]
    cdef int perm[64]
    cdef int eu[2080]
    cdef int ev[2080]
    cdef int m2, i, c, j, t
    cdef long long trial
    cdef Rng rng
    if n < 1 or n > 64:
        raise ValueError("need 1 <= n <= 64")
    _load_rows(h1_rows, n, rows)
    u_arr = np.ascontiguousarray(h2_u, dtype=np.int32)
    v_arr = np.ascontiguousarray(h2_v, dtype=np.int32)
    m2 = u_arr.shape[0]
    if m2 > 2080:
        raise ValueError("too many edges")
    cdef int[::1] uv = u_arr
    cdef int[::1] vv = v_arr
    for i in range(m2):
        eu[i] = uv[i]
        ev[i] = vv[i]
    hist_arr = np.zeros(m2 + 1, dtype=np.int64)
    cdef long long[::1] hist = hist_arr
    rng.seed = seed
    rng.counter = counter
    with nogil:
        for trial in range(trials):
            for i in range(n):
                perm[i] = i
            for i in range(n - 1, 0, -1):
                j = <int>rng_randbelow(&rng, i + 1)
                t = perm[i]; perm[i] = perm[j]; perm[j] = t
            c = 0
            for i in range(m2):
                if (rows[perm[eu[i]]] >> perm[ev[i]]) & 1:
                    c += 1
            hist[c] += 1
    return hist_arr, int(rng.counter)


# -- random samplers ----------------------------------------------------------


def switching_chain(start_rows, int n, long long steps, u64 seed, u64 counter):
    """Double-edge-swap chain; exactly three draws per step, rejects in place."""
    cdef u64 rows[64]
    cdef int eu[2080]
    cdef int ev[2080]
    cdef int m, i, j, u, v, x, y, t
    cdef long long step, accepted = 0
    cdef u64 orient, r
    cdef Rng rng
    if n < 1 or n > 64:
        raise ValueError("need 1 <= n <= 64")
    _load_rows(start_rows, n, rows)
    m = 0
    for u in range(n):
        r = rows[u] >> (u + 1) if u + 1 < 64 else 0
        while r:
            eu[m] = u
            ev[m] = u + 1 + CTZ64(r)
            m += 1
            r &= r - 1
    rng.seed = seed
    rng.counter = counter
    if m > 0:
        with nogil:
            for step in range(steps):
                i = <int>rng_randbelow(&rng, m)
                j = <int>rng_randbelow(&rng, m)
                orient = rng_next(&rng) & 1
                if i == j:
                    continue
                u = eu[i]; v = ev[i]
                x = eu[j]; y = ev[j]
                if orient:
                    t = x; x = y; y = t
                if u == x or u == y or v == x or v == y:
                    continue
                if ((rows[u] >> x) & 1) or ((rows[v] >> y) & 1):
                    continue
                rows[u] &= ~((<u64>1) << v)
                rows[v] &= ~((<u64>1) << u)
                rows[x] &= ~((<u64>1) << y)
                rows[y] &= ~((<u64>1) << x)
                rows[u] |= (<u64>1) << x
                rows[x] |= (<u64>1) << u
                rows[v] |= (<u64>1) << y
                rows[y] |= (<u64>1) << v
                if u < x:
                    eu[i] = u; ev[i] = x
                else:
                    eu[i] = x; ev[i] = u
                if v < y:
                    eu[j] = v; ev[j] = y
                else:
                    eu[j] = y; ev[j] = v
                accepted += 1
    out = np.empty(n, dtype=np.uint64)
    cdef u64[::1] oview = out
    for i in range(n):
        oview[i] = rows[i]
    return out, int(accepted), int(rng.counter)


def pairing_attempts(int n, int d, u64 seed, u64 counter, long long max_attempts):
    """Configuration-model rejection sampling; uniform over simple graphs."""
    cdef u64 rows[64]
    cdef int stubs[4096]
    cdef int k, i, j, a, b, t, v
    cdef long long attempts = 0
    cdef bint ok
    cdef Rng rng
    if n < 1 or n > 64:
        raise ValueError("need 1 <= n <= 64")
    if n * d > 4096:
        raise ValueError("too many stubs")
    k = n * d
    rng.seed = seed
    rng.counter = counter
    ok = False
    with nogil:
        while attempts < max_attempts:
            attempts += 1
            t = 0
            for v in range(n):
                for i in range(d):
                    stubs[t] = v
                    t += 1
            for i in range(k - 1, 0, -1):
                j = <int>rng_randbelow(&rng, i + 1)
                t = stubs[i]; stubs[i] = stubs[j]; stubs[j] = t
            for i in range(n):
                rows[i] = 0
            ok = True
            for i in range(0, k, 2):
                a = stubs[i]; b = stubs[i + 1]
                if a == b or ((rows[a] >> b) & 1):
                    ok = False
                    break
                rows[a] |= (<u64>1) << b
                rows[b] |= (<u64>1) << a
            if ok:
                break
    if not ok:
        return None, int(attempts), int(rng.counter)
    out = np.empty(n, dtype=np.uint64)
    cdef u64[::1] oview = out
    for i in range(n):
        oview[i] = rows[i]
    return out, int(attempts), int(rng.counter)
