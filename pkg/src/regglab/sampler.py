"""Uniform and near-uniform samplers for regular graph ensembles.

Three sampling routes with one seeding contract:

* exhaustive enumeration for small n (the support of every exact experiment),
* configuration-model pairing with rejection — exactly uniform, practical
  only for small degree,
* a double-edge-swap chain from a circulant start — approximately uniform,
  for the dense shapes where pairing rejection stalls.

Every sampler is a pure function of its inputs and a SeedSpec, so trials
parallelise by stream_index with no shared state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from . import kernels
from .errors import DomainError, ParityError, RejectionBudgetExceeded, TooLarge
from .graphcore import Graph, complete_graph, intersection_size, relabel
from .rng import SeedSpec, Stream

# Pairing rejection odds fall off like exp(-d^2/4): past this degree we warn.
PAIRING_DEGREE_GUARD = 8

DEFAULT_MAX_ENUM = 12

DISJOINT_REJECTION_CAP = 10**6


@dataclass(frozen=True)
class SamplerStats:
    attempts: int
    accepted: int
    method: str

    def __post_init__(self):
        if self.accepted > self.attempts:
            raise ValueError("accepted cannot exceed attempts")


def _check_parity(n: int, d: int) -> None:
    if (n * d) % 2:
        raise ParityError(f"no {d}-regular graph on {n} vertices (nd odd)")
    if d < 0 or d > n - 1:
        raise DomainError(f"degree {d} outside [0, {n - 1}]")


def enumerate_regular(n: int, d: int, max_enum: int = DEFAULT_MAX_ENUM) -> list[Graph]:
    """Every labelled d-regular graph on [n], exactly once, in lexicographic
    edge-set order."""
    _check_parity(n, d)
    if 3 <= d <= n - 4 and n > max_enum:
        raise TooLarge(f"enumeration of (n={n}, d={d}) exceeds guard max_enum={max_enum}")
    if n > 64:
        raise TooLarge("enumeration requires n <= 64")
    host = complete_graph(n)
    arr = kernels.enumerate_regular_subgraphs(host.to_masks(), n, d)
    return [Graph.from_masks(row, n) for row in arr]


def sample_pairing(n: int, d: int, seed: SeedSpec,
                   max_attempts: int = 10**7) -> tuple[Graph, SamplerStats]:
    """Exactly uniform d-regular graph by configuration-model rejection."""
    _check_parity(n, d)
    if n > 64:
        raise TooLarge("pairing sampler requires n <= 64")
    if d > PAIRING_DEGREE_GUARD:
        warnings.warn(
            f"pairing rejection is impractical for d={d} > {PAIRING_DEGREE_GUARD}; "
            "consider sample_switching",
            stacklevel=2,
        )
    stream = Stream(seed)
    rows, attempts, _ = kernels.pairing_attempts(n, d, stream.seed, stream.counter, max_attempts)
    if rows is None:
        raise RejectionBudgetExceeded(f"no simple pairing found in {attempts} attempts")
    return Graph.from_masks(rows, n), SamplerStats(attempts=attempts, accepted=1, method="pairing")


def circulant_start(n: int, d: int) -> Graph:
    """Deterministic d-regular start: i ~ i±1..±floor(d/2) (mod n), plus the
    diameter matching when d is odd (needs n even)."""
    _check_parity(n, d)
    rows = [0] * n
    for i in range(n):
        for k in range(1, d // 2 + 1):
            j = (i + k) % n
            if i != j:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    if d % 2 == 1:
        for i in range(n // 2):
            j = i + n // 2
            rows[i] |= 1 << j
            rows[j] |= 1 << i
    g = Graph(n, rows)
    if not (g.is_regular().valid and g.degree(0) == d):
        raise DomainError(f"no circulant start for (n={n}, d={d})")
    return g


def sample_switching(n: int, d: int, seed: SeedSpec, steps: int | None = None
                     ) -> tuple[Graph, SamplerStats]:
    """Approximately uniform d-regular graph: double-edge-swap chain from the
    circulant start.  steps=None means the 100*n*d default burn-in."""
    _check_parity(n, d)
    if n > 64:
        raise TooLarge("switching sampler requires n <= 64")
    if steps is None:
        steps = 100 * n * d
    start = circulant_start(n, d)
    stream = Stream(seed)
    rows, accepted, _ = kernels.switching_chain(start.to_masks(), n, steps, stream.seed, stream.counter)
    return Graph.from_masks(rows, n), SamplerStats(attempts=steps, accepted=accepted, method="switching")


def sample_disjoint_pair(n: int, d1: int, d2: int, seed: SeedSpec,
                         max_attempts: int = DISJOINT_REJECTION_CAP
                         ) -> tuple[tuple[Graph, Graph], SamplerStats]:
    """Independent uniform pair conditioned on edge-disjointness.

    Resamples both graphs until disjoint, so the accepted pair is exactly
    distributed as the conditioned product measure.
    """
    _check_parity(n, d1)
    _check_parity(n, d2)
    if d1 + d2 > n - 1:
        raise DomainError(f"d1+d2={d1 + d2} exceeds n-1={n - 1}: disjoint pair impossible")
    stream = Stream(seed)
    for attempt in range(1, max_attempts + 1):
        rows1, a1, c1 = kernels.pairing_attempts(n, d1, stream.seed, stream.counter, 10**7)
        stream.counter = c1
        rows2, a2, c2 = kernels.pairing_attempts(n, d2, stream.seed, stream.counter, 10**7)
        stream.counter = c2
        if rows1 is None or rows2 is None:
            raise RejectionBudgetExceeded("pairing sampler stalled")
        g1 = Graph.from_masks(rows1, n)
        g2 = Graph.from_masks(rows2, n)
        if intersection_size(g1, g2) == 0:
            return (g1, g2), SamplerStats(attempts=attempt, accepted=1, method="pairing")
    raise RejectionBudgetExceeded(f"no disjoint pair in {max_attempts} attempts")


def random_relabel(g: Graph, seed: SeedSpec) -> Graph:
    """Relabelling by a permutation uniform over all n! (Fisher-Yates)."""
    stream = Stream(seed)
    perm = list(range(g.n))
    stream.shuffle(perm)
    return relabel(g, perm)
