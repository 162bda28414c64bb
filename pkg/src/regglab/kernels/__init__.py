"""Kernel backend selection.

The hot inner loops (degree-constrained backtracking, permutation scans,
swap chains, pairing rejection) live in a compiled extension when available;
a pure-Python twin with identical semantics is the fallback.  Set
REGGLAB_PURE=1 to force the fallback, e.g. for benchmarking.
"""

import os

from . import _purekern

if os.environ.get("REGGLAB_PURE") == "1":
    _impl = _purekern
    BACKEND = "python"
else:
    try:
        from . import _fastkern as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _purekern
        BACKEND = "python"

count_regular_subgraphs = _impl.count_regular_subgraphs
enumerate_regular_subgraphs = _impl.enumerate_regular_subgraphs
count_perfect_matchings = _impl.count_perfect_matchings
overlap_histogram = _impl.overlap_histogram
overlap_mc_histogram = _impl.overlap_mc_histogram
switching_chain = _impl.switching_chain
pairing_attempts = _impl.pairing_attempts
