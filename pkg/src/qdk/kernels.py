"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set ``QDK_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from math import comb

import numpy as np

from . import _kernels

try:
    if os.environ.get("QDK_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _speedups
except ImportError:
    _speedups = None

HAVE_EXTENSION = _speedups is not None
BACKEND = "cython" if HAVE_EXTENSION else "python"

# every intermediate of the 64-bit kernel is bounded by (total weight)**4
_INT64_SAFE = 1 << 62


def _csr(n, adj):
    indptr = np.zeros(n + 1, dtype=np.int64)
    for u in range(n):
        indptr[u + 1] = indptr[u] + len(adj[u])
    indices = []
    weights = []
    for u in range(n):
        for v, w in adj[u].items():
            indices.append(v)
            weights.append(w)
    return indptr, indices, weights


def c4_weighted(n, adj, use_extension=None):
    """Weighted 4-cycle count; ``adj[u]`` maps neighbor -> positive integer weight."""
    indptr, indices, weights = _csr(n, adj)
    total_w = sum(weights) // 2
    fast = HAVE_EXTENSION if use_extension is None else (use_extension and HAVE_EXTENSION)
    if fast and total_w ** 4 < _INT64_SAFE:
        return int(
            _speedups.c4_weighted(
                n, indptr, np.asarray(indices, dtype=np.int64), np.asarray(weights, dtype=np.int64)
            )
        )
    return _kernels.c4_weighted(n, indptr.tolist(), indices, weights)


def quartet_tally(D1, D2, use_extension=None):
    """``(differ, shared_resolved, shared_star)`` over all quartets."""
    fast = HAVE_EXTENSION if use_extension is None else (use_extension and HAVE_EXTENSION)
    if fast:
        return tuple(int(x) for x in _speedups.quartet_tally(D1, D2))
    return _kernels.quartet_tally(np.asarray(D1), np.asarray(D2))


def colored_profile(n, adj_colors):
    """Symbolic colored profile; ``adj_colors[u]`` maps neighbor -> color in 0..4."""
    indptr, indices, colors = _csr(n, adj_colors)
    return _kernels.colored_profile(n, indptr.tolist(), indices, colors)


def power_split_fits(g):
    """Whether the compiled power-of-two split can run ``g`` in 64 bits."""
    # term = f · multinomial · ∏p with f <= C(m, 4), multinomial <= 24, p <= max_mult
    bound = 4 * (g.max_mult.bit_length() - 1) + 5 + comb(len(g.edges), 4).bit_length()
    return HAVE_EXTENSION and bound <= 62


def c4_power_split(g):
    """``(total, weight_multisets, groups, profile_calls)`` from the compiled kernel."""
    n = g.node_count
    adj: list[dict] = [dict() for _ in range(n)]
    mult = np.empty(len(g.edges), dtype=np.int64)
    for i, (u, v, k) in enumerate(g.edges):
        adj[u][v] = i
        adj[v][u] = i
        mult[i] = k
    indptr, indices, eids = _csr(n, adj)
    res = _speedups.c4_power_split(
        n, indptr, np.asarray(indices, dtype=np.int64), np.asarray(eids, dtype=np.int64), mult
    )
    return tuple(int(x) for x in res)
