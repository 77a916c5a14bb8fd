"""Pure-Python implementations of the hot kernels.

These are the reference versions; :mod:`qdk._speedups` mirrors them in
Cython. :mod:`qdk.kernels` picks one at import time.
"""

from __future__ import annotations

import itertools

import numpy as np


def c4_weighted(n, indptr, indices, weights):
    """Weighted 4-cycle count of a graph given in CSR form.

    ``weights`` may hold arbitrary Python ints. For every node pair
    ``{u, w}`` the weighted 2-paths ``S1 = Σ w(u,v) w(v,w)`` and
    ``S2 = Σ (w(u,v) w(v,w))²`` give ``(S1² - S2) / 2`` cycles through the
    diagonal ``{u, w}``; every cycle has two diagonals.
    """
    total = 0
    for u in range(n):
        s1 = {}
        s2 = {}
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            wuv = weights[p]
            for q in range(indptr[v], indptr[v + 1]):
                w = indices[q]
                if w <= u:
                    continue
                x = wuv * weights[q]
                s1[w] = s1.get(w, 0) + x
                s2[w] = s2.get(w, 0) + x * x
        for w, a in s1.items():
            total += a * a - s2[w]
    return total // 4


def _topology(D, a, b, c, d):
    s1 = D[a, b] + D[c, d]
    s2 = D[a, c] + D[b, d]
    s3 = D[a, d] + D[b, c]
    t = np.full(s1.shape, 3, dtype=np.int8)
    t[(s1 > s2) & (s1 > s3)] = 0
    t[(s2 > s1) & (s2 > s3)] = 1
    t[(s3 > s1) & (s3 > s2)] = 2
    return t


def quartet_tally(D1, D2, chunk=1 << 18):
    """Classify every quartet in both trees.

    ``D1``/``D2`` hold the depth of the pairwise LCA of leaves (same leaf
    order). Returns ``(differ, shared_resolved, shared_star)``.
    """
    n = D1.shape[0]
    differ = resolved = star = 0
    combos = itertools.combinations(range(n), 4)
    while True:
        block = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        q = block.reshape(-1, 4)
        a, b, c, d = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
        t1 = _topology(D1, a, b, c, d)
        t2 = _topology(D2, a, b, c, d)
        same = t1 == t2
        differ += int(np.count_nonzero(~same))
        s = int(np.count_nonzero(same & (t1 == 3)))
        star += s
        resolved += int(np.count_nonzero(same)) - s
    return differ, resolved, star


def _vectors(total):
    return [
        (a, b, c, total - a - b - c)
        for a in range(total + 1)
        for b in range(total + 1 - a)
        for c in range(total + 1 - a - b)
    ]


DEG4 = sorted(_vectors(4), reverse=True)
DEG2 = sorted(_vectors(2), reverse=True)
_IDX4 = {k: i for i, k in enumerate(DEG4)}
_UNIT = [tuple(int(i == c) for i in range(4)) for c in range(4)]
# color pair -> degree-2 monomial, monomial pair -> degree-4 monomial
PAIR2 = [[DEG2.index(tuple(x + y for x, y in zip(_UNIT[a], _UNIT[b]))) for b in range(4)] for a in range(4)]
PROD4 = [[_IDX4[tuple(x + y for x, y in zip(p, q))] for q in DEG2] for p in DEG2]


def colored_profile(n, indptr, indices, colors):
    """Cycle counts per color vector for colors ``1..4`` (``0`` = uncolored).

    The codegree identity evaluated in the ring of polynomials in four color
    variables truncated at degree 4. Result is aligned with ``DEG4``.
    """
    out = [0] * len(DEG4)
    for u in range(n):
        s1 = {}
        s2 = {}
        for p in range(indptr[u], indptr[u + 1]):
            cu = colors[p]
            if not cu:
                continue
            v = indices[p]
            for q in range(indptr[v], indptr[v + 1]):
                w = indices[q]
                cw = colors[q]
                if w <= u or not cw:
                    continue
                m = PAIR2[cu - 1][cw - 1]
                vec = s1.get(w)
                if vec is None:
                    vec = s1[w] = [0] * len(DEG2)
                    s2[w] = [0] * len(DEG2)
                vec[m] += 1
                s2[w][m] += 1
        for w, vec in s1.items():
            sq = s2[w]
            for i, a in enumerate(vec):
                if not a:
                    continue
                out[PROD4[i][i]] += a * a - sq[i]
                for j in range(i + 1, len(DEG2)):
                    if vec[j]:
                        out[PROD4[i][j]] += 2 * a * vec[j]
    return [x // 4 for x in out]
