"""Exact 4-cycle counting in simple graphs, colored graphs and multigraphs.

The multigraph path follows the chain

    multigraph --(power-of-two split, 4-colorings)--> colored simple graph
    colored simple graph --(polynomial in the color weights)--> bounded-mult multigraph
    bounded-mult multigraph --(node copies, bad-cycle correction)--> simple graph

where only the last step calls a simple-graph counter (a :class:`CounterBackend`).
"""

from __future__ import annotations

import itertools
from collections import Counter
from math import comb, factorial
from typing import Callable, Mapping, Sequence

from . import _kernels, kernels
from .graph import GraphFormatError, Multigraph, brute_count_c4, exact_div

__all__ = [
    "CounterBackend",
    "get_backend",
    "count_c4_codegree",
    "count_c4_weighted",
    "expand_small_multiplicity",
    "count_bad_cycles",
    "count_c4_small_mult",
    "PROFILE_KEYS",
    "count_colored_profile",
    "count_c4_naive_coloring",
    "count_c4_multigraph",
    "MultigraphStats",
]


class CounterBackend:
    """A simple-graph 4-cycle counter with a call counter."""

    def __init__(self, name: str, fn: Callable[[Multigraph], int]):
        self.name = name
        self.fn = fn
        self.calls = 0

    def __call__(self, g: Multigraph) -> int:
        if not g.is_simple:
            raise GraphFormatError(f"backend {self.name!r} needs a simple graph")
        self.calls += 1
        return self.fn(g)

    def __repr__(self):
        return f"CounterBackend({self.name!r}, calls={self.calls})"


def count_c4_codegree(g: Multigraph) -> int:
    """Count 4-cycles of a simple graph from pairwise codegrees.

    Every node pair ``{u, w}`` with ``k`` common neighbours closes ``C(k, 2)``
    cycles; each cycle has two such diagonals.
    """
    if not g.is_simple:
        raise GraphFormatError("codegree counter needs a simple graph")
    return kernels.c4_weighted(g.node_count, g.adjacency())


def count_c4_weighted(g: Multigraph) -> int:
    """Codegree counting with integer edge weights (multiplicities)."""
    return kernels.c4_weighted(g.node_count, g.adjacency())


def get_backend(name: str = "codegree") -> CounterBackend:
    if name == "codegree":
        return CounterBackend("codegree", count_c4_codegree)
    if name == "brute":
        return CounterBackend("brute", brute_count_c4)
    raise ValueError(f"unknown backend {name!r}")


def _default(backend):
    return get_backend() if backend is None else backend


# --- small multiplicities -------------------------------------------------


def expand_small_multiplicity(g: Multigraph, c: int):
    """Replace every node by ``c`` copies and every k-fold edge by ``k·c`` simple edges.

    Copy ``i`` of node ``v`` is node ``v*c + i`` of the result. Returns the
    simple graph and the provenance list ``node -> (original node, copy index)``.
    """
    if c < 1:
        raise ValueError("c must be positive")
    if g.max_mult > c:
        raise ValueError(f"multiplicity {g.max_mult} exceeds c={c}")
    edges = []
    for u, v, k in g.edges:
        for i in range(c):
            for j in range(k):
                edges.append((u * c + i, v * c + (i + j) % c))
    provenance = [(x // c, x % c) for x in range(g.node_count * c)]
    return Multigraph(g.node_count * c, edges), provenance


def count_bad_cycles(g_prime: Multigraph, provenance: Sequence[tuple[int, int]], c: int) -> int:
    """4-cycles of an expansion that visit two copies of one original node."""
    if c == 1:
        return 0
    adj = g_prime.adjacency()
    n = len(provenance) // c
    doubled = 0  # cycles on copies of two originals, seen from both of them
    single = 0
    for u in range(n):
        for i in range(c):
            ni = adj[u * c + i]
            for j in range(i + 1, c):
                nj = adj[u * c + j]
                comm: Counter = Counter()
                for y in ni:
                    if y in nj:
                        comm[provenance[y][0]] += 1
                s1 = sum(comm.values())
                s2 = sum(k * k for k in comm.values())
                doubled += sum(comb(k, 2) for k in comm.values())
                single += (s1 * s1 - s2) // 2
    return exact_div(doubled, 2) + single


def count_c4_small_mult(g: Multigraph, c: int, backend: CounterBackend | None = None) -> int:
    """``(backend(G') - bad) / c`` over the ``c``-copy expansion ``G'``.

    Exact when every multiplicity is 1, for any ``c``. With parallel edges
    a cycle lifts to a closed cycle only when its copy shifts cancel mod
    ``c``, so the quotient undercounts (e.g. a 4-cycle with multiplicities
    2,1,1,1 and ``c = 2`` gives 1 instead of 2). Kept as the literal
    reduction step; :func:`count_c4_multigraph` does not use it.
    """
    backend = _default(backend)
    g_prime, prov = expand_small_multiplicity(g, c)
    total = backend(g_prime)
    return exact_div(total - count_bad_cycles(g_prime, prov, c), c)


# --- colored profiles -------------------------------------------------------

PROFILE_KEYS = tuple(
    (a, b, cc, d)
    for a in range(5)
    for b in range(5)
    for cc in range(5)
    for d in range(5)
    if a + b + cc + d == 4
)
_EXPONENT = {key: key[0] + 5 * key[1] + 25 * key[2] + 125 * key[3] for key in PROFILE_KEYS}
_DEGREE = 500
_SYMBOLIC_INDEX = {key: i for i, key in enumerate(_kernels.DEG4)}


def _colored_multigraph(g: Multigraph, colors: Sequence, xs: Sequence[int]) -> Multigraph:
    edges = []
    for (u, v, _), col in zip(g.edges, colors):
        if col is not None and xs[col - 1] > 0:
            edges.append((u, v, xs[col - 1]))
    return Multigraph(g.node_count, edges)


def _evaluate(g, colors, xs, evaluator):
    return evaluator(_colored_multigraph(g, colors, xs))


def _newton_to_monomial(values: Sequence[int]) -> list[int]:
    """Integer coefficients of the polynomial through ``(i+1, values[i])``."""
    diffs = list(values)
    newton = []
    for k in range(len(values)):
        newton.append(exact_div(diffs[0], factorial(k)))
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    # Horner over the nodes 1..k: p(x) = c0 + (x-1)(c1 + (x-2)(c2 + ...))
    coeffs = [0]
    for k in range(len(newton) - 1, -1, -1):
        node = k + 1
        shifted = [0] + coeffs
        for i, a in enumerate(coeffs):
            shifted[i] -= node * a
        shifted[0] += newton[k]
        coeffs = shifted
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def count_colored_profile(
    g: Multigraph,
    colors: Sequence,
    backend: CounterBackend | None = None,
    method: str = "kronecker",
    evaluator: Callable[[Multigraph], int] | None = None,
) -> dict[tuple[int, int, int, int], int]:
    """Number of 4-cycles per color count vector ``(a, b, c, d)``.

    ``colors`` is aligned with ``g.edges``; entries are 1..4 or ``None``.
    The weighted count ``h(x) = g_K(x, x^5, x^25, x^125)`` is a polynomial of
    degree at most 500 whose only possible non-zero coefficients sit at
    ``a + 5b + 25c + 125d``.

    ``method="interpolate"`` evaluates ``h`` at ``x = 1..501`` and
    interpolates exactly. ``method="kronecker"`` evaluates once at a base
    larger than any coefficient and reads the base-``B`` digits.
    ``method="symbolic"`` runs the codegree identity over polynomials in the
    four color variables and reads the coefficients directly.

    ``evaluator`` counts weighted 4-cycles of a multigraph; by default the
    weighted codegree counter. Pass e.g. ``lambda h: count_c4_small_mult(h,
    h.max_mult, backend)`` to route every evaluation through the simple-graph
    backend (only sensible for tiny graphs).
    """
    if not g.is_simple:
        raise GraphFormatError("colored profiles need a simple base graph")
    if len(colors) != len(g.edges):
        raise ValueError("one color per edge required")
    for col in colors:
        if col is not None and col not in (1, 2, 3, 4):
            raise ValueError(f"invalid color {col!r}")
    evaluator = count_c4_weighted if evaluator is None else evaluator
    n_colored = sum(col is not None for col in colors)
    if n_colored < 4:
        return dict.fromkeys(PROFILE_KEYS, 0)

    if method == "symbolic":
        adj = [dict() for _ in range(g.node_count)]
        for (u, v, _), col in zip(g.edges, colors):
            adj[u][v] = adj[v][u] = col or 0
        counts = kernels.colored_profile(g.node_count, adj)
        return {key: counts[_SYMBOLIC_INDEX[key]] for key in PROFILE_KEYS}
    if method == "interpolate":
        values = [
            _evaluate(g, colors, (x, x**5, x**25, x**125), evaluator) for x in range(1, _DEGREE + 2)
        ]
        coeffs = _newton_to_monomial(values)
        coeffs += [0] * (_DEGREE + 1 - len(coeffs))
    elif method == "kronecker":
        base = comb(n_colored, 4) + 1
        value = _evaluate(g, colors, (base, base**5, base**25, base**125), evaluator)
        coeffs = []
        while value:
            value, r = divmod(value, base)
            coeffs.append(r)
        if len(coeffs) > _DEGREE + 1:
            raise ArithmeticError("profile polynomial has degree above 500")
        coeffs += [0] * (_DEGREE + 1 - len(coeffs))
    else:
        raise ValueError(f"unknown method {method!r}")

    legal = set(_EXPONENT.values())
    for e, a in enumerate(coeffs):
        if a and e not in legal:
            raise ArithmeticError(f"non-zero coefficient at illegal exponent {e}")
        if a < 0:
            raise ArithmeticError("negative coefficient")
    return {key: coeffs[_EXPONENT[key]] for key in PROFILE_KEYS}


class _ProfileCache:
    """Memoizes colored profiles by coloring; counts distinct black-box calls."""

    def __init__(self, g: Multigraph, backend, method: str):
        self.base = g.simple_support()
        self.backend = backend
        self.method = method
        self.cache: dict = {}
        self.calls = 0

    def get(self, colors: tuple):
        prof = self.cache.get(colors)
        if prof is None:
            self.calls += 1
            prof = count_colored_profile(self.base, colors, self.backend, method=self.method)
            self.cache[colors] = prof
        return prof


def _pad(exps):
    return tuple(exps) + (0,) * (4 - len(exps))


def count_c4_naive_coloring(
    g: Multigraph, backend: CounterBackend | None = None, method: str = "kronecker"
) -> int:
    """One coloring per set of up to four distinct multiplicity values.

    Every 4-cycle is counted once: in the coloring of exactly the distinct
    multiplicities it uses, with the exponent pattern of those values.
    """
    backend = _default(backend)
    cache = _ProfileCache(g, backend, method)
    mults = [k for _, _, k in g.edges]
    values = sorted(set(mults), reverse=True)

    def f(chosen, exps):
        colors = tuple(chosen.index(k) + 1 if k in chosen else None for k in mults)
        return cache.get(colors)[_pad(exps)]

    total = 0
    for a, i in enumerate(values):
        total += i**4 * f([i], (4,))
        for b in range(a + 1, len(values)):
            j = values[b]
            total += (
                i * i * j * j * f([i, j], (2, 2))
                + i**3 * j * f([i, j], (3, 1))
                + i * j**3 * f([i, j], (1, 3))
            )
            for cc in range(b + 1, len(values)):
                k = values[cc]
                total += (
                    i * i * j * k * f([i, j, k], (2, 1, 1))
                    + i * j * j * k * f([i, j, k], (1, 2, 1))
                    + i * j * k * k * f([i, j, k], (1, 1, 2))
                )
                for d in range(cc + 1, len(values)):
                    l = values[d]
                    total += i * j * k * l * f([i, j, k, l], (1, 1, 1, 1))
    return total


class MultigraphStats:
    """Instrumentation of one :func:`count_c4_multigraph` run."""

    def __init__(self):
        self.weight_multisets = 0
        self.groups = 0
        self.profile_calls = 0

    def as_dict(self):
        return dict(vars(self))


def _bits(x: int) -> list[int]:
    out = []
    p = 1
    while p <= x:
        if x & p:
            out.append(p)
        p <<= 1
    return out


def _lex_key(mask: int) -> tuple[int, ...]:
    return tuple(_bits(mask))


def count_c4_multigraph(
    g: Multigraph,
    backend: CounterBackend | None = None,
    method: str = "auto",
    stats: MultigraphStats | None = None,
) -> int:
    """4-cycles of a multigraph through colored simple-graph profiles.

    Each edge is split into its binary digits. For every multiset ``W`` of
    four powers of two present in the graph and every assignment of the
    classes ``M_i = bits(mult) ∩ Q`` (``Q`` the distinct powers in ``W``,
    ``p_i ∈ M_i``, ties ordered lexicographically) the cycles whose edge
    classes are exactly ``{M_1..M_4}`` are read off one colored profile and
    weighted by ``∏ p_i`` and the multinomial number of ways to place the
    powers on edges of equal class.

    ``method="auto"`` runs the whole loop in the compiled core when the
    counts fit in 64 bits and otherwise uses symbolic profiles here.
    """
    backend = _default(backend)
    stats = MultigraphStats() if stats is None else stats
    if len(g.edges) < 4:
        return 0
    if method == "auto":
        if kernels.power_split_fits(g):
            total, n_w, n_groups, n_calls = kernels.c4_power_split(g)
            stats.weight_multisets += n_w
            stats.groups += n_groups
            stats.profile_calls += n_calls
            return total
        method = "symbolic"
    cache = _ProfileCache(g, backend, method)
    mults = [k for _, _, k in g.edges]
    powers = sorted({p for k in mults for p in _bits(k)})
    total = 0
    for w in itertools.combinations_with_replacement(powers, 4):
        stats.weight_multisets += 1
        qmask = 0
        for p in w:
            qmask |= p
        classes = [k & qmask for k in mults]
        present = sorted({c for c in classes if c}, key=_lex_key)
        cands = [[m for m in present if m & p] for p in w]
        if any(not c for c in cands):
            continue
        wprod = w[0] * w[1] * w[2] * w[3]
        for ms in itertools.product(*cands):
            if any(w[i] == w[i + 1] and _lex_key(ms[i]) > _lex_key(ms[i + 1]) for i in range(3)):
                continue
            distinct = sorted(set(ms), key=_lex_key)
            if sum(classes.count(m) for m in distinct) < 4:
                continue
            stats.groups += 1
            colors = tuple(distinct.index(c) + 1 if c in distinct else None for c in classes)
            exps = _pad([ms.count(m) for m in distinct])
            f = cache.get(colors)[exps]
            if not f:
                continue
            multinom = 1
            for m in distinct:
                x_m = ms.count(m)
                term = factorial(x_m)
                for q, y in Counter(w[i] for i in range(4) if ms[i] == m).items():
                    term //= factorial(y)
                multinom *= term
            total += wprod * multinom * f
    stats.profile_calls += cache.calls
    return total
