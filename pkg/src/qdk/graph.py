"""Multigraph data model, the multichoose calculus and brute-force oracles.

All counts are plain Python ``int`` (arbitrary precision). A 4-cycle is an
unordered set of four distinct node pairs forming a cycle on four distinct
nodes, weighted by the product of the pair multiplicities.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from typing import Iterable, Sequence

__all__ = [
    "Multigraph",
    "GraphFormatError",
    "exact_div",
    "multichoose",
    "multichoose_table",
    "multichoose_difference",
    "multichoose_union",
    "brute_count_c4",
    "brute_shape_counts",
    "brute_count_shape",
    "brute_count_4matchings",
    "SHAPES",
    "MIRROR",
    "parse_edge_list",
    "format_edge_list",
]


class GraphFormatError(ValueError):
    """Malformed edge-list input or an invalid graph."""


def exact_div(a: int, b: int) -> int:
    q, r = divmod(a, b)
    if r:
        raise ArithmeticError(f"{a} is not divisible by {b}")
    return q


class Multigraph:
    """Undirected multigraph without self-loops.

    Parameters
    ----------
    node_count : int
        Nodes are ``0 .. node_count-1``.
    edges : iterable of (u, v) or (u, v, mult)
        Duplicate pairs are merged by summing multiplicities.
    n_left : int, optional
        If given the graph is bipartite with parts ``{0..n_left-1}`` and
        ``{n_left..node_count-1}``; every edge must cross.
    """

    __slots__ = ("node_count", "edges", "n_left", "_adj")

    def __init__(self, node_count: int, edges: Iterable = (), n_left: int | None = None):
        if node_count < 0:
            raise GraphFormatError("negative node count")
        acc: dict[tuple[int, int], int] = {}
        for e in edges:
            if len(e) == 2:
                u, v, k = e[0], e[1], 1
            else:
                u, v, k = e
            u, v, k = int(u), int(v), int(k)
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise GraphFormatError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise GraphFormatError(f"self-loop at node {u}")
            if k <= 0:
                raise GraphFormatError(f"non-positive multiplicity on ({u}, {v})")
            key = (u, v) if u < v else (v, u)
            acc[key] = acc.get(key, 0) + k
        if n_left is not None:
            if not 0 <= n_left <= node_count:
                raise GraphFormatError("bad bipartition size")
            for u, v in acc:
                if (u < n_left) == (v < n_left):
                    raise GraphFormatError(f"edge ({u}, {v}) does not cross the bipartition")
        self.node_count = node_count
        self.edges: tuple[tuple[int, int, int], ...] = tuple((u, v, k) for (u, v), k in acc.items())
        self.n_left = n_left
        self._adj = None

    @property
    def is_simple(self) -> bool:
        return all(k == 1 for _, _, k in self.edges)

    @property
    def is_bipartite(self) -> bool:
        return self.n_left is not None

    @property
    def max_mult(self) -> int:
        return max((k for _, _, k in self.edges), default=0)

    @property
    def total_mult(self) -> int:
        return sum(k for _, _, k in self.edges)

    def adjacency(self) -> list[dict[int, int]]:
        """Per node: neighbor -> multiplicity."""
        if self._adj is None:
            adj: list[dict[int, int]] = [dict() for _ in range(self.node_count)]
            for u, v, k in self.edges:
                adj[u][v] = k
                adj[v][u] = k
            self._adj = adj
        return self._adj

    def mult(self, u: int, v: int) -> int:
        return self.adjacency()[u].get(v, 0)

    def side(self, u: int) -> int:
        return 0 if u < self.n_left else 1

    def oriented_edges(self):
        """Bipartite edges as (left, right, mult)."""
        if self.n_left is None:
            raise GraphFormatError("graph is not bipartite")
        for u, v, k in self.edges:
            yield (u, v, k) if u < self.n_left else (v, u, k)

    def mirrored(self) -> "Multigraph":
        """Swap the two parts of a bipartite graph (relabelling nodes)."""
        if self.n_left is None:
            raise GraphFormatError("graph is not bipartite")
        n, n1 = self.node_count, self.n_left
        n2 = n - n1

        def relabel(x):
            return x + n2 if x < n1 else x - n1

        return Multigraph(n, ((relabel(u), relabel(v), k) for u, v, k in self.edges), n_left=n2)

    def with_mults(self, mults: Sequence[int]) -> "Multigraph":
        return Multigraph(
            self.node_count,
            ((u, v, m) for (u, v, _), m in zip(self.edges, mults) if m > 0),
            n_left=self.n_left,
        )

    def simple_support(self) -> "Multigraph":
        return Multigraph(self.node_count, ((u, v) for u, v, _ in self.edges), n_left=self.n_left)

    def __eq__(self, other):
        return (
            isinstance(other, Multigraph)
            and self.node_count == other.node_count
            and self.n_left == other.n_left
            and sorted(self.edges) == sorted(other.edges)
        )

    def __hash__(self):
        return hash((self.node_count, self.n_left, tuple(sorted(self.edges))))

    def __repr__(self):
        bip = f", n_left={self.n_left}" if self.n_left is not None else ""
        return f"Multigraph({self.node_count}, {list(self.edges)!r}{bip})"


# --- multichoose calculus -------------------------------------------------


def multichoose(values: Iterable[int], k: int) -> int:
    """Weighted number of ways to choose ``k`` distinct edges.

    Equals the ``k``-th elementary symmetric polynomial of the multiplicities.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    return multichoose_table(values, k)[k]


def multichoose_table(values: Iterable[int], k: int) -> list[int]:
    """``[multichoose(values, j) for j in 0..k]`` in one O(|values|·k) pass."""
    e = [1] + [0] * k
    for x in values:
        for j in range(k, 0, -1):
            e[j] += e[j - 1] * x
    return e


def multichoose_difference(a_vals: Sequence[int], b_vals: Sequence[int], k: int) -> list[int]:
    """Table of the set difference ``A \\ B`` from tables of ``A`` and ``B ⊆ A``."""
    out = [0] * (k + 1)
    for j in range(k + 1):
        s = a_vals[j]
        for i in range(j):
            s -= out[i] * b_vals[j - i]
        if s < 0:
            raise ArithmeticError("inconsistent tables: B is not a subset of A")
        out[j] = s
    if out[0] != 1:
        raise ArithmeticError("inconsistent tables: zeroth entry must be 1")
    return out


def multichoose_union(a_vals: Sequence[int], b_vals: Sequence[int], k: int) -> list[int]:
    """Table of a disjoint union (convolution of the two tables)."""
    return [sum(a_vals[i] * b_vals[j - i] for i in range(j + 1)) for j in range(k + 1)]


# --- brute-force oracles --------------------------------------------------


def brute_count_c4(g: Multigraph) -> int:
    """Enumerate ordered 4-tuples of distinct nodes and divide by 8."""
    adj = g.adjacency()
    total = 0
    for a in range(g.node_count):
        for b, ab in adj[a].items():
            for c, bc in adj[b].items():
                if c == a:
                    continue
                for d, cd in adj[c].items():
                    if d == a or d == b:
                        continue
                    da = adj[d].get(a)
                    if da:
                        total += ab * bc * cd * da
    return exact_div(total, 8)


SHAPES = ("A", "A*", "B", "B*", "C", "C*", "E", "E*", "F", "F*", "I", "I*", "D", "G", "H", "J")
MIRROR = {s: (s[0] if s.endswith("*") else s + "*") if s[0] in "ABCEFI" else s for s in SHAPES}

_BY_REPR = {
    ((4,), (1, 1, 1, 1)): "A",
    ((3, 1), (2, 1, 1)): "B",
    ((3, 1), (1, 1, 1, 1)): "C",
    ((2, 2), (2, 1, 1)): "E",
    ((2, 2), (1, 1, 1, 1)): "F",
    ((2, 1, 1), (1, 1, 1, 1)): "I",
    ((2, 2), (2, 2)): "D",
    ((1, 1, 1, 1), (1, 1, 1, 1)): "J",
}
for (_l, _r), _s in list(_BY_REPR.items()):
    if _l != _r:
        _BY_REPR[(_r, _l)] = MIRROR[_s]


def classify_shape(quad: Sequence[tuple[int, int]]) -> str:
    """Shape of four distinct (left, right) pairs."""
    ldeg: dict[int, int] = defaultdict(int)
    rdeg: dict[int, int] = defaultdict(int)
    for u, v in quad:
        ldeg[u] += 1
        rdeg[v] += 1
    key = (tuple(sorted(ldeg.values(), reverse=True)), tuple(sorted(rdeg.values(), reverse=True)))
    if key == ((2, 1, 1), (2, 1, 1)):
        u2 = next(u for u, d in ldeg.items() if d == 2)
        v2 = next(v for v, d in rdeg.items() if d == 2)
        # the two degree-2 nodes are adjacent only in the path-plus-edge shape
        return "H" if (u2, v2) in quad else "G"
    return _BY_REPR[key]


def brute_shape_counts(g: Multigraph) -> dict[str, int]:
    """Weighted count of every 4-edge shape by enumerating edge 4-subsets."""
    if not g.is_bipartite:
        raise GraphFormatError("shape counting needs a bipartite graph")
    counts = dict.fromkeys(SHAPES, 0)
    oriented = list(g.oriented_edges())
    for quad in itertools.combinations(oriented, 4):
        s = classify_shape([(u, v) for u, v, _ in quad])
        w = 1
        for _, _, k in quad:
            w *= k
        counts[s] += w
    return counts


def brute_count_shape(g: Multigraph, shape: str) -> int:
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}")
    return brute_shape_counts(g)[shape]


def brute_count_4matchings(g: Multigraph) -> int:
    """Weighted number of 4 pairwise node-disjoint edges."""
    if not g.is_bipartite:
        raise GraphFormatError("4-matching counting needs a bipartite graph")
    total = 0
    edges = g.edges
    for quad in itertools.combinations(edges, 4):
        nodes = {x for u, v, _ in quad for x in (u, v)}
        if len(nodes) == 8:
            total += quad[0][2] * quad[1][2] * quad[2][2] * quad[3][2]
    return total


# --- edge-list text format --------------------------------------------------


def parse_edge_list(text: str) -> Multigraph:
    """Parse ``nodes <N> [bipartite <N1>]`` followed by ``u v [mult]`` lines (1-indexed)."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty input")
    head = lines[0].split()
    try:
        if head[0] != "nodes" or len(head) not in (2, 4):
            raise GraphFormatError(f"bad header line: {lines[0]!r}")
        n = int(head[1])
        n_left = None
        if len(head) == 4:
            if head[2] != "bipartite":
                raise GraphFormatError(f"bad header line: {lines[0]!r}")
            n_left = int(head[3])
        edges = []
        for lineno, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(f"line {lineno}: expected 'u v [mult]'")
            u, v = int(parts[0]) - 1, int(parts[1]) - 1
            k = int(parts[2]) if len(parts) == 3 else 1
            edges.append((u, v, k))
    except ValueError as exc:
        if isinstance(exc, GraphFormatError):
            raise
        raise GraphFormatError(str(exc)) from exc
    return Multigraph(n, edges, n_left=n_left)


def format_edge_list(g: Multigraph) -> str:
    head = f"nodes {g.node_count}"
    if g.n_left is not None:
        head += f" bipartite {g.n_left}"
    body = [f"{u + 1} {v + 1}" + (f" {k}" if k != 1 else "") for u, v, k in g.edges]
    return "\n".join([head, *body]) + "\n"
