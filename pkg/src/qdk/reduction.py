"""From 4-cycle counting to quartet distance and back.

A bipartite simple graph becomes two depth-2 trees whose leaves are its
edges: in ``T_i`` the edges hang from their ``V_i`` endpoint. Quartets that
agree in both trees are exactly the shapes A, A*, C, C*, J and G, and
``#J = t_J + C4`` turns the distance back into the cycle count.
"""

from __future__ import annotations

from math import comb
from typing import Callable

from .graph import GraphFormatError, Multigraph, exact_div
from .shapes import count_easy_shapes, count_t_J
from .trees import UnrootedTree

__all__ = ["bipartize", "graph_to_trees", "c4_from_qd", "extract_c4"]


def bipartize(g: Multigraph) -> Multigraph:
    """Double cover: ``v -> (v, v + n)``; every 4-cycle of ``g`` becomes two."""
    if not g.is_simple:
        raise GraphFormatError("bipartize needs a simple graph")
    n = g.node_count
    edges = []
    for u, v, _ in g.edges:
        edges.append((u, v + n))
        edges.append((v, u + n))
    return Multigraph(2 * n, edges, n_left=n)


def _side_tree(g: Multigraph, right: bool) -> UnrootedTree:
    groups: dict[int, list[int]] = {}
    for label, (u, v, _) in enumerate(g.oriented_edges(), start=1):
        groups.setdefault(v if right else u, []).append(label)
    # node 0 is the root, then one node per non-isolated endpoint, then the leaves
    edges = []
    labels = {}
    nxt = 1 + len(groups)
    for i, key in enumerate(groups, start=1):
        edges.append((0, i))
        for label in groups[key]:
            edges.append((i, nxt))
            labels[nxt] = label
            nxt += 1
    return UnrootedTree(nxt, edges, labels)


def graph_to_trees(g: Multigraph, stats: dict | None = None):
    """``(T1, T2, leaf_map)`` with ``leaf_map[label] = (u, v)`` (``u ∈ V1``).

    Labels ``1..|E|`` follow the edge order of ``g``. The trees are returned
    as built: every leaf sits at depth 2 below an unlabelled root, so nodes
    of degree 2 may occur.
    """
    if not g.is_bipartite or not g.is_simple:
        raise GraphFormatError("graph_to_trees needs a bipartite simple graph")
    if len(g.edges) < 4:
        raise GraphFormatError("need at least 4 edges")
    t1 = _side_tree(g, right=False)
    t2 = _side_tree(g, right=True)
    leaf_map = {label: (u, v) for label, (u, v, _) in enumerate(g.oriented_edges(), start=1)}
    if stats is not None:
        stats["work"] = stats.get("work", 0) + t1.node_count + t2.node_count + len(g.edges)
    return t1, t2, leaf_map


def c4_from_qd(g: Multigraph, qd: int) -> int:
    """Number of 4-cycles of ``g`` from the quartet distance of its two trees."""
    if not g.is_bipartite or not g.is_simple:
        raise GraphFormatError("c4_from_qd needs a bipartite simple graph")
    led = count_easy_shapes(g)
    c = led.counts
    m = len(g.edges)
    agree = comb(m, 4) - qd
    c4 = agree - c["A"] - c["A*"] - c["C"] - c["C*"] - c["G"] - count_t_J(g)
    if c4 < 0:
        raise ArithmeticError(f"negative 4-cycle count {c4}; is qd correct?")
    return c4


def extract_c4(g: Multigraph, qd_fn: Callable[[UnrootedTree, UnrootedTree], int]) -> int:
    """4-cycles of a simple graph through one quartet-distance computation."""
    b = bipartize(g)
    if len(b.edges) < 4:
        return 0
    t1, t2, _ = graph_to_trees(b)
    return exact_div(c4_from_qd(b, qd_fn(t1, t2)), 2)
