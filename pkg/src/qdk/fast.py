"""Quartet distance through shared stars counted per pair of clusters.

``qd = C(n,4) - shared butterflies - shared stars``. Shared stars (quartets
unresolved in both trees) are split by where they are first seen in the two
top trees:

* type I: the clusters ``R1``, ``R2`` in which the two centres stop being
  boundary nodes share a leaf of the star. Counted at ``(R1, R2)`` as the
  4-matchings of a bipartite multigraph over the branches at the two centres.
* type II: the rest. Then ``R1`` and ``R2`` hold complementary leaf pairs of
  the star, and the star is counted at the first clusters holding three of
  its leaves, by a product of two independent leaf counts.

Everything outside the common leaves of a pair is read from a 2-D range
counter over (pre-order in T1, pre-order in T2).
"""

from __future__ import annotations

import itertools
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from math import comb

from .cycles import count_c4_multigraph, count_c4_weighted
from .decomp import (
    A,
    B,
    MarkCountStructure,
    RangeCounter2D,
    TopTree,
    build_top_tree,
    relevant_pairs,
)
from .graph import Multigraph
from .shapes import count_2matchings, count_4matchings
from .trees import RootedTree, Topology, UnrootedTree, quartet_tallies, quartet_topology

__all__ = [
    "StarInstanceGraph",
    "StarContext",
    "count_stars_at",
    "shared_stars_by_centres",
    "build_M",
    "build_M_prime",
    "count_missing_stars",
    "count_stars_type1",
    "count_stars_type2",
    "count_shared_butterflies",
    "quartet_distance",
    "brute_star_buckets",
]

C4_METHODS = ("weighted", "multigraph")


def _c4(g: Multigraph, c4_method: str) -> int:
    if c4_method == "weighted":
        return count_c4_weighted(g)
    if c4_method == "multigraph":
        return count_c4_multigraph(g)
    raise ValueError(f"unknown c4 method {c4_method!r}")


def _j(g: Multigraph, c4_method: str) -> int:
    if len(g.edges) < 4:
        return 0
    return count_4matchings(g, _c4(g, c4_method))


# --- slow reference -----------------------------------------------------------------------


def _rooted(t) -> RootedTree:
    return t if isinstance(t, RootedTree) else RootedTree(t)


def _branch(rt: RootedTree, c: int, x: int):
    """Neighbour of ``c`` on the path to ``x`` (``x != c``)."""
    if rt.in_subtree(x, c) and x != c:
        return rt.level_ancestor(x, rt.depth[c] + 1)
    return rt.parent[c]


def count_stars_at(c1: int, c2: int, T1, T2) -> int:
    """Shared stars centred at ``c1`` in T1 and ``c2`` in T2.

    The 4-matchings of the branch-by-branch multigraph whose multiplicities
    are common leaf counts.
    """
    r1, r2 = _rooted(T1), _rooted(T2)
    if len(r1.tree.adj[c1]) < 4 or len(r2.tree.adj[c2]) < 4:
        return 0
    left = {b: i for i, b in enumerate(r1.tree.adj[c1])}
    right = {b: len(left) + i for i, b in enumerate(r2.tree.adj[c2])}
    acc: Counter = Counter()
    for label, x1 in r1.node_of.items():
        x2 = r2.node_of[label]
        acc[(left[_branch(r1, c1, x1)], right[_branch(r2, c2, x2)])] += 1
    g = Multigraph(len(left) + len(right), [(u, v, k) for (u, v), k in acc.items()], n_left=len(left))
    return count_4matchings(g, count_c4_multigraph(g))


def shared_stars_by_centres(t1: UnrootedTree, t2: UnrootedTree) -> int:
    """``Σ count_stars_at`` over all pairs of nodes of degree at least 4."""
    r1, r2 = RootedTree(t1), RootedTree(t2)
    big1 = [x for x in range(r1.N) if len(t1.adj[x]) >= 4]
    big2 = [x for x in range(r2.N) if len(t2.adj[x]) >= 4]
    return sum(count_stars_at(c1, c2, r1, r2) for c1 in big1 for c2 in big2)


# --- context --------------------------------------------------------------------------------


def _minus(lo, hi, holes):
    out = []
    for a, b in sorted(holes):
        if a > lo:
            out.append((lo, a))
        lo = max(lo, b)
    if hi > lo:
        out.append((lo, hi))
    return out


class _Side:
    """One tree with its top tree and interval helpers."""

    def __init__(self, rt: RootedTree):
        self.rt = rt
        self.tt: TopTree = build_top_tree(rt)
        self.deg = [len(rt.tree.adj[x]) for x in range(rt.N)]

    def sub(self, v):
        p = self.rt.pre[v]
        return [(p, p + self.rt.size[v])]

    def comp(self, v):
        p = self.rt.pre[v]
        return _minus(0, self.rt.N, [(p, p + self.rt.size[v])])

    def above(self, c):
        return self.tt.above_intervals(c)

    def below(self, c):
        a, b = self.tt.below_interval(c)
        return [(a, b)] if b > a else []

    def child_toward(self, c, x):
        return self.rt.level_ancestor(x, self.rt.depth[c] + 1)


class StarContext:
    """Everything the star counters share for one pair of trees."""

    def __init__(self, t1: UnrootedTree, t2: UnrootedTree):
        self.s1 = _Side(RootedTree(t1))
        self.s2 = _Side(RootedTree(t2))
        r1, r2 = self.s1.rt, self.s2.rt
        self.labels = sorted(r1.node_of)
        self.rc = RangeCounter2D(
            [r1.pre[r1.node_of[l]] for l in self.labels],
            [r2.pre[r2.node_of[l]] for l in self.labels],
        )
        self.stats: dict = defaultdict(int)
        self._sums1: dict = {}
        self._sums2: dict = {}

    def q(self, reg1, reg2) -> int:
        self.stats["range_queries"] += 1
        return self.rc.count_regions(reg1, reg2)

    def q_t(self, reg2, reg1) -> int:
        return self.q(reg1, reg2)

    def node1(self, label):
        return self.s1.rt.node_of[label]

    def node2(self, label):
        return self.s2.rt.node_of[label]

    def is_type1_cluster(self, side: _Side, c: int) -> bool:
        return side.tt.kind[c] in ("a", "b") and side.deg[side.tt.merged[c]] >= 4

    def is_type2_cluster(self, side: _Side, c: int) -> bool:
        tt = side.tt
        return any(tt.spine_deg4[k] for k in tt.kids[c])

    def pairs(self):
        t1, t2 = self.s1.tt, self.s2.tt
        keep1 = [self.is_type1_cluster(self.s1, c) or self.is_type2_cluster(self.s1, c) for c in range(len(t1))]
        keep2 = [self.is_type1_cluster(self.s2, c) or self.is_type2_cluster(self.s2, c) for c in range(len(t2))]
        return relevant_pairs(t1, t2, keep1, keep2)

    # Σ α_i β_i over the children of a centre, with leaves colored by the other cluster

    def prepare_child_sums(self, type1_pairs):
        q1 = defaultdict(list)  # C2 -> [c1]
        q2 = defaultdict(list)  # C1 -> [c2]
        for C1, C2 in type1_pairs:
            q1[C2].append(self.s1.tt.merged[C1])
            q2[C1].append(self.s2.tt.merged[C2])
        self._sums1 = _offline_child_sums(self.s2.tt, self.s1.rt, self.s2.rt, q1, self.stats)
        self._sums2 = _offline_child_sums(self.s1.tt, self.s2.rt, self.s1.rt, q2, self.stats)

    def child_sum1(self, C1, C2):
        """``Σ_children(c1) |child ∩ A(C2)|·|child ∩ B(C2)|``."""
        key = (C2, self.s1.tt.merged[C1])
        if key not in self._sums1:
            self._sums1[key] = _direct_child_sum(self, self.s1, self.s2, C2, self.s1.tt.merged[C1], first=True)
        return self._sums1[key]

    def child_sum2(self, C1, C2):
        key = (C1, self.s2.tt.merged[C2])
        if key not in self._sums2:
            self._sums2[key] = _direct_child_sum(self, self.s2, self.s1, C1, self.s2.tt.merged[C2], first=False)
        return self._sums2[key]


def _direct_child_sum(ctx, inner: _Side, outer: _Side, C, c, first):
    q = ctx.q if first else ctx.q_t
    above, below = outer.above(C), outer.below(C)
    total = 0
    for ch in inner.rt.children[c]:
        total += q(inner.sub(ch), above) * q(inner.sub(ch), below)
    return total


def _offline_child_sums(tt_outer: TopTree, rt_inner: RootedTree, rt_outer: RootedTree, queries, stats):
    """DFS over the outer top tree keeping inner leaves colored A/B by the current cluster."""
    if not queries:
        return {}
    needed = [False] * len(tt_outer)
    for C in queries:
        for a in tt_outer.ancestors(C):
            if needed[a]:
                break
            needed[a] = True
    mc = MarkCountStructure(rt_inner)
    to_inner = {x: rt_inner.node_of[rt_outer.label[x]] for x in rt_outer.label}
    out = {}

    def paint(leaves, color, log):
        for x in leaves:
            y = to_inner[x]
            log.append((y, mc.color[y]))
            mc.mark(y, color)

    def visit(C):
        for c in queries.get(C, ()):
            out[(C, c)] = mc.count_children(c)
        kids = tt_outer.kids[C]
        if not kids:
            return
        p, q = kids
        kind = tt_outer.kind[C]
        for K, other in ((p, q), (q, p)):
            if not needed[K]:
                continue
            log: list = []
            if kind in ("a", "b"):
                paint(tt_outer.leaves(other), A if K == q else B, log)
            else:
                paint(tt_outer.leaves(other), A, log)
                if tt_outer.bot[C] >= 0 and tt_outer.bot[K] < 0:
                    paint(tt_outer.leaves_below(C), A, log)
            visit(K)
            for y, col in reversed(log):
                mc.mark(y, col)

    visit(tt_outer.root)
    stats["mark_updates"] += mc.updates
    return out


# --- M and M′ --------------------------------------------------------------------------------

OUTSIDE, EXPLICIT, IMPLICIT = "outside", "explicit", "implicit"


@dataclass
class StarInstanceGraph:
    """Bipartite branch multigraph for a pair of centres.

    ``left``/``right`` list the branch keys per side; ``kinds`` mirror them.
    Keys: ``("P",)`` parent side, ``("Z",)`` the branch holding the bottom
    boundary, ``("I",)`` all implicit branches merged, ``child`` node ids.
    """

    graph: Multigraph
    left: list
    right: list
    left_kinds: list
    right_kinds: list
    index: dict = field(default_factory=dict)

    def node(self, side: int, key) -> int | None:
        return self.index.get((side, key))


def _make_instance(left, right, lk, rk, mults) -> StarInstanceGraph:
    index = {(0, k): i for i, k in enumerate(left)}
    index.update({(1, k): len(left) + i for i, k in enumerate(right)})
    edges = [(index[(0, a)], index[(1, b)], m) for (a, b), m in mults.items() if m > 0]
    g = Multigraph(len(left) + len(right), edges, n_left=len(left))
    return StarInstanceGraph(g, left, right, lk, rk, index)


@dataclass
class _Centre:
    c: int
    z: int  # child toward the bottom boundary, -1 if none


def _centre(side: _Side, C: int) -> _Centre:
    tt = side.tt
    c = tt.merged[C]
    b = tt.bot[C]
    return _Centre(c, side.child_toward(c, b) if b >= 0 else -1)


def _key(side: _Side, cen: _Centre, x: int):
    rt = side.rt
    if not rt.in_subtree(x, cen.c):
        return ("P",)
    ch = side.child_toward(cen.c, x)
    return ("Z",) if ch == cen.z else ch


def build_M(ctx: StarContext, C1: int, C2: int, common) -> StarInstanceGraph:
    """Branch multigraph restricted to the common leaves of ``(C1, C2)``."""
    cen1, cen2 = _centre(ctx.s1, C1), _centre(ctx.s2, C2)
    mults: Counter = Counter()
    for label in common:
        mults[(_key(ctx.s1, cen1, ctx.node1(label)), _key(ctx.s2, cen2, ctx.node2(label)))] += 1
    left = sorted({a for a, _ in mults}, key=repr)
    right = sorted({b for _, b in mults}, key=repr)
    kind = lambda k: OUTSIDE if isinstance(k, tuple) else EXPLICIT  # noqa: E731
    return _make_instance(left, right, [kind(k) for k in left], [kind(k) for k in right], mults)


class _PairData:
    """Regions and counts for one type-I pair, shared by M′ and the missing stars."""

    def __init__(self, ctx: StarContext, C1, C2, common):
        s1, s2 = ctx.s1, ctx.s2
        self.cen1, self.cen2 = _centre(s1, C1), _centre(s2, C2)
        self.C1, self.C2 = C1, C2
        inner: Counter = Counter()
        ex1, ex2 = set(), set()
        for label in common:
            k1 = _key(s1, self.cen1, ctx.node1(label))
            k2 = _key(s2, self.cen2, ctx.node2(label))
            if not isinstance(k1, tuple):
                ex1.add(k1)
            if not isinstance(k2, tuple):
                ex2.add(k2)
            if not isinstance(k1, tuple) and not isinstance(k2, tuple):
                inner[(k1, k2)] += 1
        self.ex1 = sorted(ex1)
        self.ex2 = sorted(ex2)
        self.inner = inner

    def region1(self, ctx, key):
        s, cen = ctx.s1, self.cen1
        if key == ("P",):
            return s.comp(cen.c)
        if key == ("Z",):
            return s.sub(cen.z)
        return s.sub(key)

    def region2(self, ctx, key):
        s, cen = ctx.s2, self.cen2
        if key == ("P",):
            return s.comp(cen.c)
        if key == ("Z",):
            return s.sub(cen.z)
        return s.sub(key)


def build_M_prime(ctx: StarContext, C1: int, C2: int, common, data: _PairData | None = None) -> StarInstanceGraph:
    """``M`` plus outside-part nodes and one merged implicit node per side."""
    d = data or _PairData(ctx, C1, C2, common)
    spec1 = [("P",)] + ([("Z",)] if d.cen1.z >= 0 else [])
    spec2 = [("P",)] + ([("Z",)] if d.cen2.z >= 0 else [])
    left = spec1 + d.ex1 + [("I",)]
    right = spec2 + d.ex2 + [("I",)]
    mults: Counter = Counter(d.inner)
    r1 = {k: d.region1(ctx, k) for k in spec1 + d.ex1}
    r2 = {k: d.region2(ctx, k) for k in spec2 + d.ex2}
    for a in spec1:
        for b in spec2 + d.ex2:
            mults[(a, b)] = ctx.q(r1[a], r2[b])
    for a in d.ex1:
        for b in spec2:
            mults[(a, b)] = ctx.q(r1[a], r2[b])
    # merged implicit nodes only touch the other side's outside nodes
    sub1 = ctx.s1.sub(d.cen1.c)
    non_imp1 = d.ex1 + ([d.cen1.z] if d.cen1.z >= 0 else [])
    for b in spec2:
        mults[(("I",), b)] = ctx.q(sub1, r2[b]) - sum(ctx.q(ctx.s1.sub(e), r2[b]) for e in non_imp1)
    sub2 = ctx.s2.sub(d.cen2.c)
    non_imp2 = d.ex2 + ([d.cen2.z] if d.cen2.z >= 0 else [])
    for a in spec1:
        mults[(a, ("I",))] = ctx.q(r1[a], sub2) - sum(ctx.q(r1[a], ctx.s2.sub(f)) for f in non_imp2)
    kind = lambda k: IMPLICIT if k == ("I",) else OUTSIDE if isinstance(k, tuple) else EXPLICIT  # noqa: E731
    ctx.stats["m_prime_edges"] += sum(1 for m in mults.values() if m > 0)
    return _make_instance(left, right, [kind(k) for k in left], [kind(k) for k in right], mults)


def _cross_terms(ctx: StarContext, d: _PairData, mp: StarInstanceGraph):
    """Implicit-pair sums and the zero-common-leaf products for both sides.

    ``I1 = Σ_{i≠i'} α_i β_i'`` over implicit branches of ``c1`` (α: leaves above
    C2, β: below C2); ``P1`` is the same sum over every child branch of ``c1``
    except the bottom one. ``I2``, ``P2`` mirror it.
    """
    s1, s2 = ctx.s1, ctx.s2
    g = mp.graph
    A2, B2 = s2.above(d.C2), s2.below(d.C2)
    A1, B1 = s1.above(d.C1), s1.below(d.C1)

    def m(u, v):
        return 0 if u is None or v is None else g.mult(u, v)

    # side 1
    sab1 = ctx.child_sum1(d.C1, d.C2)
    tot_a1 = ctx.q(s1.sub(d.cen1.c), A2)
    tot_b1 = ctx.q(s1.sub(d.cen1.c), B2)
    za = zb = 0
    if d.cen1.z >= 0:
        za, zb = ctx.q(s1.sub(d.cen1.z), A2), ctx.q(s1.sub(d.cen1.z), B2)
    P_left = (tot_a1 - za) * (tot_b1 - zb) - (sab1 - za * zb)
    imp_ab = sab1 - za * zb
    for e in d.ex1:
        imp_ab -= ctx.q(s1.sub(e), A2) * ctx.q(s1.sub(e), B2)
    i1 = mp.node(0, ("I",))
    I_left = m(i1, mp.node(1, ("P",))) * m(i1, mp.node(1, ("Z",))) - imp_ab
    # side 2
    sab2 = ctx.child_sum2(d.C1, d.C2)
    tot_a2 = ctx.q(A1, s2.sub(d.cen2.c))
    tot_b2 = ctx.q(B1, s2.sub(d.cen2.c))
    za = zb = 0
    if d.cen2.z >= 0:
        za, zb = ctx.q(A1, s2.sub(d.cen2.z)), ctx.q(B1, s2.sub(d.cen2.z))
    P_right = (tot_a2 - za) * (tot_b2 - zb) - (sab2 - za * zb)
    imp_ab = sab2 - za * zb
    for f in d.ex2:
        imp_ab -= ctx.q(A1, s2.sub(f)) * ctx.q(B1, s2.sub(f))
    i2 = mp.node(1, ("I",))
    I_right = m(mp.node(0, ("P",)), i2) * m(mp.node(0, ("Z",)), i2) - imp_ab
    return I_left, I_right, P_left, P_right


def _two_matchings_without(mp: StarInstanceGraph, keys) -> int:
    deleted = [i for i in (mp.node(s, k) for s, k in keys) if i is not None]
    return count_2matchings(mp.graph, deleted)


def count_missing_stars(ctx: StarContext, mp: StarInstanceGraph, data: _PairData, terms=None) -> int:
    """Stars using two distinct implicit branches on one side.

    ``M′`` merges those branches into one node, so a star reaching the two
    outside nodes of the other side through two of them is not a matching
    there.
    """
    I1, I2, _, _ = terms or _cross_terms(ctx, data, mp)
    two1 = _two_matchings_without(mp, [(0, ("I",)), (1, ("P",)), (1, ("Z",))])
    two2 = _two_matchings_without(mp, [(1, ("I",)), (0, ("P",)), (0, ("Z",))])
    return I1 * two1 + I2 * two2 + I1 * I2


def _type1_pair(ctx: StarContext, C1, C2, common, c4_method, buckets=None) -> int:
    d = _PairData(ctx, C1, C2, common)
    mp = build_M_prime(ctx, C1, C2, common, d)
    terms = _cross_terms(ctx, d, mp)
    I1, I2, PL, PR = terms
    j = _j(mp.graph, c4_method)
    missing = count_missing_stars(ctx, mp, d, terms)
    # stars with no common leaf are type II; those with <= 1 implicit branch per side sit in j
    zero_j = (PL - I1) * (PR - I2)
    zero_missing = PL * PR - zero_j
    ctx.stats["c4_calls"] += 1
    if buckets is not None:
        key = ("I", C1, C2)
        buckets[key + ("matching",)] += j - zero_j
        buckets[key + ("missing",)] += missing - zero_missing
    return j + missing - PL * PR


def _type1_pairs(ctx: StarContext, pairs):
    out = []
    for (C1, C2), common in pairs.items():
        if ctx.is_type1_cluster(ctx.s1, C1) and ctx.is_type1_cluster(ctx.s2, C2):
            out.append((C1, C2, common))
    return out


def count_stars_type1(ctx: StarContext, pairs=None, c4_method: str = "weighted", buckets=None, offline=True) -> int:
    """Shared stars whose first clusters share one of the star's leaves."""
    if pairs is None:
        pairs = ctx.pairs()
    todo = _type1_pairs(ctx, pairs)
    if offline:
        ctx.prepare_child_sums([(C1, C2) for C1, C2, _ in todo])
    total = 0
    for C1, C2, common in todo:
        ctx.stats["type1_pairs"] += 1
        ctx.stats["sum_common_type1"] += len(common)
        total += _type1_pair(ctx, C1, C2, common, c4_method, buckets)
    return total


# --- type II ----------------------------------------------------------------------------------


def _beyond(side: _Side, C: int, K: int):
    """Leaves past the boundary of ``K`` that ``C`` does not merge at."""
    tt = side.tt
    if tt.kind[C] in ("a", "b") and K == tt.kids[C][0]:
        return side.above(K)
    return side.below(K)


def _spine_count(ctx: StarContext, side: _Side, K: int, x: int, other_region, first: bool) -> int:
    """Leaves hanging off the spine of ``K`` at the same node as ``x``, in another branch, inside ``other_region``."""
    rt, tt = side.rt, side.tt
    u, cx, cb = rt.extended_lca(x, tt.bot[K])
    if u == tt.top[K] or cx is None or cb is None:
        return 0
    p = rt.pre[u]
    holes = [(rt.pre[cx], rt.pre[cx] + rt.size[cx]), (rt.pre[cb], rt.pre[cb] + rt.size[cb])]
    reg = _minus(p, p + rt.size[u], holes)
    return ctx.q(reg, other_region) if first else ctx.q(other_region, reg)


def _type2_pair(ctx: StarContext, C1, C2, common, buckets=None) -> int:
    s1, s2 = ctx.s1, ctx.s2
    t1, t2 = s1.tt, s2.tt
    k1s = [K for K in t1.kids[C1] if t1.spine_deg4[K]]
    k2s = [K for K in t2.kids[C2] if t2.spine_deg4[K]]
    if not k1s or not k2s:
        return 0
    side1 = {}
    side2 = {}
    for label in common:
        x1, x2 = ctx.node1(label), ctx.node2(label)
        side1[label] = t1.kids[C1][0] if t1.contains_leaf(t1.kids[C1][0], x1) else t1.kids[C1][1]
        side2[label] = t2.kids[C2][0] if t2.contains_leaf(t2.kids[C2][0], x2) else t2.kids[C2][1]
    total = 0
    for K1 in k1s:
        beyond1 = _beyond(s1, C1, K1)
        for K2 in k2s:
            beyond2 = _beyond(s2, C2, K2)
            s_yz = s_xt = 0
            for label in common:
                in_k1 = side1[label] == K1
                in_k2 = side2[label] == K2
                if in_k1 and not in_k2:
                    s_yz += _spine_count(ctx, s1, K1, ctx.node1(label), beyond2, True)
                elif in_k2 and not in_k1:
                    s_xt += _spine_count(ctx, s2, K2, ctx.node2(label), beyond1, False)
            if s_yz and s_xt:
                total += s_yz * s_xt
                if buckets is not None:
                    buckets[("II", C1, C2, K1, K2)] += s_yz * s_xt
    return total


def count_stars_type2(ctx: StarContext, pairs=None, buckets=None) -> int:
    """Shared stars whose first clusters hold complementary leaf pairs."""
    if pairs is None:
        pairs = ctx.pairs()
    total = 0
    for (C1, C2), common in pairs.items():
        if ctx.is_type2_cluster(ctx.s1, C1) and ctx.is_type2_cluster(ctx.s2, C2):
            ctx.stats["type2_pairs"] += 1
            ctx.stats["sum_common_type2"] += len(common)
            total += _type2_pair(ctx, C1, C2, common, buckets)
    return total


# --- assembly --------------------------------------------------------------------------------


def count_shared_butterflies(t1: UnrootedTree, t2: UnrootedTree) -> int:
    """Quartets resolved the same way in both trees (full enumeration)."""
    return quartet_tallies(t1, t2)[1]


def _prepare(t1: UnrootedTree, t2: UnrootedTree):
    if set(t1.node_of) != set(t2.node_of):
        raise ValueError("trees have different leaf label sets")
    return t1.normalized(), t2.normalized()


def shared_stars_fast(t1: UnrootedTree, t2: UnrootedTree, c4_method="weighted", stats=None, buckets=None) -> int:
    """Type I + type II shared stars for two normalized trees."""
    t0 = time.perf_counter()
    ctx = StarContext(t1, t2)
    pairs = ctx.pairs()
    ctx.stats["relevant_pairs"] = len(pairs)
    ctx.stats["sum_common"] = sum(len(v) for v in pairs.values())
    total = count_stars_type1(ctx, pairs, c4_method, buckets) + count_stars_type2(ctx, pairs, buckets)
    if stats is not None:
        stats.update(ctx.stats)
        stats["star_seconds"] = time.perf_counter() - t0
        stats["top_tree_height"] = [ctx.s1.tt.stats()["height"], ctx.s2.tt.stats()["height"]]
    return total


def quartet_distance(
    t1: UnrootedTree,
    t2: UnrootedTree,
    method: str = "fast",
    c4_method: str = "weighted",
    stats: dict | None = None,
) -> int:
    """Number of quartets resolved differently (or resolved in one tree only)."""
    if method not in ("fast", "brute"):
        raise ValueError(f"unknown method {method!r}")
    if c4_method not in C4_METHODS:
        raise ValueError(f"unknown c4 method {c4_method!r}")
    t1, t2 = _prepare(t1, t2)
    n = t1.n
    if n < 4:
        return 0
    if method == "brute":
        return quartet_tallies(t1, t2)[0]
    t0 = time.perf_counter()
    butterflies = count_shared_butterflies(t1, t2)
    t_b = time.perf_counter() - t0
    stars = shared_stars_fast(t1, t2, c4_method, stats)
    if stats is not None:
        stats["butterfly_seconds"] = t_b
        stats["shared_butterflies"] = butterflies
        stats["shared_stars"] = stars
    return comb(n, 4) - butterflies - stars


# --- brute classifier --------------------------------------------------------------------------


def _star_centre(rt: RootedTree, nodes) -> int:
    best = None
    for a, b in itertools.combinations(nodes, 2):
        w = rt.lca(a, b)
        if best is None or rt.depth[w] > rt.depth[best]:
            best = w
    return best


def brute_star_buckets(t1: UnrootedTree, t2: UnrootedTree) -> Counter:
    """Assign every shared star to the bucket the fast path counts it in.

    Type I stars go to ``("I", R1, R2, "matching" | "missing")``, the latter
    when one side uses two implicit branches; type II stars go to
    ``("II", C1, C2, K1, K2)``. Cluster ids refer to the top trees built by
    :class:`StarContext` on the same (normalized) trees.
    """
    ctx = StarContext(t1, t2)
    s1, s2 = ctx.s1, ctx.s2
    r1, r2 = s1.rt, s2.rt
    out: Counter = Counter()
    common_cache: dict = {}
    for quad in itertools.combinations(ctx.labels, 4):
        if quartet_topology(r1, quad) is not Topology.STAR or quartet_topology(r2, quad) is not Topology.STAR:
            continue
        n1 = [r1.node_of[l] for l in quad]
        n2 = [r2.node_of[l] for l in quad]
        c1, c2 = _star_centre(r1, n1), _star_centre(r2, n2)
        R1, R2 = s1.tt.rep[c1], s2.tt.rep[c2]
        both = [l for l, x, y in zip(quad, n1, n2) if s1.tt.contains_leaf(R1, x) and s2.tt.contains_leaf(R2, y)]
        if both:
            key = (R1, R2)
            if key not in common_cache:
                common_cache[key] = {
                    l for l in ctx.labels
                    if s1.tt.contains_leaf(R1, r1.node_of[l]) and s2.tt.contains_leaf(R2, r2.node_of[l])
                }
            common = common_cache[key]
            cen1, cen2 = _centre(s1, R1), _centre(s2, R2)
            ex1 = {_key(s1, cen1, r1.node_of[l]) for l in common}
            ex2 = {_key(s2, cen2, r2.node_of[l]) for l in common}
            k1 = [_key(s1, cen1, x) for x in n1]
            k2 = [_key(s2, cen2, y) for y in n2]
            imp1 = sum(1 for k in k1 if not isinstance(k, tuple) and k not in ex1)
            imp2 = sum(1 for k in k2 if not isinstance(k, tuple) and k not in ex2)
            out[("I", R1, R2, "missing" if imp1 >= 2 or imp2 >= 2 else "matching")] += 1
            continue

        def first3(side, R, nodes):
            tt = side.tt
            prev = R
            C = tt.parent[R]
            while sum(tt.contains_leaf(C, x) for x in nodes) < 3:
                prev, C = C, tt.parent[C]
            return C, prev

        C1, K1 = first3(s1, R1, n1)
        C2, K2 = first3(s2, R2, n2)
        out[("II", C1, C2, K1, K2)] += 1
    return out


def fast_star_buckets(t1: UnrootedTree, t2: UnrootedTree, c4_method="weighted") -> Counter:
    """Per-bucket counts from the fast path (zero buckets dropped)."""
    ctx = StarContext(t1, t2)
    pairs = ctx.pairs()
    buckets: Counter = Counter()
    count_stars_type1(ctx, pairs, c4_method, buckets)
    count_stars_type2(ctx, pairs, buckets)
    return Counter({k: v for k, v in buckets.items() if v})
