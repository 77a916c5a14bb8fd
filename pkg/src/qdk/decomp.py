"""Top trees, relevant cluster pairs, 2-D range counting and Mark/Count.

A cluster is a connected set of edges of a rooted tree with a *top*
boundary node and at most one *bottom* boundary node below it. Leaves of the
tree are never boundary nodes except the root leaf. In pre-order, a cluster
with top ``x`` covers a run of consecutive children of ``x`` and everything
under them, minus what hangs strictly below its bottom.

Merge kinds::

    a, b   vertical: (x..y) + (y..z) -> (x..z); y vanishes. b: lower part has no bottom
    c, d, e horizontal: two runs of children of x; d/e: left/right part has the bottom
"""

from __future__ import annotations

import bisect
from collections import defaultdict
from math import log2
from typing import Iterable, Sequence

from .trees import RootedTree

__all__ = [
    "TopTree",
    "build_top_tree",
    "relevant_pairs",
    "representative_cluster",
    "RangeCounter2D",
    "count_rectangle",
    "MarkCountStructure",
    "A",
    "B",
    "NONE",
]

VERTICAL = ("a", "b")
HORIZONTAL = ("c", "d", "e")


class TopTree:
    """Binary merge tree over the edge clusters of a rooted tree.

    Per cluster ``i``: ``top[i]``, ``bot[i]`` (-1 if none), ``kind[i]``,
    ``kids[i]`` (child clusters, empty for an edge), ``parent[i]``,
    ``merged[i]`` (the shared node of the two children, -1 for edges),
    ``height[i]`` and the pre-order range ``[lo[i], hi[i])`` of the children
    run of ``top[i]``.
    """

    def __init__(self, rt: RootedTree):
        self.rt = rt
        self.top: list[int] = []
        self.bot: list[int] = []
        self.kind: list[str] = []
        self.kids: list[tuple] = []
        self.parent: list[int] = []
        self.merged: list[int] = []
        self.height: list[int] = []
        self.lo: list[int] = []
        self.hi: list[int] = []
        # spine_deg4: a node strictly inside the top-bottom path has degree >= 4
        self.spine_deg4: list[bool] = []
        self.rounds = 0
        self.base_of: list[int] = [-1] * rt.N  # node y -> cluster of edge (parent(y), y)
        self.rep: dict[int, int] = {}
        self._build()

    # construction

    def _new(self, top, bot, kind, kids, merged, lo, hi, deg4):
        i = len(self.top)
        self.top.append(top)
        self.bot.append(bot)
        self.kind.append(kind)
        self.kids.append(kids)
        self.parent.append(-1)
        self.merged.append(merged)
        self.height.append(1 + max((self.height[k] for k in kids), default=-1))
        self.lo.append(lo)
        self.hi.append(hi)
        self.spine_deg4.append(deg4)
        for k in kids:
            self.parent[k] = i
        return i

    def _degree(self, x):
        rt = self.rt
        return len(rt.children[x]) + (rt.parent[x] >= 0)

    def _build(self):
        rt = self.rt
        N = rt.N
        children_runs: list[list[int]] = [[] for _ in range(N)]
        up = [-1] * N  # node -> cluster whose bottom it is
        for y in rt.order:
            p = rt.parent[y]
            if p < 0:
                continue
            bot = y if rt.children[y] else -1
            c = self._new(p, bot, "edge", (), -1, rt.pre[y], rt.pre[y] + rt.size[y], False)
            self.base_of[y] = c
            children_runs[p].append(c)
            if bot >= 0:
                up[y] = c
        active = N - 1
        internal = [x for x in rt.order if rt.children[x]]
        while active > 1:
            self.rounds += 1
            fresh: set[int] = set()
            progress = False
            # horizontal: pair neighbouring runs unless both carry a bottom
            for x in internal:
                run = children_runs[x]
                if len(run) < 2:
                    continue
                out = []
                i = 0
                while i < len(run):
                    if i + 1 < len(run) and (self.bot[run[i]] < 0 or self.bot[run[i + 1]] < 0):
                        p, q = run[i], run[i + 1]
                        if self.bot[p] >= 0:
                            kind, bot = "d", self.bot[p]
                        elif self.bot[q] >= 0:
                            kind, bot = "e", self.bot[q]
                        else:
                            kind, bot = "c", -1
                        deg4 = self.spine_deg4[p] or self.spine_deg4[q]
                        c = self._new(x, bot, kind, (p, q), x, self.lo[p], self.hi[q], deg4)
                        if bot >= 0:
                            up[bot] = c
                        fresh.add(c)
                        out.append(c)
                        active -= 1
                        progress = True
                        i += 2
                    else:
                        out.append(run[i])
                        i += 1
                children_runs[x] = out
            # vertical: top-down, y with a single child run vanishes
            for y in internal:
                if rt.parent[y] < 0 or len(children_runs[y]) != 1:
                    continue
                X, Y = up[y], children_runs[y][0]
                if X < 0 or X in fresh or Y in fresh:
                    continue
                x = self.top[X]
                bot = self.bot[Y]
                deg4 = bot >= 0 and (self.spine_deg4[X] or self.spine_deg4[Y] or self._degree(y) >= 4)
                c = self._new(x, bot, "a" if bot >= 0 else "b", (X, Y), y, self.lo[X], self.hi[X], deg4)
                self.rep[y] = c
                run = children_runs[x]
                run[run.index(X)] = c
                children_runs[y] = []
                up[y] = -1
                if bot >= 0:
                    up[bot] = c
                fresh.update((c, X, Y))
                active -= 1
                progress = True
            if not progress:
                raise RuntimeError("top tree construction made no progress")
            internal = [x for x in internal if children_runs[x]]
        self.root = len(self.top) - 1 if self.top else -1
        # leaf order by pre-order, for interval -> leaf slices
        self.leaf_pre = [rt.pre[x] for x in rt.order if rt.is_leaf[x]]
        self.leaf_nodes = [x for x in rt.order if rt.is_leaf[x]]

    # queries

    def __len__(self):
        return len(self.top)

    def has_bottom(self, c: int) -> bool:
        return self.bot[c] >= 0

    def is_vertical(self, c: int) -> bool:
        return self.kind[c] in VERTICAL

    def base_cluster_of_leaf(self, leaf: int) -> int:
        rt = self.rt
        if leaf == rt.root:
            return self.base_of[rt.children[leaf][0]]
        return self.base_of[leaf]

    def ancestors(self, c: int):
        while c >= 0:
            yield c
            c = self.parent[c]

    def clusters_of_leaf(self, leaf: int) -> list[int]:
        return list(self.ancestors(self.base_cluster_of_leaf(leaf)))

    def below_interval(self, c: int) -> tuple[int, int]:
        """Pre-order interval strictly below the bottom (empty if none)."""
        b = self.bot[c]
        if b < 0:
            return (0, 0)
        pre = self.rt.pre[b]
        return (pre + 1, pre + self.rt.size[b])

    def contains_leaf(self, c: int, leaf: int) -> bool:
        rt = self.rt
        if leaf == rt.root:
            return self.top[c] == rt.root
        p = rt.pre[leaf]
        if not self.lo[c] <= p < self.hi[c]:
            return False
        b0, b1 = self.below_interval(c)
        return not b0 <= p < b1

    def _leaf_slice(self, a: int, b: int) -> list[int]:
        i = bisect.bisect_left(self.leaf_pre, a)
        j = bisect.bisect_left(self.leaf_pre, b)
        return self.leaf_nodes[i:j]

    def leaves(self, c: int) -> list[int]:
        """Leaf nodes of a cluster."""
        b0, b1 = self.below_interval(c)
        lo, hi = self.lo[c], self.hi[c]
        if b1 > b0:
            out = self._leaf_slice(lo, b0) + self._leaf_slice(b1, hi)
        else:
            out = self._leaf_slice(lo, hi)
        if self.top[c] == self.rt.root:
            out.append(self.rt.root)
        return out

    def leaves_below(self, c: int) -> list[int]:
        b0, b1 = self.below_interval(c)
        return self._leaf_slice(b0, b1) if b1 > b0 else []

    def above_intervals(self, c: int) -> list[tuple[int, int]]:
        """Pre-order intervals of the part outside the cluster on the top side."""
        out = []
        start = 1 if self.top[c] == self.rt.root else 0
        if self.lo[c] > start:
            out.append((start, self.lo[c]))
        if self.hi[c] < self.rt.N:
            out.append((self.hi[c], self.rt.N))
        return out

    def membership_depth(self, leaf: int) -> int:
        return sum(1 for _ in self.ancestors(self.base_cluster_of_leaf(leaf)))

    def stats(self) -> dict:
        rt = self.rt
        leaves = [x for x in range(rt.N) if rt.is_leaf[x]]
        memb = [self.membership_depth(x) for x in leaves] if leaves else [0]
        return {
            "clusters": len(self),
            "height": self.height[self.root] if self.top else 0,
            "rounds": self.rounds,
            "max_membership": max(memb),
        }


def build_top_tree(rt: RootedTree) -> TopTree:
    return TopTree(rt)


def representative_cluster(tt: TopTree, u: int) -> int:
    """Smallest cluster with ``u`` strictly inside; always a vertical merge at ``u``."""
    rt = tt.rt
    if u in rt.label or not rt.children[u]:
        raise ValueError("leaves have no representative cluster")
    c = tt.rep[u]
    assert tt.kind[c] in VERTICAL and tt.merged[c] == u
    return c


def relevant_pairs(
    tt1: TopTree,
    tt2: TopTree,
    keep1=None,
    keep2=None,
) -> dict[tuple[int, int], list[int]]:
    """``{(C1, C2): common leaf labels}`` for all cluster pairs sharing a leaf.

    ``keep1``/``keep2`` optionally restrict the clusters considered (a
    boolean list per cluster).
    """
    r1, r2 = tt1.rt, tt2.rt
    if set(r1.node_of) != set(r2.node_of):
        raise ValueError("top trees over different leaf sets")
    pairs: dict[tuple[int, int], list[int]] = defaultdict(list)
    for label, x1 in r1.node_of.items():
        x2 = r2.node_of[label]
        a1 = [c for c in tt1.ancestors(tt1.base_cluster_of_leaf(x1)) if keep1 is None or keep1[c]]
        if not a1:
            continue
        a2 = [c for c in tt2.ancestors(tt2.base_cluster_of_leaf(x2)) if keep2 is None or keep2[c]]
        for c1 in a1:
            for c2 in a2:
                pairs[(c1, c2)].append(label)
    return pairs


def common_leaf_total(tt1: TopTree, tt2: TopTree) -> int:
    """``Σ |𝓛|`` over all relevant pairs without listing them."""
    total = 0
    for label, x1 in tt1.rt.node_of.items():
        total += tt1.membership_depth(x1) * tt2.membership_depth(tt2.rt.node_of[label])
    return total


# --- range counting ---------------------------------------------------------------------


class RangeCounter2D:
    """Static points; counts points in half-open rectangles in O(log² n).

    A merge-sort tree over the x-rank with a sorted y-list per node.
    """

    def __init__(self, xs: Sequence[int], ys: Sequence[int]):
        pts = sorted(zip(xs, ys))
        self.n = len(pts)
        self.xs = [p[0] for p in pts]
        size = 1
        while size < max(1, self.n):
            size *= 2
        self.size = size
        tree: list[list[int]] = [[] for _ in range(2 * size)]
        for i, (_, y) in enumerate(pts):
            tree[size + i] = [y]
        for i in range(size - 1, 0, -1):
            a, b = tree[2 * i], tree[2 * i + 1]
            tree[i] = sorted(a + b) if a and b else (a or b)
        self.tree = tree

    def count(self, x_lo: int, x_hi: int, y_lo: int, y_hi: int) -> int:
        """Points with ``x_lo <= x < x_hi`` and ``y_lo <= y < y_hi``."""
        if x_lo >= x_hi or y_lo >= y_hi:
            return 0
        l = bisect.bisect_left(self.xs, x_lo) + self.size
        r = bisect.bisect_left(self.xs, x_hi) + self.size
        tree = self.tree
        total = 0
        bl, br = bisect.bisect_left, bisect.bisect_left
        while l < r:
            if l & 1:
                t = tree[l]
                total += br(t, y_hi) - bl(t, y_lo)
                l += 1
            if r & 1:
                r -= 1
                t = tree[r]
                total += br(t, y_hi) - bl(t, y_lo)
            l >>= 1
            r >>= 1
        return total

    def count_regions(self, xr: Iterable[tuple[int, int]], yr: Iterable[tuple[int, int]]) -> int:
        """Points in the union of disjoint x-intervals times disjoint y-intervals."""
        yr = list(yr)
        return sum(self.count(a, b, c, d) for a, b in xr for c, d in yr)


def count_rectangle(rc: RangeCounter2D, x_lo: int, x_hi: int, y_lo: int, y_hi: int) -> int:
    """Points inside the closed rectangle ``[x_lo, x_hi] × [y_lo, y_hi]``."""
    return rc.count(x_lo, x_hi + 1, y_lo, y_hi + 1)


# --- Mark / Count ---------------------------------------------------------------------------

NONE, A, B = 0, 1, 2


class _Fenwick:
    __slots__ = ("n", "t")

    def __init__(self, n):
        self.n = n
        self.t = [0] * (n + 1)

    def add(self, i, d):
        i += 1
        t = self.t
        while i <= self.n:
            t[i] += d
            i += i & -i

    def prefix(self, i):
        s = 0
        t = self.t
        while i > 0:
            s += t[i]
            i -= i & -i
        return s

    def range(self, a, b):
        return self.prefix(b) - self.prefix(a)


class MarkCountStructure:
    """Leaf colors in {NONE, A, B} with ``Σ α_i β_i`` queries around a node.

    Light children keep running counters; heavy children and the parent side
    are read from Fenwick trees over pre-order positions.
    """

    def __init__(self, rt: RootedTree):
        self.rt = rt
        N = rt.N
        self.color = [NONE] * N
        self.fa = _Fenwick(N)
        self.fb = _Fenwick(N)
        self.total = [0, 0, 0]
        # per light head h: its subtree counts; per node: sums over light children
        self.ca = [0] * N
        self.cb = [0] * N
        self.sa = [0] * N
        self.sb = [0] * N
        self.sab = [0] * N
        self.updates = 0

    def mark(self, leaf: int, color: int):
        rt = self.rt
        if color not in (NONE, A, B):
            raise ValueError(f"unknown color {color!r}")
        if leaf not in rt.label:
            raise ValueError(f"node {leaf} is not a leaf")
        old = self.color[leaf]
        if old == color:
            return
        self.color[leaf] = color
        self.total[old] -= 1
        self.total[color] += 1
        da = (color == A) - (old == A)
        db = (color == B) - (old == B)
        pos = rt.pre[leaf]
        if da:
            self.fa.add(pos, da)
        if db:
            self.fb.add(pos, db)
        head, parent, heavy = rt.head, rt.parent, rt.heavy
        v = leaf
        ca, cb, sab = self.ca, self.cb, self.sab
        while True:
            h = head[v]
            p = parent[h]
            if p < 0:
                break
            # h is a light child of p
            before = ca[h] * cb[h]
            ca[h] += da
            cb[h] += db
            self.sa[p] += da
            self.sb[p] += db
            sab[p] += ca[h] * cb[h] - before
            v = p
        self.updates += 1

    def _ab(self, v):
        lo = self.rt.pre[v]
        hi = lo + self.rt.size[v]
        return self.fa.range(lo, hi), self.fb.range(lo, hi)

    def count_children(self, u: int) -> int:
        """``Σ α_i β_i`` over the child subtrees of ``u``."""
        total = self.sab[u]
        h = self.rt.heavy[u]
        if h >= 0:
            a, b = self._ab(h)
            total += a * b
        return total

    def count_alpha_beta(self, u: int) -> int:
        """``Σ α_i β_i`` over every subtree around ``u`` in the unrooted tree."""
        total = self.count_children(u)
        if self.rt.parent[u] >= 0:
            a, b = self._ab(u)
            total += (self.total[A] - a) * (self.total[B] - b)
        return total

    def alpha_beta(self, v: int) -> tuple[int, int]:
        """Colored leaf counts in subtree(v)."""
        return self._ab(v)


def log2_bound(n: int) -> float:
    return log2(max(2, n))
