import math
import random

import pytest

from qdk.decomp import (
    A,
    B,
    NONE,
    MarkCountStructure,
    RangeCounter2D,
    build_top_tree,
    common_leaf_total,
    count_rectangle,
    relevant_pairs,
    representative_cluster,
)
from qdk.trees import RootedTree, UnrootedTree, balanced_tree, broom, caterpillar, random_tree, star_tree


def edge_sets(tt):
    """Cluster -> set of child endpoints of its edges, built bottom-up."""
    out = []
    for c in range(len(tt)):
        if tt.kind[c] == "edge":
            out.append({next(y for y in range(tt.rt.N) if tt.base_of[y] == c)})
        else:
            a, b = tt.kids[c]
            out.append(out[a] | out[b])
    return out


def sample_trees():
    rng = random.Random(31)
    yield caterpillar(12)
    yield star_tree(9)
    yield broom(15, 4)
    yield balanced_tree(27, 3)
    for _ in range(25):
        n = rng.randint(4, 40)
        yield random_tree(n, rng, 2, rng.choice([2, 3, 6, n]))


class TestTopTree:
    def test_single_edge(self):
        tt = build_top_tree(RootedTree(UnrootedTree(2, [(0, 1)], {0: 1, 1: 2})))
        assert len(tt) == 1 and tt.stats()["height"] == 0 and tt.kind == ["edge"]

    def test_path(self):
        t = UnrootedTree(6, [(i, i + 1) for i in range(5)], {0: 1, 5: 2})
        tt = build_top_tree(RootedTree(t))
        assert len(tt) == 9
        assert tt.stats()["height"] <= 3
        assert all(k in ("edge", "a", "b") for k in tt.kind)
        assert sorted(tt.leaves(tt.root)) == [0, 5]

    @pytest.mark.parametrize("t", list(sample_trees()), ids=lambda t: f"n{t.n}")
    def test_cluster_invariants(self, t):
        rt = RootedTree(t)
        tt = build_top_tree(rt)
        es = edge_sets(tt)
        assert tt.parent[tt.root] == -1 and es[tt.root] == set(range(rt.N)) - {rt.root}
        for c in range(len(tt)):
            nodes = es[c] | {rt.parent[y] for y in es[c]}
            # boundary: nodes touched from outside the cluster are the top and the bottom
            outside = {x for x in nodes for y in [rt.parent[x]] + rt.children[x] if y >= 0 and y != x
                       and (y if y != rt.parent[x] else x) not in es[c]}
            assert outside <= {tt.top[c], tt.bot[c]}
            assert tt.top[c] in nodes and tt.top[c] not in es[c]
            if tt.bot[c] >= 0:
                assert tt.bot[c] in es[c] and rt.children[tt.bot[c]]
                assert not set(rt.children[tt.bot[c]]) & es[c]
            want = sorted(x for x in nodes if x in rt.label)
            assert sorted(tt.leaves(c)) == want
            assert all(tt.contains_leaf(c, x) == (x in want) for x in rt.label)
            if tt.kind[c] != "edge":
                assert tt.height[c] == 1 + max(tt.height[k] for k in tt.kids[c])
                assert tt.is_vertical(c) == (tt.kind[c] in ("a", "b"))
        assert tt.stats()["max_membership"] <= tt.stats()["height"] + 1
        assert tt.stats()["height"] <= 4 * math.log2(rt.N) + 2

    @pytest.mark.parametrize("t", list(sample_trees())[:10], ids=lambda t: f"n{t.n}")
    def test_representatives(self, t):
        rt = RootedTree(t)
        tt = build_top_tree(rt)
        es = edge_sets(tt)
        for u in range(rt.N):
            if u in rt.label:
                with pytest.raises(ValueError):
                    representative_cluster(tt, u)
                continue
            c = representative_cluster(tt, u)
            assert tt.merged[c] == u and tt.kind[c] in ("a", "b")
            assert u in es[c] and set(rt.children[u]) <= es[c]
            # no child cluster has u strictly inside
            for k in tt.kids[c]:
                assert not (u in es[k] and set(rt.children[u]) <= es[k])

    def test_spine_flag(self):
        rt = RootedTree(broom(12, 3))
        tt = build_top_tree(rt)
        for c in range(len(tt)):
            if tt.bot[c] < 0:
                continue
            spine, x = [], rt.parent[tt.bot[c]]
            while x != tt.top[c]:
                spine.append(x)
                x = rt.parent[x]
            deg = [len(rt.children[y]) + 1 for y in spine]
            assert tt.spine_deg4[c] == any(d >= 4 for d in deg)


class TestRelevantPairs:
    def test_exhaustive(self):
        rng = random.Random(2)
        for _ in range(15):
            n = rng.randint(4, 16)
            a, b = random_tree(n, rng, 2, 4), random_tree(n, rng, 2, n)
            t1, t2 = build_top_tree(RootedTree(a)), build_top_tree(RootedTree(b))
            got = relevant_pairs(t1, t2)
            want = {}
            for c1 in range(len(t1)):
                l1 = {t1.rt.label[x] for x in t1.leaves(c1)}
                for c2 in range(len(t2)):
                    common = sorted(l1 & {t2.rt.label[x] for x in t2.leaves(c2)})
                    if common:
                        want[(c1, c2)] = common
            assert {k: sorted(v) for k, v in got.items()} == want
            assert common_leaf_total(t1, t2) == sum(map(len, want.values()))

    def test_filter_and_mismatch(self):
        t1 = build_top_tree(RootedTree(caterpillar(6)))
        t2 = build_top_tree(RootedTree(star_tree(6)))
        keep = [t1.kind[c] in ("a", "b") for c in range(len(t1))]
        got = relevant_pairs(t1, t2, keep1=keep)
        assert got and all(keep[c1] for c1, _ in got)
        with pytest.raises(ValueError):
            relevant_pairs(t1, build_top_tree(RootedTree(star_tree(7))))


class TestRangeCounter:
    def test_random(self):
        rng = random.Random(3)
        for n in (0, 1, 7, 100):
            xs = [rng.randrange(20) for _ in range(n)]
            ys = [rng.randrange(20) for _ in range(n)]
            rc = RangeCounter2D(xs, ys)
            for _ in range(200):
                x0, x1 = sorted(rng.randrange(-2, 23) for _ in range(2))
                y0, y1 = sorted(rng.randrange(-2, 23) for _ in range(2))
                naive = sum(x0 <= x < x1 and y0 <= y < y1 for x, y in zip(xs, ys))
                assert rc.count(x0, x1, y0, y1) == naive
                closed = sum(x0 <= x <= x1 and y0 <= y <= y1 for x, y in zip(xs, ys))
                assert count_rectangle(rc, x0, x1, y0, y1) == closed
            assert rc.count_regions([(0, 5), (10, 20)], [(0, 20)]) == rc.count(0, 5, 0, 20) + rc.count(10, 20, 0, 20)

    def test_empty_rectangle(self):
        rc = RangeCounter2D([1, 2], [1, 2])
        assert rc.count(2, 1, 0, 5) == 0 and rc.count(0, 5, 3, 3) == 0


def recount(rt, color, u):
    def ab(v):
        lo, hi = rt.pre[v], rt.pre[v] + rt.size[v]
        xs = [x for x in rt.order[lo:hi] if x in rt.label]
        return sum(color[x] == A for x in xs), sum(color[x] == B for x in xs)

    kids = sum(a * b for a, b in map(ab, rt.children[u]))
    ta = sum(color[x] == A for x in rt.label)
    tb = sum(color[x] == B for x in rt.label)
    a, b = ab(u)
    up = (ta - a) * (tb - b) if rt.parent[u] >= 0 else 0
    return kids, kids + up


class TestMarkCount:
    def test_all_unmarked(self):
        rt = RootedTree(random_tree(20, 1, 2, 4))
        mc = MarkCountStructure(rt)
        assert all(mc.count_alpha_beta(u) == 0 for u in range(rt.N))

    def test_star(self):
        rt = RootedTree(star_tree(7))
        mc = MarkCountStructure(rt)
        hub = rt.children[rt.root][0]
        leaves = rt.children[hub]
        mc.mark(leaves[0], A)
        mc.mark(leaves[1], B)
        assert mc.count_children(hub) == 0
        mc.mark(rt.root, A)
        assert mc.alpha_beta(hub) == (1, 1)
        assert mc.count_alpha_beta(leaves[1]) == 0
        assert mc.count_alpha_beta(leaves[2]) == 2

    @pytest.mark.parametrize("seed", range(6))
    def test_random_interleaving(self, seed):
        rng = random.Random(seed)
        n = rng.randint(4, 60)
        rt = RootedTree(random_tree(n, rng, 2, rng.choice([2, 3, 8, n])))
        mc = MarkCountStructure(rt)
        color = [NONE] * rt.N
        leaves = list(rt.label)
        for _ in range(300):
            if rng.random() < 0.6:
                x = rng.choice(leaves)
                color[x] = rng.choice([NONE, A, B])
                mc.mark(x, color[x])
            else:
                u = rng.randrange(rt.N)
                kids, full = recount(rt, color, u)
                assert mc.count_children(u) == kids
                assert mc.count_alpha_beta(u) == full

    def test_errors(self):
        rt = RootedTree(star_tree(5))
        mc = MarkCountStructure(rt)
        with pytest.raises(ValueError):
            mc.mark(rt.children[rt.root][0], A)
        with pytest.raises(ValueError):
            mc.mark(0 if 0 in rt.label else 1, 7)
