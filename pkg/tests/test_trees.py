import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdk.trees import (
    NewickError,
    RootedTree,
    Topology,
    UnrootedTree,
    balanced_tree,
    broom,
    brute_quartet_distance,
    caterpillar,
    parse_newick,
    quartet_topology,
    random_tree,
    star_heavy_tree,
    star_tree,
    to_newick,
)


def shape(t: UnrootedTree):
    """Canonical form: nested frozensets hanging from the smallest label."""
    root = t.node_of[min(t.node_of)]

    def walk(x, par):
        if x in t.label and x != root:
            return t.label[x]
        return frozenset(walk(y, x) for y in t.adj[x] if y != par)

    return walk(root, -1)


def path(t: UnrootedTree, a, b):
    prev = {a: None}
    stack = [a]
    while stack:
        x = stack.pop()
        for y in t.adj[x]:
            if y not in prev:
                prev[y] = x
                stack.append(y)
    out = {b}
    while b != a:
        b = prev[b]
        out.add(b)
    return out


def contracted(t: UnrootedTree, q):
    """Which pairing has node-disjoint connecting paths."""
    x = [t.node_of[l] for l in q]
    for (i, j), (k, l), top in (
        ((0, 1), (2, 3), Topology.AB_CD),
        ((0, 2), (1, 3), Topology.AC_BD),
        ((0, 3), (1, 2), Topology.AD_BC),
    ):
        if not path(t, x[i], x[j]) & path(t, x[k], x[l]):
            return top
    return Topology.STAR


def trees(min_n=4, max_n=14):
    @st.composite
    def build(draw):
        n = draw(st.integers(min_n, max_n))
        seed = draw(st.integers(0, 2**32))
        hi = draw(st.sampled_from([2, 3, 5, n]))
        return random_tree(n, seed, 2, hi)

    return build()


class TestNewick:
    def test_examples(self):
        t = parse_newick("((1,2),(3,4));")
        assert t.n == 4 and t.node_count == 6
        assert quartet_topology(RootedTree(t), (1, 2, 3, 4)) is Topology.AB_CD
        s = parse_newick("(1,2,3,4);")
        assert s.node_count == 5 and s.max_degree() == 4
        a = parse_newick("((1:0.5,2)x,(3,(4,5)));")
        b = parse_newick("((1,2),(3,(4,5)));")
        assert shape(a) == shape(b)

    def test_comments_and_whitespace(self):
        t = parse_newick(" ( (1 , 2)[note] , 3 , 4 )\n; ")
        assert shape(t) == shape(parse_newick("((1,2),3,4);"))

    def test_degree_two_suppressed(self):
        t = parse_newick("(((1,2)),((3)),4);")
        assert all(len(a) != 2 for a in t.adj)
        raw = parse_newick("(((1,2)),((3)),4);", normalize=False)
        assert any(len(a) == 2 for a in raw.adj)

    @pytest.mark.parametrize(
        "text, pos",
        [
            ("((1,2),(3,4))", 13),
            ("((1,2),(3,4);", 12),
            ("((1,2),(3,4)));", 13),
            ("((1,a),(3,4));", 4),
            ("((1,2),(3,-4));", 10),
            ("((1,2):x,(3,4));", 7),
            ("((1,2),(3,4)); 5", 15),
            ("", 0),
            ("((1,),(3,4));", 4),
        ],
    )
    def test_syntax_errors(self, text, pos):
        with pytest.raises(NewickError) as err:
            parse_newick(text)
        assert err.value.pos == pos

    def test_label_errors(self):
        with pytest.raises(NewickError, match="duplicate"):
            parse_newick("((1,2),(2,3));")
        with pytest.raises(NewickError, match="missing"):
            parse_newick("((1,2),(3,5));")
        assert parse_newick("((1,2),(3,5));", check_labels=False).n == 4

    def test_small_tree_warns(self):
        with pytest.warns(UserWarning):
            parse_newick("(1,2,3);")

    @pytest.mark.filterwarnings("ignore:tree has")
    @given(trees(1, 40))
    def test_roundtrip(self, t):
        back = parse_newick(to_newick(t))
        assert shape(back) == shape(t.normalized())
        assert back.node_count == t.normalized().node_count


class TestTopology:
    def test_examples(self):
        rt = RootedTree(star_tree(6))
        for q in itertools.combinations(range(1, 7), 4):
            assert quartet_topology(rt, q) is Topology.STAR
        cat = RootedTree(parse_newick("(1,(2,(3,(4,5))));"))
        assert quartet_topology(cat, (1, 2, 4, 5)) is Topology.AB_CD
        assert quartet_topology(cat, (1, 4, 2, 5)) is Topology.AC_BD

    def test_errors(self):
        rt = RootedTree(star_tree(5))
        with pytest.raises(ValueError):
            quartet_topology(rt, (1, 1, 2, 3))
        with pytest.raises(ValueError):
            quartet_topology(rt, (1, 2, 3, 9))

    @given(trees())
    def test_contraction_oracle(self, t):
        t = t.normalized()
        labels = t.labels()
        for root in (labels[0], labels[-1]):
            rt = RootedTree(t, root)
            for q in itertools.combinations(labels, 4):
                assert quartet_topology(rt, q) is contracted(t, q)


class TestRootedTree:
    def test_rooted_at_smallest_leaf(self):
        t = random_tree(9, 3)
        rt = RootedTree(t)
        assert rt.label[rt.root] == 1 and len(rt.children[rt.root]) == 1

    @given(trees(2, 100))
    def test_pre_order_intervals(self, t):
        rt = RootedTree(t)
        for v in range(rt.N):
            below = set()
            stack = [v]
            while stack:
                x = stack.pop()
                below.add(x)
                stack += rt.children[x]
            for x in range(rt.N):
                assert (x in below) == rt.in_subtree(x, v)
            # the complement is at most two pre-order runs
            rest = sorted(rt.pre[x] for x in range(rt.N) if x not in below)
            runs = sum(1 for i, p in enumerate(rest) if i == 0 or rest[i - 1] != p - 1)
            assert runs <= 2

    def test_exhaustive_200(self):
        for seed in range(3):
            t = random_tree(100, seed, 2, 4)
            rt = RootedTree(t)
            assert rt.N <= 200
            for v in range(rt.N):
                members = {x for x in range(rt.N) if rt.in_subtree(x, v)}
                assert len(members) == rt.size[v]
                assert all(rt.in_subtree(rt.parent[x], v) or x == v for x in members)

    def test_lca_against_path_walk(self):
        rng = random.Random(5)
        for _ in range(10):
            rt = RootedTree(random_tree(rng.randint(2, 60), rng, 2, rng.choice([2, 4, 8])))

            def up(x):
                out = [x]
                while rt.parent[out[-1]] >= 0:
                    out.append(rt.parent[out[-1]])
                return out

            for _ in range(200):
                u, v = rng.randrange(rt.N), rng.randrange(rt.N)
                pu, pv = up(u), up(v)
                w = next(x for x in pu if x in set(pv))
                assert rt.lca(u, v) == w
                got = rt.extended_lca(u, v)
                cu = None if u == w else pu[pu.index(w) - 1]
                cv = None if v == w else pv[pv.index(w) - 1]
                assert got == (w, cu, cv)

    def test_extended_lca_examples(self):
        t = parse_newick("((1,2),(3,4));")
        rt = RootedTree(t, 2)
        a, b = t.node_of[3], t.node_of[4]
        p = rt.parent[a]
        assert rt.extended_lca(a, b) == (p, a, b)
        assert rt.extended_lca(p, b) == (p, None, b)

    def test_leaves_below(self):
        rt = RootedTree(caterpillar(6))
        assert sorted(rt.label[x] for x in rt.leaves_below(rt.root)) == [2, 3, 4, 5, 6]


class TestBruteDistance:
    def test_examples(self):
        t = random_tree(10, 1)
        assert brute_quartet_distance(t, t) == 0
        assert brute_quartet_distance(star_tree(5), caterpillar(5)) == 5
        assert brute_quartet_distance(star_tree(3), star_tree(3)) == 0

    def test_symmetric_and_label_check(self):
        rng = random.Random(8)
        for _ in range(30):
            n = rng.randint(4, 12)
            a, b = random_tree(n, rng, 2, 4), random_tree(n, rng, 2, 2)
            assert brute_quartet_distance(a, b) == brute_quartet_distance(b, a)
        with pytest.raises(ValueError):
            brute_quartet_distance(star_tree(5), star_tree(6))

    def test_against_contraction(self):
        rng = random.Random(9)
        for _ in range(10):
            n = rng.randint(4, 9)
            a, b = random_tree(n, rng, 2, 3), random_tree(n, rng, 2, 5)
            want = sum(contracted(a, q) is not contracted(b, q) for q in itertools.combinations(range(1, n + 1), 4))
            assert brute_quartet_distance(a, b) == want
            assert brute_quartet_distance(a, b, use_extension=False) == want


class TestGenerators:
    @pytest.mark.parametrize("n", [4, 7, 30])
    def test_shapes_are_valid(self, n):
        for t in (caterpillar(n), star_tree(n), broom(n, 2), balanced_tree(n, 3), random_tree(n, 0, 2, 6)):
            assert t.labels() == list(range(1, n + 1))
            assert all(len(a) != 2 for a in t.adj)

    def test_star_heavy(self):
        for seed in range(5):
            t = star_heavy_tree(200, seed)
            inner = [len(a) for x, a in enumerate(t.adj) if x not in t.label]
            assert len(inner) <= 10 and min(inner) >= 20
            assert t.labels() == list(range(1, 201))
