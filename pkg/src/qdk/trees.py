"""Unrooted leaf-labelled trees, Newick I/O, rooting and LCA machinery.

Leaves carry the labels ``1..n``. Internal nodes have degree at least 3 after
:meth:`UnrootedTree.normalized`. A :class:`RootedTree` is a view of an
unrooted tree hanging from a leaf (by default the one with the smallest label).
"""

from __future__ import annotations

import enum
import random
import warnings
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import kernels

__all__ = [
    "NewickError",
    "UnrootedTree",
    "RootedTree",
    "Topology",
    "parse_newick",
    "to_newick",
    "quartet_topology",
    "brute_quartet_distance",
    "lca_depth_matrix",
    "random_tree",
    "caterpillar",
    "star_tree",
    "star_heavy_tree",
    "broom",
    "balanced_tree",
]


class NewickError(ValueError):
    """Syntax or labelling error in Newick input."""

    def __init__(self, msg: str, pos: int | None = None):
        self.pos = pos
        super().__init__(msg if pos is None else f"{msg} at position {pos}")


class UnrootedTree:
    """Tree given by an edge list over nodes ``0..N-1`` and leaf labels.

    ``labels`` maps node -> positive integer label; labelled nodes must be
    leaves (degree <= 1).
    """

    __slots__ = ("node_count", "adj", "label", "node_of")

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]], labels: dict[int, int]):
        adj: list[list[int]] = [[] for _ in range(node_count)]
        n_edges = 0
        for u, v in edges:
            if u == v or not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"bad tree edge ({u}, {v})")
            adj[u].append(v)
            adj[v].append(u)
            n_edges += 1
        if node_count and n_edges != node_count - 1:
            raise ValueError("a tree on N nodes has N-1 edges")
        node_of: dict[int, int] = {}
        for x, lab in labels.items():
            if lab in node_of:
                raise ValueError(f"duplicate leaf label {lab}")
            if len(adj[x]) > 1:
                raise ValueError(f"labelled node {x} is not a leaf")
            node_of[lab] = x
        self.node_count = node_count
        self.adj = adj
        self.label = dict(labels)
        self.node_of = node_of
        if node_count and not self._connected():
            raise ValueError("tree is not connected")

    def _connected(self) -> bool:
        seen = [False] * self.node_count
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if not seen[y]:
                    seen[y] = True
                    count += 1
                    stack.append(y)
        return count == self.node_count

    @property
    def n(self) -> int:
        """Number of labelled leaves."""
        return len(self.label)

    def labels(self) -> list[int]:
        return sorted(self.node_of)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.node_count) for v in self.adj[u] if u < v]

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def normalized(self) -> "UnrootedTree":
        """Drop unlabelled leaves and suppress degree-2 nodes (repeatedly)."""
        nbrs = [set(a) for a in self.adj]
        alive = [True] * self.node_count
        labelled = set(self.label)
        n_alive = self.node_count
        stack = list(range(self.node_count))
        while stack:
            x = stack.pop()
            if not alive[x] or x in labelled:
                continue
            d = len(nbrs[x])
            if d <= 1 and n_alive > 1:
                alive[x] = False
                n_alive -= 1
                for y in nbrs[x]:
                    nbrs[y].discard(x)
                    stack.append(y)
                nbrs[x].clear()
            elif d == 2:
                a, b = nbrs[x]
                alive[x] = False
                n_alive -= 1
                nbrs[a].discard(x)
                nbrs[b].discard(x)
                nbrs[a].add(b)
                nbrs[b].add(a)
                nbrs[x].clear()
                stack += [a, b]
        ids = {x: i for i, x in enumerate(x for x in range(self.node_count) if alive[x])}
        edges = [(ids[u], ids[v]) for u in ids for v in nbrs[u] if u < v]
        return UnrootedTree(len(ids), edges, {ids[x]: lab for x, lab in self.label.items()})

    def relabeled(self, mapping: dict[int, int]) -> "UnrootedTree":
        return UnrootedTree(self.node_count, self.edges(), {x: mapping[l] for x, l in self.label.items()})

    def __repr__(self):
        return f"UnrootedTree(n={self.n}, nodes={self.node_count})"


# --- Newick ------------------------------------------------------------------


def parse_newick(text: str, normalize: bool = True, check_labels: bool = True) -> UnrootedTree:
    """Parse one Newick tree with positive integer leaf labels.

    Branch lengths, internal labels and comments in brackets are ignored.
    With ``check_labels`` the labels must be exactly ``1..n``.
    """
    s = text.strip()
    pos = 0
    parent: list[int] = []
    labels: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    stack: list[int] = []
    L = len(s)

    def new_node(par):
        parent.append(par)
        if par >= 0:
            edges.append((par, len(parent) - 1))
        return len(parent) - 1

    def read_token(p):
        start = p
        while p < L and s[p] not in "(),:;[ \t\r\n":
            p += 1
        return s[start:p], p

    def skip_ws(p):
        while p < L:
            if s[p] in " \t\r\n":
                p += 1
            elif s[p] == "[":
                close = s.find("]", p)
                if close < 0:
                    raise NewickError("unterminated comment", p)
                p = close + 1
            else:
                break
        return p

    def skip_length(p):
        p = skip_ws(p)
        if p < L and s[p] == ":":
            p = skip_ws(p + 1)
            _, q = read_token(p)
            if q == p:
                raise NewickError("missing branch length", p)
            try:
                float(s[p:q])
            except ValueError:
                raise NewickError(f"bad branch length {s[p:q]!r}", p) from None
            p = q
        return skip_ws(p)

    pos = skip_ws(pos)
    if pos >= L:
        raise NewickError("empty input", 0)
    current = -1
    expect_item = True
    while True:
        pos = skip_ws(pos)
        if pos >= L:
            raise NewickError("missing ';'", pos)
        ch = s[pos]
        if expect_item:
            if ch == "(":
                current = new_node(stack[-1] if stack else -1)
                stack.append(current)
                pos += 1
                continue
            tok, q = read_token(pos)
            if not tok:
                raise NewickError(f"expected a leaf label, found {ch!r}", pos)
            try:
                lab = int(tok)
            except ValueError:
                raise NewickError(f"leaf label {tok!r} is not an integer", pos) from None
            if lab <= 0:
                raise NewickError(f"leaf label {lab} is not positive", pos)
            leaf = new_node(stack[-1] if stack else -1)
            labels[leaf] = lab
            pos = skip_length(q)
            expect_item = False
            continue
        if ch == ",":
            if not stack:
                raise NewickError("',' outside parentheses", pos)
            pos += 1
            expect_item = True
        elif ch == ")":
            if not stack:
                raise NewickError("unbalanced ')'", pos)
            stack.pop()
            pos += 1
            _, pos = read_token(skip_ws(pos))  # internal label
            pos = skip_length(pos)
        elif ch == ";":
            if stack:
                raise NewickError("unbalanced '('", pos)
            pos = skip_ws(pos + 1)
            if pos != L:
                raise NewickError("trailing characters after ';'", pos)
            break
        else:
            raise NewickError(f"unexpected {ch!r}", pos)

    seen: dict[int, int] = {}
    for x, lab in labels.items():
        if lab in seen:
            raise NewickError(f"duplicate leaf label {lab}")
        seen[lab] = x
    n = len(labels)
    if check_labels and set(seen) != set(range(1, n + 1)):
        missing = sorted(set(range(1, n + 1)) - set(seen))
        raise NewickError(f"leaf labels must be 1..{n}; missing {missing[:5]}")
    if n < 4:
        warnings.warn(f"tree has {n} < 4 leaves; quartet distance is 0", stacklevel=2)
    # a Newick root of degree 1 that is a leaf would be a single-node tree
    tree = UnrootedTree(len(parent), edges, labels)
    return tree.normalized() if normalize else tree


def to_newick(tree: UnrootedTree) -> str:
    """Serialize, hanging the tree from a neighbor of the smallest-label leaf."""
    if tree.node_count == 0:
        return ";"
    if tree.node_count == 1:
        return f"{tree.label[0]};"
    leaf = tree.node_of[min(tree.node_of)]
    root = tree.adj[leaf][0] if tree.adj[leaf] else leaf
    if root in tree.label:
        # two leaves joined by one edge
        return f"({tree.label[leaf]},{tree.label[root]});"
    out: list[str] = []
    # iterative DFS emitting tokens
    stack: list = [(root, -1, 0)]
    while stack:
        x, par, state = stack.pop()
        if isinstance(x, str):
            out.append(x)
            continue
        kids = [y for y in tree.adj[x] if y != par]
        if not kids:
            out.append(str(tree.label[x]))
            continue
        out.append("(")
        stack.append((")", None, 0))
        for i, y in enumerate(reversed(kids)):
            stack.append((y, x, 0))
            if i < len(kids) - 1:
                stack.append((",", None, 0))
    return "".join(out) + ";"


# --- rooted view -------------------------------------------------------------


class RootedTree:
    """A tree hanging from a leaf, with pre-order, LCA and heavy paths.

    ``pre[v]`` is the pre-order index; subtree(v) is the index interval
    ``[pre[v], pre[v] + size[v])``. Children are kept in adjacency order.
    """

    def __init__(self, tree: UnrootedTree, root_label: int | None = None):
        if tree.n == 0:
            raise ValueError("tree without leaves")
        self.tree = tree
        if root_label is None:
            root_label = min(tree.node_of)
        root = tree.node_of[root_label]
        N = tree.node_count
        self.N = N
        self.root = root
        self.root_label = root_label
        parent = [-1] * N
        children: list[list[int]] = [[] for _ in range(N)]
        depth = [0] * N
        order = [root]
        seen = [False] * N
        seen[root] = True
        stack = [root]
        order = []
        while stack:
            x = stack.pop()
            order.append(x)
            kids = [y for y in tree.adj[x] if not seen[y]]
            for y in kids:
                seen[y] = True
                parent[y] = x
                depth[y] = depth[x] + 1
            children[x] = kids
            stack.extend(reversed(kids))
        pre = [0] * N
        for i, x in enumerate(order):
            pre[x] = i
        size = [1] * N
        for x in reversed(order):
            if parent[x] >= 0:
                size[parent[x]] += size[x]
        self.parent = parent
        self.children = children
        self.depth = depth
        self.order = order
        self.pre = pre
        self.size = size
        self.label = tree.label
        self.node_of = tree.node_of
        self.is_leaf = [not children[x] for x in range(N)]
        # every leaf except the root is a tree leaf; the root is a leaf too
        self._build_lifting()
        self._build_heavy()

    def _build_lifting(self):
        N = self.N
        LOG = max(1, (max(self.depth) + 1).bit_length())
        up = [list(self.parent)]
        up[0][self.root] = self.root
        for k in range(1, LOG):
            prev = up[-1]
            up.append([prev[prev[x]] for x in range(N)])
        self.up = up

    def _build_heavy(self):
        heavy = [-1] * self.N
        for x in range(self.N):
            if self.children[x]:
                heavy[x] = max(self.children[x], key=lambda y: self.size[y])
        head = [0] * self.N
        for x in self.order:
            p = self.parent[x]
            head[x] = head[p] if p >= 0 and heavy[p] == x else x
        self.heavy = heavy
        self.head = head

    # queries

    def in_subtree(self, x: int, v: int) -> bool:
        return self.pre[v] <= self.pre[x] < self.pre[v] + self.size[v]

    def level_ancestor(self, x: int, d: int) -> int:
        """Ancestor of ``x`` at depth ``d`` (``d <= depth[x]``)."""
        k = self.depth[x] - d
        if k < 0:
            raise ValueError("requested depth below the node")
        i = 0
        while k:
            if k & 1:
                x = self.up[i][x]
            k >>= 1
            i += 1
        return x

    def lca(self, u: int, v: int) -> int:
        if self.depth[u] < self.depth[v]:
            u, v = v, u
        u = self.level_ancestor(u, self.depth[v])
        if u == v:
            return u
        for k in range(len(self.up) - 1, -1, -1):
            a, b = self.up[k][u], self.up[k][v]
            if a != b:
                u, v = a, b
        return self.parent[u]

    def extended_lca(self, u: int, v: int):
        """``(w, cu, cv)``: LCA and its children toward ``u``/``v`` (``None`` if equal to ``w``)."""
        w = self.lca(u, v)
        cu = None if u == w else self.level_ancestor(u, self.depth[w] + 1)
        cv = None if v == w else self.level_ancestor(v, self.depth[w] + 1)
        return w, cu, cv

    def leaves_below(self, v: int) -> list[int]:
        """Leaf nodes in subtree(v) in pre-order."""
        lo, hi = self.pre[v], self.pre[v] + self.size[v]
        return [x for x in self.order[lo:hi] if self.is_leaf[x]]


# --- quartets ------------------------------------------------------------------


class Topology(enum.Enum):
    AB_CD = "AB|CD"
    AC_BD = "AC|BD"
    AD_BC = "AD|BC"
    STAR = "STAR"


def _pair_topology(s1, s2, s3) -> Topology:
    if s1 > s2 and s1 > s3:
        return Topology.AB_CD
    if s2 > s1 and s2 > s3:
        return Topology.AC_BD
    if s3 > s1 and s3 > s2:
        return Topology.AD_BC
    return Topology.STAR


def quartet_topology(t: RootedTree, quartet: Sequence[int]) -> Topology:
    """Induced topology of four leaf labels, relative to their given order.

    For ``ab|cd`` the path lengths satisfy ``d(a,b) + d(c,d) < d(a,c) + d(b,d)
    = d(a,d) + d(b,c)``; written with LCA depths the pairing with the larger
    sum wins, and a three-way tie means a star.
    """
    a, b, c, d = quartet
    if len({a, b, c, d}) != 4:
        raise ValueError("quartet needs four distinct labels")
    try:
        x = [t.node_of[l] for l in quartet]
    except KeyError as exc:
        raise ValueError(f"unknown leaf label {exc.args[0]}") from None
    D = lambda p, q: t.depth[t.lca(x[p], x[q])]  # noqa: E731
    return _pair_topology(D(0, 1) + D(2, 3), D(0, 2) + D(1, 3), D(0, 3) + D(1, 2))


def lca_depth_matrix(t: RootedTree, labels: Sequence[int]) -> np.ndarray:
    """``D[i, j] = depth(lca(leaf labels[i], leaf labels[j]))``."""
    n = len(labels)
    pos_of = {t.node_of[l]: i for i, l in enumerate(labels)}
    D = np.zeros((n, n), dtype=np.int32)
    # leaves in pre-order; each node claims its leaf interval, deeper nodes later
    leaf_rank = {}
    perm = []
    for x in t.order:
        if x in pos_of:
            leaf_rank[x] = len(perm)
            perm.append(pos_of[x])
    first = [0] * t.N
    last = [0] * t.N
    for x in reversed(t.order):
        if x in leaf_rank:
            first[x] = leaf_rank[x]
            last[x] = leaf_rank[x] + 1
        kids = t.children[x]
        if kids:
            first[x] = min(first[y] for y in kids)
            last[x] = max(last[y] for y in kids)
            if x in leaf_rank:  # only the root can be both
                first[x] = min(first[x], leaf_rank[x])
    Dp = np.zeros((n, n), dtype=np.int32)
    for x in t.order:
        if t.children[x]:
            Dp[first[x] : last[x], first[x] : last[x]] = t.depth[x]
    perm_arr = np.asarray(perm, dtype=np.int64)
    D[np.ix_(perm_arr, perm_arr)] = Dp
    return D


def _check_same_labels(t1: UnrootedTree, t2: UnrootedTree):
    if set(t1.node_of) != set(t2.node_of):
        raise ValueError("trees have different leaf label sets")


def brute_quartet_distance(t1: UnrootedTree, t2: UnrootedTree, use_extension=None) -> int:
    """Compare all ``C(n, 4)`` quartets."""
    return quartet_tallies(t1, t2, use_extension)[0]


def quartet_tallies(t1: UnrootedTree, t2: UnrootedTree, use_extension=None):
    """``(differ, shared_butterflies, shared_stars)`` by full enumeration."""
    _check_same_labels(t1, t2)
    labels = t1.labels()
    if len(labels) < 4:
        return 0, 0, 0
    D1 = lca_depth_matrix(RootedTree(t1), labels)
    D2 = lca_depth_matrix(RootedTree(t2), labels)
    res = kernels.quartet_tally(D1, D2, use_extension=use_extension)
    assert sum(res) == comb(len(labels), 4)
    return res


# --- generators ------------------------------------------------------------------


def random_tree(
    n: int,
    rng: random.Random | int | None = None,
    min_children: int = 2,
    max_children: int = 2,
) -> UnrootedTree:
    """Random tree by repeatedly joining ``k`` random pool subtrees under a new node.

    ``min_children = max_children = 2`` gives binary trees; larger values
    give high-degree trees. Labels ``1..n`` are shuffled onto the leaves.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    if n < 1:
        raise ValueError("n must be positive")
    min_children = max(2, min_children)
    max_children = max(min_children, max_children)
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    edges: list[tuple[int, int]] = []
    pool = list(range(n))
    nxt = n
    while len(pool) > 3:
        k = rng.randint(min_children, max_children)
        if k >= len(pool) - 1:
            break
        joined = []
        for _ in range(k):
            i = rng.randrange(len(pool))
            pool[i], pool[-1] = pool[-1], pool[i]
            joined.append(pool.pop())
        for x in joined:
            edges.append((nxt, x))
        pool.append(nxt)
        nxt += 1
    if len(pool) >= 3:
        for x in pool:
            edges.append((nxt, x))
        nxt += 1
    elif len(pool) == 2:
        edges.append((pool[0], pool[1]))
    return UnrootedTree(nxt, edges, {i: labels[i] for i in range(n)})


def caterpillar(n: int, labels: Sequence[int] | None = None) -> UnrootedTree:
    """Binary caterpillar ``(l1,(l2,(l3,...)))`` as an unrooted tree."""
    labels = list(range(1, n + 1)) if labels is None else list(labels)
    if n < 4:
        return star_tree(n, labels)
    text = str(labels[-1])
    for lab in reversed(labels[:-1]):
        text = f"({lab},{text})"
    return parse_newick(text + ";", check_labels=False)


def star_tree(n: int, labels: Sequence[int] | None = None) -> UnrootedTree:
    labels = list(range(1, n + 1)) if labels is None else list(labels)
    if n == 1:
        return UnrootedTree(1, [], {0: labels[0]})
    if n == 2:
        return UnrootedTree(2, [(0, 1)], {0: labels[0], 1: labels[1]})
    return UnrootedTree(n + 1, [(n, i) for i in range(n)], {i: labels[i] for i in range(n)})


def star_heavy_tree(n: int, rng: random.Random | int | None = None, min_degree: int | None = None) -> UnrootedTree:
    """Few internal nodes, each of degree at least ``min_degree`` (default ``n // 10``)."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    d = max(3, n // 10 if min_degree is None else min_degree)
    if n < d:
        raise ValueError("n too small for the requested degree")
    # k internal nodes joined by a random tree; node i gets d - (tree degree) leaves at least
    k = rng.randint(1, max(1, min(10, n // d)))
    while True:
        tree_edges = [(i, rng.randrange(i)) for i in range(1, k)]
        deg = [0] * k
        for a, b in tree_edges:
            deg[a] += 1
            deg[b] += 1
        need = [max(0, d - deg[i]) for i in range(k)]
        # a node with one tree edge needs two leaves to avoid degree 2
        need = [max(x, 2 - deg[i] + 1 if deg[i] <= 1 else x) for i, x in enumerate(need)]
        if sum(need) <= n:
            break
        k -= 1
    for _ in range(n - sum(need)):
        need[rng.randrange(k)] += 1
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    edges = [(n + a, n + b) for a, b in tree_edges]
    leaf = 0
    for i in range(k):
        for _ in range(need[i]):
            edges.append((n + i, leaf))
            leaf += 1
    return UnrootedTree(n + k, edges, {i: labels[i] for i in range(n)})


def broom(n: int, handle: int, labels: Sequence[int] | None = None) -> UnrootedTree:
    """A caterpillar of ``handle`` leaves ending in a star holding the rest."""
    labels = list(range(1, n + 1)) if labels is None else list(labels)
    handle = max(0, min(handle, n - 3))
    edges = []
    nodes = n
    prev = None
    for i in range(handle):
        edges.append((nodes, i))
        if prev is not None:
            edges.append((prev, nodes))
        prev = nodes
        nodes += 1
    hub = nodes
    nodes += 1
    if prev is not None:
        edges.append((prev, hub))
    for i in range(handle, n):
        edges.append((hub, i))
    # the first handle node has one leaf and one tree edge; give it the hub's spare leaf
    if handle:
        edges.remove((hub, n - 1))
        edges.append((n, n - 1))
    return UnrootedTree(nodes, edges, {i: labels[i] for i in range(n)})


def balanced_tree(n: int, d: int, labels: Sequence[int] | None = None) -> UnrootedTree:
    """Complete ``d``-ary hierarchy over ``n`` leaves (last level may be partial)."""
    labels = list(range(1, n + 1)) if labels is None else list(labels)
    if d < 2:
        raise ValueError("d must be at least 2")
    edges = []
    level = list(range(n))
    nxt = n
    while len(level) > 1:
        out = []
        for i in range(0, len(level), d):
            grp = level[i : i + d]
            if len(grp) == 1:
                out.append(grp[0])
                continue
            for x in grp:
                edges.append((nxt, x))
            out.append(nxt)
            nxt += 1
        level = out
    return UnrootedTree(nxt, edges, {i: labels[i] for i in range(n)}).normalized()
