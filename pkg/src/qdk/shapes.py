"""Closed-form counts of the 16 four-edge shapes of a bipartite multigraph.

Every count is linear in the number of 4-cycles ``C4``: ``#R = t_R + d_R·C4``
where ``t_R`` needs one linear pass over the graph. We carry the pair
``(t_R, d_R)`` around as a :class:`Lin` so the t-values fall out of the same
code that produces the shape counts.

Left nodes are ``V1``, right nodes ``V2``; an edge is ``(u, v)`` with
``u ∈ V1``. A shape name with ``*`` is the mirror image (sides swapped).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, NamedTuple

from .graph import (
    MIRROR,
    SHAPES,
    GraphFormatError,
    Multigraph,
    exact_div,
    multichoose_difference,
    multichoose_table,
    multichoose_union,
)

__all__ = [
    "Lin",
    "ShapeLedger",
    "count_easy_shapes",
    "count_t_values",
    "count_4matchings",
    "count_t_J",
    "count_2matchings",
    "count_shapes",
]


class Lin(NamedTuple):
    """The value ``t + d·C4``."""

    t: int
    d: int = 0

    def __add__(self, o):
        o = _lin(o)
        return Lin(self.t + o.t, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, o):
        o = _lin(o)
        return Lin(self.t - o.t, self.d - o.d)

    def __rsub__(self, o):
        return _lin(o) - self

    def __mul__(self, k: int):
        return Lin(self.t * k, self.d * k)

    __rmul__ = __mul__

    def __neg__(self):
        return Lin(-self.t, -self.d)

    def div(self, k: int) -> "Lin":
        return Lin(exact_div(self.t, k), exact_div(self.d, k))

    def at(self, c4: int) -> int:
        return self.t + self.d * c4


def _lin(x) -> Lin:
    return x if isinstance(x, Lin) else Lin(int(x))


def _half_pairs(values: Iterable[int]) -> int:
    """``Σ_{x<y} f(x) f(y)`` as ``((Σf)² − Σf²) / 2``."""
    s1 = s2 = 0
    for f in values:
        s1 += f
        s2 += f * f
    return exact_div(s1 * s1 - s2, 2)


@dataclass
class ShapeLedger:
    """Shape counts, their t-values and the auxiliary sums.

    ``counts`` only holds shapes that are known; the hard shapes need ``c4``.
    """

    lin: dict[str, Lin] = field(default_factory=dict)
    aux: dict[str, int] = field(default_factory=dict)
    c4: int | None = None

    @property
    def t(self) -> dict[str, int]:
        return {k: v.t for k, v in self.lin.items()}

    @property
    def counts(self) -> dict[str, int]:
        out = {}
        for k, v in self.lin.items():
            if v.d == 0:
                out[k] = v.t
            elif self.c4 is not None:
                out[k] = v.at(self.c4)
        return out

    def __getitem__(self, shape: str) -> int:
        return self.counts[shape]

    def check(self):
        for k, v in self.counts.items():
            if v < 0:
                raise ArithmeticError(f"negative count for shape {k}: {v}")
        return self


# --- per-graph tables --------------------------------------------------------------


class _Tables:
    """Multichoose tables of ``E``, ``E(x)`` and the derived per-edge sets."""

    def __init__(self, g: Multigraph):
        if not g.is_bipartite:
            raise GraphFormatError("shape counting needs a bipartite graph")
        self.g = g
        self.edges = list(g.oriented_edges())
        inc: list[list[int]] = [[] for _ in range(g.node_count)]
        for u, v, k in self.edges:
            inc[u].append(k)
            inc[v].append(k)
        self.node = [multichoose_table(ms, 4) for ms in inc]
        self.all = multichoose_table((k for _, _, k in self.edges), 4)
        self.M = self.all[1]
        self.left = range(g.n_left)
        self.right = range(g.n_left, g.node_count)
        # per edge: [E(u)-e], [E(v)-e], R = (E \ E(u)) \ (E(v)-e)
        self.eu, self.ev, self.rest = [], [], []
        for u, v, k in self.edges:
            single = [1, k, 0, 0, 0]
            tu = multichoose_difference(self.node[u], single, 4)
            tv = multichoose_difference(self.node[v], single, 4)
            self.eu.append(tu)
            self.ev.append(tv)
            self.rest.append(multichoose_difference(self.all, multichoose_union(self.node[u], tv, 4), 4))

    def outside(self, x: int) -> list[int]:
        return multichoose_difference(self.all, self.node[x], 4)


def _ensure(g) -> _Tables:
    return g if isinstance(g, _Tables) else _Tables(g)


# --- multigraph formulas ---------------------------------------------------------


def _easy_multi(tb: _Tables, led: ShapeLedger, mirror: bool):
    """#A, #B, #C for one orientation (``mirror`` swaps the sides)."""
    sfx = "*" if mirror else ""
    side = tb.right if mirror else tb.left
    A = sum(tb.node[u][4] for u in side)
    B = 0
    for i, (u, v, k) in enumerate(tb.edges):
        tu, tv = (tb.ev[i], tb.eu[i]) if mirror else (tb.eu[i], tb.ev[i])
        B += k * tu[2] * tv[1]
    C = sum(tb.node[u][3] * tb.outside(u)[1] for u in side) - B
    led.lin["A" + sfx] = Lin(A)
    led.lin["B" + sfx] = Lin(B)
    led.lin["C" + sfx] = Lin(C)


def _g_multi(tb: _Tables, led: ShapeLedger):
    gt = sum(tb.node[v][2] for v in tb.right)
    lt = sum(tb.node[u][2] for u in tb.left)
    zoz = 0
    acc = 0
    for i, (u, v, k) in enumerate(tb.edges):
        zoz += k * k * tb.eu[i][1] * tb.ev[i][1]
        acc += k * tb.eu[i][1] * (gt - tb.node[v][2])
    led.aux[">"] = gt
    led.aux["<"] = lt
    led.aux["zoz"] = zoz
    led.lin["G"] = Lin(acc - zoz - 2 * led.lin["B"].t - led.lin["B*"].t).div(2)


def count_easy_shapes(g: Multigraph, method: str = "multi") -> ShapeLedger:
    """#A, #B, #C, #G and mirrors, no 4-cycle count needed.

    ``method="simple"`` uses plain degrees and requires every multiplicity
    to be 1; ``"multi"`` uses multichoose tables and works for any
    multigraph.
    """
    led = ShapeLedger()
    if method == "simple":
        _simple_all(_degrees(g), led)
        for key in ("E", "E*", "F", "F*", "H", "I", "I*", "J", "D"):
            led.lin.pop(key, None)
        return led
    if method != "multi":
        raise ValueError(f"unknown method {method!r}")
    tb = _ensure(g)
    _easy_multi(tb, led, False)
    _easy_multi(tb, led, True)
    _g_multi(tb, led)
    return led


def _hard_multi(tb: _Tables, led: ShapeLedger):
    C4 = Lin(0, 1)
    edges = tb.edges
    # t_E: for a centre v, pairs of neighbours x, y each leaving through another edge
    for mirror in (False, True):
        sfx = "*" if mirror else ""
        per_centre: dict[int, list[int]] = {}
        for i, (u, v, k) in enumerate(edges):
            if mirror:
                # centre u ∈ V1, arm at v
                per_centre.setdefault(u, []).append(k * tb.ev[i][1])
            else:
                per_centre.setdefault(v, []).append(k * tb.eu[i][1])
        t_E = sum(_half_pairs(vals) for vals in per_centre.values())
        led.aux["t_E" + sfx] = t_E
        led.lin["E" + sfx] = Lin(t_E) - 2 * C4
        side = tb.right if mirror else tb.left
        tF = _half_pairs(tb.node[x][2] for x in side)
        led.aux["t'_F" + sfx] = tF
        led.lin["F" + sfx] = Lin(tF) - led.lin["E" + sfx] - C4

    tH = sum(k * tb.eu[i][1] * tb.ev[i][1] * tb.rest[i][1] for i, (_, _, k) in enumerate(edges))
    led.aux["t'_H"] = tH
    led.lin["H"] = Lin(tH) - 2 * led.lin["E"] - 2 * led.lin["E*"] - 4 * C4

    for mirror in (False, True):
        sfx = "*" if mirror else ""
        arm = tb.ev if mirror else tb.eu
        tI = sum(k * arm[i][1] * tb.rest[i][2] for i, (_, _, k) in enumerate(edges))
        led.aux["t'_I" + sfx] = tI
        other = "" if mirror else "*"
        led.lin["I" + sfx] = (
            Lin(tI)
            - 2 * led.lin["G"]
            - led.lin["B" + other]
            - led.lin["H"]
            - 2 * led.lin["E" + sfx]
            - 4 * led.lin["F" + sfx]
        ).div(2)


def _j_multi(tb: _Tables, led: ShapeLedger):
    edges = tb.edges
    zz = sum(k * tb.eu[i][1] * tb.ev[i][1] for i, (_, _, k) in enumerate(edges))
    le = exact_div(sum(k * tb.eu[i][1] * tb.rest[i][1] for i, (_, _, k) in enumerate(edges)) - zz, 2)
    ge = exact_div(sum(k * tb.ev[i][1] * tb.rest[i][1] for i, (_, _, k) in enumerate(edges)) - zz, 2)
    eq = exact_div(sum(k * tb.rest[i][2] for i, (_, _, k) in enumerate(edges)) - le - ge, 3)
    s1 = sum(tb.node[u][2] for u in tb.left)
    s1m = sum(tb.node[v][2] for v in tb.right)
    # q[v]: cherries centred in V1 that use an edge at v (weighted); q[u] mirrored
    q = [0] * tb.g.node_count
    for i, (u, v, k) in enumerate(edges):
        q[v] += k * tb.eu[i][1]
        q[u] += k * tb.ev[i][1]
    ovz = ovz_m = ov = ov_m = r2 = 0
    for i, (u, v, k) in enumerate(edges):
        tu, tv = tb.eu[i], tb.ev[i]
        ovz += k * k * (q[v] - k * tu[1])
        ovz_m += k * k * (q[u] - k * tv[1])
        ov += k * k * (s1 - tb.node[u][2])
        ov_m += k * k * (s1m - tb.node[v][2])
        r2 += k * k * tb.rest[i][2]
    ov -= ovz
    ov_m -= ovz_m
    oii = r2 - ov - ov_m
    led.aux.update({"zz": zz, "<=": le, ">=": ge, "=3": eq, "OVZ": ovz, "OVZ*": ovz_m,
                    "OV": ov, "OV*": ov_m, "OII": oii})
    led.lin["J"] = (
        tb.M * Lin(eq) - led.lin["H"] - 2 * led.lin["I"] - 2 * led.lin["I*"] - Lin(oii)
    ).div(4)


# --- simple-graph formulas ---------------------------------------------------------


class _Degrees:
    def __init__(self, g: Multigraph):
        if not g.is_bipartite:
            raise GraphFormatError("shape counting needs a bipartite graph")
        if not g.is_simple:
            raise GraphFormatError("the degree formulas need a simple graph")
        self.edges = list(g.oriented_edges())
        self.deg = [0] * g.node_count
        for u, v, _ in self.edges:
            self.deg[u] += 1
            self.deg[v] += 1
        self.m = len(self.edges)
        self.left = range(g.n_left)
        self.right = range(g.n_left, g.node_count)


def _degrees(g) -> _Degrees:
    return g if isinstance(g, _Degrees) else _Degrees(g)


def _simple_all(dg: _Degrees, led: ShapeLedger):
    d, m, E = dg.deg, dg.m, dg.edges
    C4 = Lin(0, 1)
    for mirror in (False, True):
        sfx = "*" if mirror else ""
        side = dg.right if mirror else dg.left
        oriented = [(v, u) for u, v, _ in E] if mirror else [(u, v) for u, v, _ in E]
        A = sum(comb(d[u], 4) for u in side)
        B = sum(comb(d[u] - 1, 2) * (d[v] - 1) for u, v in oriented)
        C = sum(comb(d[u], 3) * (m - d[u]) for u in side) - B
        led.lin["A" + sfx] = Lin(A)
        led.lin["B" + sfx] = Lin(B)
        led.lin["C" + sfx] = Lin(C)
    gt = sum(comb(d[v], 2) for v in dg.right)
    zz = sum((d[u] - 1) * (d[v] - 1) for u, v, _ in E)
    acc = sum((d[u] - 1) * (gt - comb(d[v], 2)) for u, v, _ in E)
    led.lin["G"] = Lin(acc - led.lin["B*"].t - zz - 2 * led.lin["B"].t).div(2)
    led.aux.update({">": gt, "<": sum(comb(d[u], 2) for u in dg.left), "zz": zz})

    for mirror in (False, True):
        sfx = "*" if mirror else ""
        centres = dg.left if mirror else dg.right
        arms: dict[int, list[int]] = {x: [] for x in centres}
        for u, v, _ in E:
            if mirror:
                arms[u].append(d[v] - 1)
            else:
                arms[v].append(d[u] - 1)
        t_E = sum(_half_pairs(a) for a in arms.values())
        led.lin["E" + sfx] = Lin(t_E) - 2 * C4
        side = dg.right if mirror else dg.left
        led.lin["F" + sfx] = Lin(_half_pairs(comb(d[x], 2) for x in side)) - led.lin["E" + sfx] - C4
    tH = sum((d[u] - 1) * (d[v] - 1) * (m - d[u] - d[v] + 1) for u, v, _ in E)
    led.lin["H"] = Lin(tH) - 2 * led.lin["E"] - 2 * led.lin["E*"] - 4 * C4
    for mirror in (False, True):
        sfx = "*" if mirror else ""
        other = "" if mirror else "*"
        tI = sum((d[v if mirror else u] - 1) * comb(m - d[u] - d[v] + 1, 2) for u, v, _ in E)
        led.lin["I" + sfx] = (
            Lin(tI)
            - 2 * led.lin["G"]
            - led.lin["B" + other]
            - led.lin["H"]
            - 2 * led.lin["E" + sfx]
            - 4 * led.lin["F" + sfx]
        ).div(2)
    eq = exact_div(
        sum(comb(m - d[u] - d[v] + 1, 2) for u, v, _ in E)
        - sum(comb(d[w], 2) * (m - d[w]) for w in range(len(d)))
        + 2 * zz,
        3,
    )
    led.aux["=3"] = eq
    led.lin["J"] = ((m - 3) * Lin(eq) - led.lin["H"] - 2 * led.lin["I"] - 2 * led.lin["I*"]).div(4)
    led.lin["D"] = C4


# --- public entry points ---------------------------------------------------------


def count_t_values(g: Multigraph, c4: int | None = None, method: str = "multi") -> ShapeLedger:
    """All 16 shapes as ``t + d·C4``; with ``c4`` the counts are resolved and checked."""
    led = ShapeLedger(c4=c4)
    if method == "simple":
        _simple_all(_degrees(g), led)
    elif method == "multi":
        tb = _ensure(g)
        _easy_multi(tb, led, False)
        _easy_multi(tb, led, True)
        _g_multi(tb, led)
        _hard_multi(tb, led)
        _j_multi(tb, led)
        led.lin["D"] = Lin(0, 1)
    else:
        raise ValueError(f"unknown method {method!r}")
    for k in ("E", "E*", "H", "I", "I*", "F", "F*", "J"):
        led.aux["t_" + k] = led.lin[k].t
    if c4 is not None:
        led.check()
    return led


def count_shapes(g: Multigraph, c4: int, method: str = "multi") -> dict[str, int]:
    """Every shape count, in the order of :data:`qdk.graph.SHAPES`."""
    counts = count_t_values(g, c4, method).counts
    return {s: counts[s] for s in SHAPES}


def count_t_J(g: Multigraph, method: str = "multi") -> int:
    """``t_J`` with ``#J = t_J + C4``; needs no cycle count."""
    return count_t_values(g, None, method).lin["J"].t


def count_4matchings(g: Multigraph, c4: int, method: str = "multi") -> int:
    """Weighted number of 4-matchings from the cycle count."""
    j = count_t_values(g, None, method).lin["J"]
    if j.d != 1:
        raise ArithmeticError("#J must carry exactly one C4")
    out = j.at(c4)
    if out < 0:
        raise ArithmeticError(f"negative 4-matching count {out}")
    return out


def count_2matchings(g: Multigraph, deleted: Iterable[int] = ()) -> int:
    """Weighted number of pairs of node-disjoint edges after deleting nodes.

    Each edge ``e = (u, v)`` pairs with every edge outside ``E(u) ∪ E(v)``;
    every matching is seen from both of its edges.
    """
    gone = set(deleted)
    edges = [(u, v, k) for u, v, k in g.edges if u not in gone and v not in gone]
    deg: dict[int, int] = {}
    total = 0
    for u, v, k in edges:
        deg[u] = deg.get(u, 0) + k
        deg[v] = deg.get(v, 0) + k
        total += k
    acc = sum(k * (total - deg[u] - deg[v] + k) for u, v, k in edges)
    return exact_div(acc, 2)


def mirror_name(shape: str) -> str:
    return MIRROR[shape]
