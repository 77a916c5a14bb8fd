"""Acceptance checks 1-7. Each prints one PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) or through pytest; the
lines go to the terminal either way.
"""

import itertools
import math
import random
import statistics
import sys
import time
import warnings
from math import comb

import pytest

from qdk.cycles import count_c4_multigraph, count_c4_naive_coloring
from qdk.decomp import build_top_tree, common_leaf_total
from qdk.fast import quartet_distance, shared_stars_fast
from qdk.graph import Multigraph, brute_count_c4, brute_shape_counts
from qdk.reduction import extract_c4
from qdk.shapes import count_shapes
from qdk.trees import (
    RootedTree,
    brute_quartet_distance,
    caterpillar,
    parse_newick,
    random_tree,
    star_heavy_tree,
    star_tree,
)

SEED = 20240501
MINUTES_5 = 300.0


def report(k, ok, detail):
    return ok, f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"


def _tree(rng, n):
    style = rng.randrange(6)
    if style == 0:
        return random_tree(n, rng, 2, 2)
    if style == 1:
        return random_tree(n, rng, 2, rng.choice([3, 4, 6]))
    if style == 2:
        return random_tree(n, rng, rng.randint(3, max(3, n // 4)), max(3, n // 2))
    if style == 3:
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        return star_tree(n, perm) if rng.random() < 0.5 else caterpillar(n, perm)
    if style == 4 and n >= 30:
        return star_heavy_tree(n, rng)
    return random_tree(n, rng, 2, n)


def criterion_1():
    rng = random.Random(SEED + 1)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(500):
        n = rng.randint(4, 60)
        a, b = _tree(rng, n), _tree(rng, n)
        if quartet_distance(a, b) != brute_quartet_distance(a, b):
            bad += 1
    dt = time.perf_counter() - t0
    return report(1, bad == 0 and dt < MINUTES_5, f"500 tree pairs, n in [4,60], {bad} mismatches, {dt:.1f}s")


def _multigraph(rng, max_mult):
    n = rng.randint(0, 10)
    p = rng.random()
    edges = [(u, v, rng.randint(1, max_mult)) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return Multigraph(n, edges)


def criterion_2():
    rng = random.Random(SEED + 2)
    t0 = time.perf_counter()
    bad = naive_bad = 0
    for i in range(500):
        g = _multigraph(rng, 1000 if i % 2 else 6)
        want = brute_count_c4(g)
        if count_c4_multigraph(g) != want:
            bad += 1
        if g.max_mult <= 6 and count_c4_naive_coloring(g) != want:
            naive_bad += 1
    dt = time.perf_counter() - t0
    ok = bad == 0 and naive_bad == 0 and dt < MINUTES_5
    return report(2, ok, f"500 multigraphs, mults <= 1000, {bad} mismatches, naive coloring {naive_bad}, {dt:.1f}s")


def criterion_3():
    rng = random.Random(SEED + 3)
    bad = 0
    for _ in range(500):
        n1, n2 = rng.randint(1, 8), rng.randint(1, 8)
        p = rng.uniform(0.1, 0.6)
        edges = [(u, n1 + v, rng.randint(1, 5)) for u in range(n1) for v in range(n2) if rng.random() < p]
        g = Multigraph(n1 + n2, edges, n_left=n1)
        if count_shapes(g, brute_count_c4(g)) != brute_shape_counts(g):
            bad += 1
    return report(3, bad == 0, f"500 bipartite multigraphs, all 16 shapes, {bad} mismatches")


def criterion_4():
    rng = random.Random(SEED + 4)
    bad = 0
    for _ in range(200):
        n = rng.randint(2, 10)
        p = rng.random()
        g = Multigraph(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])
        if extract_c4(g, quartet_distance) != brute_count_c4(g):
            bad += 1
    return report(4, bad == 0, f"200 simple graphs through extract-c4, {bad} mismatches")


def criterion_5():
    ok = True
    parts = []
    for n in (10**4, 10**5):
        lg = math.log2(n)
        t1 = build_top_tree(RootedTree(random_tree(n, SEED, 2, 2)))
        t2 = build_top_tree(RootedTree(random_tree(n, SEED + 1, 2, 8)))
        s1, s2 = t1.stats(), t2.stats()
        height = max(s1["height"], s2["height"])
        memb = max(s1["max_membership"], s2["max_membership"])
        total = common_leaf_total(t1, t2)
        ok &= height <= 4 * lg and memb <= 4 * lg and total <= 8 * n * lg * lg
        parts.append(
            f"n={n}: height {height} ({height / lg:.2f} log n), membership {memb}, "
            f"sum|L| {total} ({total / (n * lg * lg):.2f} n log^2 n)"
        )
    return report(5, ok, "; ".join(parts))


def _star_seconds(n, seed, repeat):
    a, b = star_heavy_tree(n, seed), star_heavy_tree(n, seed + 1)
    times = []
    for _ in range(repeat):
        stats = {}
        shared_stars_fast(a, b, stats=stats)
        times.append(stats["star_seconds"])
    return statistics.median(times)


def criterion_6():
    small = _star_seconds(2000, SEED, 3)
    large = _star_seconds(20000, SEED, 1)
    ratio = large / small
    return report(6, ratio < 40, f"star phase {small:.2f}s at n=2000, {large:.2f}s at n=20000, ratio {ratio:.1f}")


def criterion_7():
    checks = []
    for n in (1, 2, 3):
        t = star_tree(n)
        checks.append(quartet_distance(t, t) == 0 == quartet_distance(t, caterpillar(n)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a, b = parse_newick("(1,(2,3));"), parse_newick("((1,2),3);")
    checks.append(quartet_distance(a, b) == 0 == quartet_distance(a, b, method="brute"))
    rng = random.Random(SEED + 7)
    for _ in range(20):
        n = rng.randint(4, 40)
        t = _tree(rng, n)
        checks.append(quartet_distance(t, t) == 0)
    for n in (4, 5, 10, 25, 60):
        checks.append(quartet_distance(star_tree(n), caterpillar(n)) == comb(n, 4))
        checks.append(quartet_distance(caterpillar(n), star_tree(n)) == comb(n, 4))
    bad = checks.count(False)
    return report(7, bad == 0, f"{len(checks)} degenerate cases, {bad} wrong")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("k", range(1, 8))
def test_criterion(k, capsys):
    ok, line = CRITERIA[k - 1]()
    with capsys.disabled():
        print(f"\n{line}")
    assert ok, line


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
