"""Compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--json]

Each row runs the same inputs through both implementations, checks that the
answers agree and prints the best-of-``repeat`` wall times.
"""

import argparse
import json
import random
import time

from qdk import kernels
from qdk.cycles import count_c4_multigraph
from qdk.graph import Multigraph
from qdk.trees import RootedTree, lca_depth_matrix, random_tree


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def random_weighted(n, p, wmax, rng):
    adj = [dict() for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                w = rng.randint(1, wmax)
                adj[u][v] = w
                adj[v][u] = w
    return adj


def bench_c4_weighted(rng, repeat):
    n = 400
    adj = random_weighted(n, 0.1, 5, rng)
    fast = lambda: kernels.c4_weighted(n, adj, use_extension=True)  # noqa: E731
    slow = lambda: kernels.c4_weighted(n, adj, use_extension=False)  # noqa: E731
    return f"c4_weighted n={n}", fast, slow


def bench_quartet_tally(rng, repeat):
    n = 40
    t1, t2 = random_tree(n, rng, 2, 4), random_tree(n, rng, 2, 4)
    labels = t1.labels()
    D1 = lca_depth_matrix(RootedTree(t1), labels)
    D2 = lca_depth_matrix(RootedTree(t2), labels)
    fast = lambda: kernels.quartet_tally(D1, D2, use_extension=True)  # noqa: E731
    slow = lambda: kernels.quartet_tally(D1, D2, use_extension=False)  # noqa: E731
    return f"quartet_tally n={n}", fast, slow


def bench_power_split(rng, repeat):
    n = 7
    edges = [(u, v, rng.randint(1, 1000)) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.6]
    g = Multigraph(n, edges)
    fast = lambda: count_c4_multigraph(g, method="auto")  # noqa: E731
    slow = lambda: count_c4_multigraph(g, method="symbolic")  # noqa: E731
    return f"power split n={n} mult<=1000", fast, slow


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    rows = []
    if not kernels.HAVE_EXTENSION:
        print("compiled extension not built; nothing to compare")
        return 1
    for make in (bench_c4_weighted, bench_quartet_tally, bench_power_split):
        name, fast, slow = make(rng, args.repeat)
        tf, a = best_of(fast, args.repeat)
        ts, b = best_of(slow, args.repeat)
        if a != b:
            raise SystemExit(f"{name}: results differ ({a} vs {b})")
        rows.append({"kernel": name, "cython_s": tf, "python_s": ts, "speedup": ts / tf if tf else float("inf")})
    if args.json:
        print(json.dumps({"seed": args.seed, "rows": rows}, indent=1))
    else:
        print(f"{'kernel':32s} {'cython':>10s} {'python':>10s} {'speedup':>8s}")
        for r in rows:
            print(f"{r['kernel']:32s} {r['cython_s']:10.4f} {r['python_s']:10.4f} {r['speedup']:8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
