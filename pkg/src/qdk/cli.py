"""``qdk`` command line.

Exit codes: 0 ok, 1 self-test mismatch, 2 unreadable input, 3 leaf label
mismatch, 4 too few edges for the tree reduction.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from math import comb
from pathlib import Path

from . import __version__, kernels
from .cycles import count_c4_codegree, count_c4_multigraph, count_c4_weighted
from .fast import quartet_distance
from .graph import GraphFormatError, Multigraph, brute_count_c4, parse_edge_list
from .reduction import bipartize, extract_c4, graph_to_trees
from .trees import NewickError, parse_newick, random_tree, to_newick

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_LABELS, EXIT_SMALL = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    try:
        return max(1, int(os.environ.get("QDK_THREADS", "1")))
    except ValueError:
        return 1


def _read_tree(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}", EXIT_PARSE) from exc
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return parse_newick(text)
    except NewickError as exc:
        where = f" at offset {exc.pos}" if exc.pos is not None else ""
        raise CliError(f"{path}: {exc}{where}", EXIT_PARSE) from exc


def _read_graph(path) -> Multigraph:
    try:
        return parse_edge_list(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}", EXIT_PARSE) from exc
    except GraphFormatError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from exc


# counts go out as decimal strings so no JSON reader rounds them
COUNT_KEYS = ("qd", "quartets", "c4")


def _emit(args, value: int, report: dict):
    if args.json:
        report = {k: (str(v) if k in COUNT_KEYS else v) for k, v in report.items()}
        print(json.dumps(report, sort_keys=True))
    else:
        print(value)


# --- subcommands ---------------------------------------------------------------------


def cmd_qdist(args) -> int:
    t1, t2 = _read_tree(args.tree1), _read_tree(args.tree2)
    if set(t1.node_of) != set(t2.node_of):
        raise CliError("trees have different leaf label sets", EXIT_LABELS)
    stats: dict = {}
    t0 = time.perf_counter()
    qd = quartet_distance(t1, t2, method=args.method, stats=stats)
    report = {
        "n": t1.n,
        "d": max(t1.max_degree(), t2.max_degree()),
        "method": args.method,
        "qd": qd,
        "quartets": comb(t1.n, 4),
        "seconds": time.perf_counter() - t0,
        "backend": kernels.BACKEND,
        "counters": {k: v for k, v in stats.items()},
    }
    _emit(args, qd, report)
    return EXIT_OK


def cmd_cycles(args) -> int:
    g = _read_graph(args.graph)
    t0 = time.perf_counter()
    m = args.method
    if m == "brute":
        c4 = brute_count_c4(g)
    elif m == "codegree":
        c4 = count_c4_codegree(g) if g.is_simple else count_c4_weighted(g)
    elif m == "reduction":
        c4 = count_c4_multigraph(g)
    else:
        c4 = count_c4_codegree(g) if g.is_simple else count_c4_multigraph(g)
    report = {
        "nodes": g.node_count,
        "edges": len(g.edges),
        "max_mult": g.max_mult,
        "method": m,
        "c4": c4,
        "seconds": time.perf_counter() - t0,
        "backend": kernels.BACKEND,
    }
    _emit(args, c4, report)
    return EXIT_OK


def _bipartite_input(g: Multigraph) -> Multigraph:
    if not g.is_simple:
        raise CliError("the tree reduction needs a simple graph", EXIT_PARSE)
    b = g if g.n_left is not None else bipartize(g)
    if len(b.edges) < 4:
        raise CliError(f"need at least 4 edges after bipartization, got {len(b.edges)}", EXIT_SMALL)
    return b


def cmd_reduce(args) -> int:
    g = _read_graph(args.graph)
    b = _bipartite_input(g)
    t1, t2, leaf_map = graph_to_trees(b)
    prefix = args.out_prefix or Path(args.graph).with_suffix("").as_posix()
    Path(f"{prefix}.t1.nwk").write_text(to_newick(t1) + "\n")
    Path(f"{prefix}.t2.nwk").write_text(to_newick(t2) + "\n")
    mapping = {str(label): [u + 1, v + 1] for label, (u, v) in leaf_map.items()}
    Path(f"{prefix}.map.json").write_text(json.dumps({"n_left": b.n_left, "leaves": mapping}, indent=1) + "\n")
    if args.json:
        print(json.dumps({"prefix": prefix, "leaves": len(leaf_map), "bipartized": g.n_left is None}))
    else:
        print(prefix)
    return EXIT_OK


def cmd_extract_c4(args) -> int:
    g = _read_graph(args.graph)
    if not g.is_simple:
        raise CliError("extract-c4 needs a simple graph", EXIT_PARSE)
    _bipartite_input(g)
    t0 = time.perf_counter()
    c4 = extract_c4(g, lambda a, b: quartet_distance(a, b, method=args.method))
    report = {
        "nodes": g.node_count,
        "edges": len(g.edges),
        "method": args.method,
        "c4": c4,
        "seconds": time.perf_counter() - t0,
    }
    _emit(args, c4, report)
    return EXIT_OK


# --- self-test --------------------------------------------------------------------------


def _random_multigraph(rng: random.Random, n: int, max_mult: int) -> Multigraph:
    edges = [(u, v, rng.randint(1, max_mult)) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
    return Multigraph(n, edges)


def _case(seed: int, size: int, index: int):
    """One self-test case; returns ``None`` or a failure record."""
    try:
        return _check(seed, size, index)
    except Exception as exc:  # a crash is a failure too
        return {"check": "exception", "error": f"{type(exc).__name__}: {exc}"}


def _check(seed: int, size: int, index: int):
    rng = random.Random(f"{seed}:{size}:{index}")
    n = max(4, size)
    kind = index % 3
    if kind == 0:
        deg = rng.choice([2, 3, 5, n])
        t1 = random_tree(n, rng, 2, deg)
        t2 = random_tree(n, rng, 2, rng.choice([2, 3, 5, n]))
        fast = quartet_distance(t1, t2, method="fast")
        brute = quartet_distance(t1, t2, method="brute")
        if fast != brute:
            return {"check": "qdist", "t1": to_newick(t1), "t2": to_newick(t2), "fast": str(fast), "brute": str(brute)}
    elif kind == 1:
        g = _random_multigraph(rng, min(n, 8), rng.choice([1, 6, 1000]))
        got, want = count_c4_multigraph(g), brute_count_c4(g)
        if got != want:
            edges = [list(e) for e in g.edges]
            return {"check": "c4", "nodes": g.node_count, "edges": edges, "got": str(got), "want": str(want)}
    else:
        g = _random_multigraph(rng, min(n, 9), 1)
        if len(bipartize(g).edges) >= 4:
            got, want = extract_c4(g, quartet_distance), brute_count_c4(g)
            if got != want:
                edges = [list(e) for e in g.edges]
                return {"check": "extract-c4", "nodes": g.node_count, "edges": edges, "got": str(got), "want": str(want)}
    return None


def run_selftest(seed: int, sizes, cases: int = 12, threads: int = 1, dump: str | None = None) -> dict:
    """Oracle checks at each size; the first failure per size is kept."""
    t0 = time.perf_counter()
    jobs = [(seed, s, i) for s in sizes for i in range(cases)]
    if threads > 1:
        with ProcessPoolExecutor(threads) as pool:
            results = list(pool.map(_case, *zip(*jobs)))
    else:
        results = [_case(*j) for j in jobs]
    failures = [dict(r, size=j[1], index=j[2]) for j, r in zip(jobs, results) if r is not None]
    report = {
        "seed": seed,
        "sizes": list(sizes),
        "cases": len(jobs),
        "failures": len(failures),
        "seconds": time.perf_counter() - t0,
        "backend": kernels.BACKEND,
    }
    if failures:
        # smallest failing instance first
        failures.sort(key=lambda f: (f["size"], f["index"]))
        path = Path(dump or "qdk-selftest-failure.json")
        path.write_text(json.dumps(failures[0], indent=1) + "\n")
        report["reproducer"] = str(path)
    return report


def cmd_selftest(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError as exc:
        raise CliError(f"bad --sizes: {args.sizes!r}", EXIT_PARSE) from exc
    report = run_selftest(args.seed, sizes, args.cases, _threads(args), args.out_prefix)
    if args.json:
        print(json.dumps(report, sort_keys=True))
    else:
        status = "ok" if not report["failures"] else f"FAILED, reproducer in {report['reproducer']}"
        print(f"selftest seed={args.seed} sizes={args.sizes} cases={report['cases']}: {status}")
    return EXIT_MISMATCH if report["failures"] else EXIT_OK


# --- entry point ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdk", description="Quartet distance and 4-cycle counting.")
    p.add_argument("--version", action="version", version=f"qdk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="print a JSON report")
        sp.add_argument("--threads", type=int, default=None, help="worker processes (default: $QDK_THREADS or 1)")

    q = sub.add_parser("qdist", help="quartet distance between two Newick trees")
    q.add_argument("tree1")
    q.add_argument("tree2")
    q.add_argument("--method", choices=["fast", "brute"], default="fast")
    common(q)
    q.set_defaults(func=cmd_qdist)

    c = sub.add_parser("cycles", help="count 4-cycles of an edge-list graph")
    c.add_argument("graph")
    c.add_argument("--method", choices=["auto", "brute", "codegree", "reduction"], default="auto")
    common(c)
    c.set_defaults(func=cmd_cycles)

    r = sub.add_parser("reduce", help="write the two trees of a graph")
    r.add_argument("graph")
    r.add_argument("--out-prefix", default=None)
    common(r)
    r.set_defaults(func=cmd_reduce)

    e = sub.add_parser("extract-c4", help="count 4-cycles through one quartet distance")
    e.add_argument("graph")
    e.add_argument("--method", choices=["fast", "brute"], default="fast")
    common(e)
    e.set_defaults(func=cmd_extract_c4)

    s = sub.add_parser("selftest", help="randomized oracle checks")
    s.add_argument("--seed", type=int, default=2024)
    s.add_argument("--sizes", default="4,8,16,24")
    s.add_argument("--cases", type=int, default=12, help="cases per size")
    s.add_argument("--out-prefix", default=None, help="where to dump a failing instance")
    common(s)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"qdk: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
