"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 300] [--repeat 3]
"""
import argparse
import time

import numpy as np

from d2dcache import kernels
from d2dcache.graphcore import Graph


def random_digraph(n, out_degree, rng):
    edges = {}
    for u in range(n):
        for v in rng.choice(n - 1, size=min(out_degree, n - 1), replace=False):
            v = int(v) + (v >= u)
            edges[(u, v)] = float(rng.random())
    return Graph(n, [(u, v, w) for (u, v), w in edges.items()], directed=True)


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--degree", type=int, default=5)
    ap.add_argument("--contents", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    g = random_digraph(args.n, args.degree, rng)
    ip, ix, w = g.csr
    rip, rix, _ = g.reverse_csr
    within = rng.random((args.n, args.n)) < 0.3
    coef = rng.random(args.n)
    holders = (rng.random((args.contents, args.n)) < 0.3).astype(np.uint8)
    eligible = np.ones_like(holders)
    u = rng.random((2, args.contents, args.n))
    ue = rng.random((args.contents, len(ix)))

    cases = {
        "lex_trees": lambda m: m.lex_trees(ip, ix),
        "dijkstra_all": lambda m: m.dijkstra_all(ip, ix, w),
        "cover_sums": lambda m: m.cover_sums(rip, rix, within, coef),
        "spread_one_attempt": lambda m: m.spread_one_attempt(ip, ix, w, holders, eligible, u[0], u[1]),
        "spread_cascade": lambda m: m.spread_cascade(ip, ix, w, holders, eligible, ue),
    }
    backends = kernels.backends()
    print(f"N={args.n}, E={g.edge_count}, backends: {', '.join(backends)} (active: {kernels.BACKEND})")
    print(f"{'kernel':<20}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, call in cases.items():
        t = {b: best_of(lambda: call(mod), args.repeat) for b, mod in backends.items()}
        line = f"{name:<20}" + "".join(f"{t[b]:>11.4f}s" for b in backends)
        if "cython" in t:
            line += f"{t['python'] / t['cython']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
