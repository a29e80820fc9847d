#!/usr/bin/env python3
"""Benchmark the compiled counting kernels against the pure-Python
fallback on representative workloads.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

from __future__ import annotations

import argparse
import time

from matchdiff import _kernels_py
from matchdiff.graphs import (builtin_graph, gen_regular_bipartite,
                              incidence_pg, random_lift)

try:
    from matchdiff import _kernels
except ImportError:
    _kernels = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench(name, py_fn, args, repeat=3):
    t_py, r_py = timeit(py_fn, *args, repeat=repeat)
    row = f"{name:<44s} pure {t_py * 1e3:10.2f} ms"
    if _kernels is not None:
        cy_fn = getattr(_kernels, py_fn.__name__)
        t_cy, r_cy = timeit(cy_fn, *args, repeat=repeat)
        assert [int(x) for x in r_cy] == [int(x) for x in r_py] \
            if isinstance(r_py, list) else r_cy == r_py, f"{name}: mismatch"
        row += f"   cython {t_cy * 1e3:10.2f} ms   speedup {t_py / t_cy:7.1f}x"
    print(row)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    opts = ap.parse_args()

    if _kernels is None:
        print("compiled kernels unavailable; timing pure-python only")

    g12 = gen_regular_bipartite(12, 3, seed=1)
    bench("match_poly_counts  n=12 r=3",
          _kernels_py.match_poly_counts, ([list(r) for r in g12.adj],))

    if not opts.quick:
        g16 = gen_regular_bipartite(16, 4, seed=1)
        bench("match_poly_counts  n=16 r=4",
              _kernels_py.match_poly_counts, ([list(r) for r in g16.adj],),
              repeat=1)

    hw3 = random_lift(builtin_graph("heawood"), 3, seed=2)  # n=21 cubic
    edges = [(u, hw3.n + v) for u, v in hw3.edges()]
    bench("match_upto_counts  n=21 r=3 j<=5",
          _kernels_py.match_upto_counts, (edges, 2 * hw3.n, 5), repeat=1)

    if not opts.quick:
        pg = incidence_pg(3)  # n=13, r=4
        pgl = random_lift(pg, 2, seed=3)
        edges = [(u, pgl.n + v) for u, v in pgl.edges()]
        bench("match_upto_counts  n=26 r=4 j<=5",
              _kernels_py.match_upto_counts, (edges, 2 * pgl.n, 5), repeat=1)

    cage = builtin_graph("tutte_12cage")
    bench("cycle_census_counts 12-cage s<=12",
          _kernels_py.cycle_census_counts, (cage.global_adj(), 12), repeat=1)


if __name__ == "__main__":
    main()
