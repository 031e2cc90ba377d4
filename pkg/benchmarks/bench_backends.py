#!/usr/bin/env python3
"""Throughput comparison of the two subset-scan backends.

The jitted kernels replace per-subset LAPACK dispatch with an in-place
one-sided Jacobi orthogonalization; the fallback batches whole subset
blocks through numpy's gufunc SVD. This script times both on scan shapes
typical for desk-scale certification and prints microseconds per subset.

Usage: python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import math
import time

import numpy as np

from sparsecert import kernels_numpy
from sparsecert.matops import subset_count

try:
    from sparsecert import kernels_numba
except ImportError:
    kernels_numba = None


def time_call(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench(repeats):
    rng = np.random.default_rng(0)
    cases = []
    for n, m, j in [(8, 12, 2), (8, 12, 4), (8, 12, 6), (6, 16, 3), (10, 20, 3)]:
        a = rng.standard_normal((n, m))
        a /= np.linalg.norm(a, axis=0)
        cases.append((f"sigma_min n={n} m={m} j={j}", subset_count(m, j),
                      lambda k, a=a, j=j: k.scan_sigma_min(a, j)))
        cases.append((f"eta       n={n} m={m} j={j}", subset_count(m, j),
                      lambda k, a=a, j=j: k.scan_eta(a, j)))
    for n, m in [(8, 12), (6, 16)]:
        a = rng.standard_normal((n, m))
        tol = 1e-12 * np.linalg.norm(a, 2)
        count = sum(subset_count(m, j) for j in range(1, n + 1))
        cases.append((f"g_scan    n={n} m={m}", count,
                      lambda k, a=a, tol=tol: k.scan_g(a, tol)))
        ell = 4
        count_nt = sum(subset_count(m, j) for j in range(1, ell + 1))
        cases.append((f"noisy     n={n} m={m} ell={ell}", count_nt,
                      lambda k, a=a, tol=tol: k.scan_noisy_tight(a, ell, 0.2, 0.1, tol)))

    backends = [("numpy", kernels_numpy)]
    if kernels_numba is not None:
        for _, _, fn in cases:
            fn(kernels_numba)  # compile before timing
        backends.append(("numba", kernels_numba))

    header = f"{'scan':<28}{'subsets':>9}" + "".join(f"{name + ' us/sub':>16}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, count, fn in cases:
        per = []
        for _, mod in backends:
            seconds = time_call(lambda: fn(mod), repeats)
            per.append(seconds / count * 1e6)
        line = f"{label:<28}{count:>9}" + "".join(f"{v:>16.3f}" for v in per)
        if len(per) == 2:
            line += f"{per[0] / per[1]:>9.2f}x"
        print(line)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    bench(parser.parse_args().repeats)
