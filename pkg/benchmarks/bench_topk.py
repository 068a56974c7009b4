#!/usr/bin/env python3
"""Benchmark the top-k cosine scan: compiled kernel vs numpy fallback.

Usage: python3 benchmarks/bench_topk.py [--repeats 200] [--k 2]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from courseaide.knowledge import _simscan_py
from courseaide.knowledge.simscan import USING_NATIVE

try:
    from courseaide.knowledge import _simscan

    HAVE_NATIVE = True
except ImportError:
    _simscan = None
    HAVE_NATIVE = False


def run_one(impl, matrix, query, k, repeats):
    impl.topk_scan(matrix, query, k, None)  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        impl.topk_scan(matrix, query, k, None)
    return (time.perf_counter() - start) / repeats


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--k", type=int, default=2)
    parser.add_argument("--dim", type=int, default=64)
    args = parser.parse_args()

    print(f"top-{args.k} scan, dim={args.dim}, {args.repeats} repeats per size")
    print(f"{'rows':>9} | {'numpy fallback':>15} | {'compiled':>12} | speedup")
    print("-" * 58)

    rng = np.random.default_rng(0)
    for n in (1_000, 10_000, 100_000, 500_000):
        matrix = rng.normal(size=(n, args.dim))
        matrix /= np.linalg.norm(matrix, axis=1, keepdims=True)
        matrix = np.ascontiguousarray(matrix)
        query = rng.normal(size=args.dim)
        query /= np.linalg.norm(query)

        t_py = run_one(_simscan_py, matrix, query, args.k, args.repeats)
        if HAVE_NATIVE:
            t_c = run_one(_simscan, matrix, query, args.k, args.repeats)
            idx_py, _ = _simscan_py.topk_scan(matrix, query, args.k, None)
            idx_c, _ = _simscan.topk_scan(matrix, query, args.k, None)
            assert idx_py.tolist() == idx_c.tolist(), "implementations disagree"
            print(f"{n:>9} | {t_py * 1e3:>13.3f}ms | {t_c * 1e3:>10.3f}ms | {t_py / t_c:>6.2f}x")
        else:
            print(f"{n:>9} | {t_py * 1e3:>13.3f}ms | {'(not built)':>12} |")

    print()
    print(f"import-time selection: {'compiled kernel' if USING_NATIVE else 'numpy fallback'}")


if __name__ == "__main__":
    main()
