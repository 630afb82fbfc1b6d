#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

The kernel path is chosen at import time from MACOIR_NUMBA, so each mode runs
in a subprocess. Usage:

    python3 benchmarks/kernel_bench.py            # run both modes, print table
    python3 benchmarks/kernel_bench.py --inner    # (internal) one mode, JSON out
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def time_call(fn, *args, repeat=5):
    fn(*args)  # warm-up (includes JIT compilation on the numba path)
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def run_inner() -> None:
    from macoir import kernels
    from macoir.indexer import IndexerConfig, build_label_tree

    rng = np.random.default_rng(0)
    points = rng.normal(size=(20_000, 64))
    centroids = rng.normal(size=(10, 64))
    labels = rng.integers(0, 10, size=len(points))
    tree_points = rng.normal(size=(3_000, 64))

    results = {
        "numba": kernels.USE_NUMBA,
        "assign_nearest_20k_x10": time_call(kernels.assign_nearest, points, centroids),
        "pairwise_sqdist_20k_x10": time_call(kernels.pairwise_sqdist, points, centroids),
        "centroid_sums_20k": time_call(kernels.centroid_sums, points, labels, 10),
        "sqdist_to_vec_20k": time_call(kernels.sqdist_to_vec, points, centroids[0]),
        "label_tree_3k_x64": time_call(
            build_label_tree, tree_points, IndexerConfig(seed=0), repeat=2
        ),
    }
    print(json.dumps(results))


def run_outer() -> None:
    rows = []
    for label, flag in (("numba", "1"), ("numpy", "0")):
        env = dict(os.environ, MACOIR_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, __file__, "--inner"],
            capture_output=True, text=True, env=env, check=True,
        )
        rows.append((label, json.loads(out.stdout)))

    keys = [k for k in rows[0][1] if k != "numba"]
    width = max(len(k) for k in keys)
    header = f"{'kernel':<{width}} {'numba (s)':>12} {'numpy (s)':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    numba_res, numpy_res = rows[0][1], rows[1][1]
    if not numba_res["numba"]:
        print("note: numba unavailable; both columns ran the numpy path")
    for key in keys:
        a, b = numba_res[key], numpy_res[key]
        print(f"{key:<{width}} {a:>12.5f} {b:>12.5f} {b / a:>8.2f}x")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--inner", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.inner:
        run_inner()
    else:
        run_outer()


if __name__ == "__main__":
    main()
