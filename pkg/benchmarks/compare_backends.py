#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the same seeded workloads through both lanes, checks that every
accumulator is bit-identical, and reports throughput.

    python benchmarks/compare_backends.py [--orbit-steps 1000000] [--trials 20000]
"""

import argparse
import time

import numpy as np

from amdim import new_system
from amdim.engine import accumulate_orbit
from amdim.kernels import available_backends
from amdim.walks import walk_summary


def bench_orbit(backend: str, steps: int) -> tuple[float, object]:
    sys_, probs = new_system(0.1, 1.3, 0.5)
    t0 = time.perf_counter()
    acc = accumulate_orbit(sys_, probs, seed=0, burn_in=10_000, length=steps,
                           backend=backend)
    return time.perf_counter() - t0, acc


def bench_walks(backend: str, trials: int) -> tuple[float, object]:
    t0 = time.perf_counter()
    ws = walk_summary(0.5, 1.25, seed=0, trials=trials, cap=3000, backend=backend)
    return time.perf_counter() - t0, ws


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--orbit-steps", type=int, default=1_000_000)
    ap.add_argument("--trials", type=int, default=20_000)
    args = ap.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")

    results = {}
    for be in backends:
        dt, acc = bench_orbit(be, args.orbit_steps)
        results[be] = acc
        print(f"orbit  [{be:>8}]: {args.orbit_steps / dt / 1e6:8.2f} Msteps/s ({dt:.3f}s)")
    if len(backends) == 2:
        a, b = results["compiled"], results["python"]
        same = all(
            np.array_equal(getattr(a, f), getattr(b, f))
            for f in ("counts_M", "counts_left", "counts_right", "hist",
                      "tail_hist_left", "tail_hist_right", "integrand_sum")
        ) and a.final_state == b.final_state
        print(f"orbit accumulators bit-identical: {same}")
        if not same:
            return 1

    results = {}
    for be in backends:
        dt, ws = bench_walks(be, args.trials)
        results[be] = ws
        print(f"walks  [{be:>8}]: {args.trials / dt / 1e3:8.2f} ktrials/s ({dt:.3f}s)")
    if len(backends) == 2:
        a, b = results["compiled"], results["python"]
        same = (a.mean_n == b.mean_n and a.mean_s == b.mean_s
                and np.array_equal(a.batch_mean_n, b.batch_mean_n))
        print(f"walk summaries bit-identical: {same}")
        if not same:
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
