#!/usr/bin/env python3
"""Benchmark the compiled simplex kernel against its pure-Python twin.

Two workloads:
  * raw random bounded-variable LPs (kernel in isolation), and
  * full scenario enumeration on the shipped grids (the kernel inside
    the dispatch + enumeration pipeline, warm starts included).

Both kernels must agree on every objective before a timing is reported.

Usage:  python3 benchmarks/bench_lp.py [--lps N] [--repeat K]
"""

import argparse
import pathlib
import sys
import time

import numpy as np

from gridshield import StopRule, enumerate_cas, parse_grid_file
from gridshield.lp import BACKEND, OPTIMAL, available_backends, set_backend

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def random_lp(rng, n_rows, n_cols):
    """A bounded LP with an identity slack block, so the all-slack basis
    is feasible (mirrors how the dispatch warm start is built)."""
    G = rng.uniform(-2.0, 2.0, size=(n_rows, n_cols))
    A = np.hstack([G, np.eye(n_rows)])
    lb = np.concatenate([np.zeros(n_cols), -50.0 * np.ones(n_rows)])
    ub = np.concatenate([rng.uniform(1.0, 10.0, n_cols), 50.0 * np.ones(n_rows)])
    x0 = np.concatenate([lb[:n_cols], np.zeros(n_rows)])
    b = A @ x0
    c = np.concatenate([rng.uniform(-1.0, 1.0, n_cols), np.zeros(n_rows)])
    basis = np.arange(n_cols, n_cols + n_rows, dtype=np.int64)
    return A, b, c, lb, ub, basis


def bench_raw(backends, n_lps, repeat):
    rng = np.random.default_rng(2024)
    problems = [random_lp(rng, rng.integers(5, 25), rng.integers(5, 40))
                for _ in range(n_lps)]
    objectives = {}
    timings = {}
    for name, kernel in backends.items():
        best = float("inf")
        for _ in range(repeat):
            start = time.perf_counter()
            objs = []
            for A, b, c, lb, ub, basis in problems:
                status, _, obj, _ = kernel.solve_bounded_lp(
                    A, b, c, lb, ub, basis.copy(), 0
                )
                objs.append(obj if status == OPTIMAL else None)
            best = min(best, time.perf_counter() - start)
        objectives[name] = objs
        timings[name] = best
    reference = objectives[next(iter(backends))]
    for name, objs in objectives.items():
        for i, (a, r) in enumerate(zip(objs, reference)):
            if (a is None) != (r is None) or (a is not None and abs(a - r) > 1e-7):
                sys.exit(f"kernel disagreement on LP {i}: {name} {a} vs {r}")
    return timings


def bench_pipeline(backends, repeat):
    grids = [
        (parse_grid_file(DATA / "ieee9.json"), 2),
        (parse_grid_file(DATA / "ieee30.json"), 2),
        (parse_grid_file(DATA / "cigre_mv.json"), 2),
    ]
    tops = {}
    timings = {}
    for name in backends:
        set_backend(name)
        best = float("inf")
        for _ in range(repeat):
            start = time.perf_counter()
            values = [
                enumerate_cas(grid, z, StopRule.unbounded(), jobs=1)
                .records[0]
                .lost_load_mw
                for grid, z in grids
            ]
            best = min(best, time.perf_counter() - start)
        tops[name] = values
        timings[name] = best
    reference = tops[next(iter(backends))]
    for name, values in tops.items():
        # Kernels may differ in the last ulp (different summation order);
        # the normative dispatch contract is 1e-6 MW.
        if any(abs(a - r) > 1e-6 for a, r in zip(values, reference)):
            sys.exit(f"kernel disagreement in pipeline: {name} {values} vs {reference}")
    return timings


def report(title, timings, unit_count, unit):
    print(f"\n{title}")
    base = timings.get("python")
    for name, seconds in timings.items():
        rate = unit_count / seconds
        speedup = f"  ({base / seconds:.1f}x vs python)" if base and name != "python" else ""
        print(f"  {name:>8}: {seconds * 1000:8.1f} ms   {rate:10.1f} {unit}/s{speedup}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lps", type=int, default=400,
                        help="random LP count for the raw workload (default 400)")
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repeats, best-of (default 3)")
    args = parser.parse_args()

    backends = available_backends()
    print(f"kernels available: {', '.join(backends)} (import default: {BACKEND})")
    if "compiled" not in backends:
        print("note: compiled kernel not built; benchmarking the fallback only")

    raw = bench_raw(backends, args.lps, args.repeat)
    report(f"raw kernel, {args.lps} random LPs (best of {args.repeat})",
           raw, args.lps, "LP")

    pipeline = bench_pipeline(backends, args.repeat)
    report(f"scenario enumeration on 3 shipped grids (best of {args.repeat})",
           pipeline, 3, "grid")

    set_backend(BACKEND if BACKEND in backends else "python")


if __name__ == "__main__":
    main()
