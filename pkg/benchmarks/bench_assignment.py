#!/usr/bin/env python3
"""Benchmark the assignment kernel: compiled extension vs pure Python.

Usage: python3 benchmarks/bench_assignment.py [--sizes 50,100,200,400] [--repeats 5]

Both backends solve identical random square grids; results are checked to
agree before timings are reported.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from bkmatch.assignment import backend
from bkmatch.assignment._py import solve_square_max as python_solve

try:
    from bkmatch.assignment._core import solve_square_max as compiled_solve
except ImportError:
    compiled_solve = None


def time_solver(solve, matrices, repeats):
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        for matrix in matrices:
            solve(matrix)
        samples.append(time.perf_counter() - started)
    return min(samples), statistics.median(samples)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="50,100,200,400")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--grids-per-size", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rng = np.random.default_rng(args.seed)

    print(f"active backend: {backend()}")
    if compiled_solve is None:
        print("compiled extension not built; timing pure Python only")
    print(f"{'size':>6} {'python best':>12} {'compiled best':>14} {'speedup':>8}")

    for size in sizes:
        matrices = [rng.uniform(0.0, 1.0, size=(size, size)) for _ in range(args.grids_per_size)]
        for matrix in matrices:
            matrix[rng.uniform(size=(size, size)) < 0.2] = 0.0

        if compiled_solve is not None:
            for matrix in matrices:
                assert list(python_solve(matrix)) == list(compiled_solve(matrix)), (
                    "backends disagree"
                )

        py_best, _ = time_solver(python_solve, matrices, args.repeats)
        if compiled_solve is not None:
            c_best, _ = time_solver(compiled_solve, matrices, args.repeats)
            print(f"{size:>6} {py_best:>11.4f}s {c_best:>13.4f}s {py_best / c_best:>7.1f}x")
        else:
            print(f"{size:>6} {py_best:>11.4f}s {'-':>14} {'-':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
