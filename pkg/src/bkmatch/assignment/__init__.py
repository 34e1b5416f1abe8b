"""One-to-one extraction kernel with compiled and pure-Python backends.

The compiled module is preferred when its build succeeded; otherwise the
pure-Python twin takes over transparently. Both expose the identical
solve_square_max contract and produce identical assignments.
"""

from __future__ import annotations

import numpy as np

try:
    from bkmatch.assignment._core import solve_square_max as _solve

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on the build environment
    from bkmatch.assignment._py import solve_square_max as _solve

    BACKEND = "python"


def backend() -> str:
    """Name of the active solver backend: 'compiled' or 'python'."""
    return BACKEND


def max_weight_assignment(weights: np.ndarray) -> list[tuple[int, int]]:
    """Maximum-weight one-to-one assignment of a rectangular matrix.

    The matrix is padded with zeros to a square, solved exactly, and
    zero-weight pairs are dropped: a cell with weight 0 is never part of
    the result. Returns (row, col) pairs sorted by row.
    """
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if weights.ndim != 2:
        raise ValueError("weights must be a 2-D matrix")
    n, m = weights.shape
    size = max(n, m)
    if size == 0:
        return []
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ValueError("weights must be finite and non-negative")
    padded = np.zeros((size, size), dtype=np.float64)
    padded[:n, :m] = weights
    columns = _solve(padded)
    pairs = []
    for row in range(n):
        col = int(columns[row])
        if col < m and weights[row, col] > 0.0:
            pairs.append((row, col))
    return pairs
