"""Pure-Python square assignment solver (potential-based augmenting paths).

Minimises cost = -weight with the classic O(n^3) shortest-augmenting-path
scheme over row/column potentials. Column scans run in ascending index
order with strict improvement, so ties resolve deterministically.
"""

from __future__ import annotations

import numpy as np

INF = float("inf")


def solve_square_max(weights: np.ndarray) -> np.ndarray:
    """Max-weight perfect assignment on a square matrix; returns col per row."""
    n = weights.shape[0]
    if weights.shape != (n, n):
        raise ValueError("square matrix required")
    result = np.empty(n, dtype=np.intp)
    if n == 0:
        return result
    cost = (-weights).tolist()

    # 1-based potentials; p[j] is the row matched to column j, p[0] scratch
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = 0
            row = cost[i0 - 1]
            ui0 = u[i0]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    for j in range(1, n + 1):
        result[p[j] - 1] = j - 1
    return result
