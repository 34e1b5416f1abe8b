# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled square assignment solver; mirrors assignment._py exactly."""

import numpy as np


def solve_square_max(double[:, ::1] weights):
    """Max-weight perfect assignment on a square matrix; returns col per row."""
    cdef Py_ssize_t n = weights.shape[0]
    if weights.shape[1] != n:
        raise ValueError("square matrix required")
    result = np.empty(n, dtype=np.intp)
    if n == 0:
        return result

    cdef double INF = float("inf")
    u_arr = np.zeros(n + 1, dtype=np.float64)
    v_arr = np.zeros(n + 1, dtype=np.float64)
    minv_arr = np.empty(n + 1, dtype=np.float64)
    p_arr = np.zeros(n + 1, dtype=np.intp)
    way_arr = np.zeros(n + 1, dtype=np.intp)
    used_arr = np.zeros(n + 1, dtype=np.uint8)

    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] minv = minv_arr
    cdef Py_ssize_t[::1] p = p_arr
    cdef Py_ssize_t[::1] way = way_arr
    cdef unsigned char[::1] used = used_arr
    cdef Py_ssize_t[::1] out = result

    cdef Py_ssize_t i, j, i0, j0, j1
    cdef double cur, delta, ui0

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        for j in range(n + 1):
            minv[j] = INF
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = p[j0]
            delta = INF
            j1 = 0
            ui0 = u[i0]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = -weights[i0 - 1, j - 1] - ui0 - v[j]
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
        out[p[j] - 1] = j - 1
    return result
