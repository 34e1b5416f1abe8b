from __future__ import annotations

import random

import numpy as np
import pytest

from bkmatch.assignment import BACKEND, backend, max_weight_assignment
from bkmatch.assignment._py import solve_square_max as py_solve
from support import oracle_max_assignment_total

try:
    from bkmatch.assignment._core import solve_square_max as compiled_solve

    BACKENDS = [("python", py_solve), ("compiled", compiled_solve)]
except ImportError:  # pure-Python install
    BACKENDS = [("python", py_solve)]


def extract_pairs(weights, solver):
    """Mirror of the public filter, but with a pluggable square solver."""
    n, m = weights.shape
    side = max(n, m)
    square = np.zeros((side, side), dtype=np.float64)
    square[:n, :m] = weights
    cols = solver(square)
    return [(i, int(cols[i])) for i in range(n) if cols[i] < m and weights[i, cols[i]] > 0.0]


def total_of(weights, pairs):
    total = 0.0
    for i, j in sorted(pairs):
        total += weights[i, j]
    return total


class TestPublicApi:
    def test_simple_choice(self):
        w = np.array([[0.9, 0.2], [0.8, 0.85]])
        assert max_weight_assignment(w) == [(0, 0), (1, 1)]

    def test_rectangular(self):
        w = np.array([[0.1, 0.9]])
        assert max_weight_assignment(w) == [(0, 1)]
        tall = np.array([[0.1], [0.9]])
        assert max_weight_assignment(tall) == [(1, 0)]

    def test_zero_cells_never_matched(self):
        w = np.zeros((3, 3))
        assert max_weight_assignment(w) == []
        w[1, 2] = 0.4
        assert max_weight_assignment(w) == [(1, 2)]

    def test_empty(self):
        assert max_weight_assignment(np.zeros((0, 0))) == []

    def test_one_to_one(self):
        rng = np.random.default_rng(7)
        w = rng.uniform(0.1, 1.0, size=(8, 5))
        pairs = max_weight_assignment(w)
        rows = [i for i, _ in pairs]
        cols = [j for _, j in pairs]
        assert len(rows) == len(set(rows))
        assert len(cols) == len(set(cols))
        assert len(pairs) == 5  # all positive, so the short side saturates

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            max_weight_assignment(np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            max_weight_assignment(np.array([[-0.1]]))
        with pytest.raises(ValueError):
            max_weight_assignment(np.array([[float("nan")]]))

    def test_backend_reported(self):
        assert backend() in ("compiled", "python")
        assert BACKEND == backend()


@pytest.mark.parametrize("name,solver", BACKENDS, ids=[n for n, _ in BACKENDS])
class TestAgainstBruteForce:
    def test_random_matrices(self, name, solver):
        rng = random.Random(20240817)
        for trial in range(300):
            n = rng.randint(1, 5)
            m = rng.randint(1, 5)
            w = np.zeros((n, m))
            for i in range(n):
                for j in range(m):
                    if rng.random() > 0.25:
                        w[i, j] = rng.uniform(0.01, 1.0)
            pairs = extract_pairs(w, solver)
            rows = [i for i, _ in pairs]
            cols = [j for _, j in pairs]
            assert len(rows) == len(set(rows)) and len(cols) == len(set(cols))
            assert total_of(w, pairs) == oracle_max_assignment_total(w)

    def test_identity_is_optimal_on_diagonal(self, name, solver):
        w = np.diag([0.5, 0.6, 0.7])
        assert extract_pairs(w, solver) == [(0, 0), (1, 1), (2, 2)]


def test_backends_agree_when_both_present():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(99)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        square = rng.uniform(0.0, 1.0, size=(n, n))
        square[rng.uniform(size=(n, n)) < 0.3] = 0.0
        a = py_solve(square)
        b = BACKENDS[1][1](square)
        assert list(a) == list(b)


def test_tie_break_prefers_lexicographic_pairs():
    # all weights equal: the extraction should settle on the diagonal
    w = np.full((2, 2), 0.5)
    assert max_weight_assignment(w) == [(0, 0), (1, 1)]
    w3 = np.full((3, 3), 0.25)
    assert max_weight_assignment(w3) == [(0, 0), (1, 1), (2, 2)]
