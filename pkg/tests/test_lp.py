import numpy as np
import pytest
from scipy.optimize import linprog as highs

from adaptive_eccm.errors import SolverError
from adaptive_eccm.lp import linprog


def test_textbook_problem():
    # max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
    res = linprog([-3, -5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert res.ok
    np.testing.assert_allclose(res.x, [2, 6], atol=1e-12)
    assert res.fun == pytest.approx(-36)


def test_infeasible_and_unbounded():
    assert linprog([1.0], [[1.0], [-1.0]], [-1.0, -1.0]).status == "infeasible"
    assert linprog([-1.0], [[-1.0]], [0.0]).status == "unbounded"
    assert linprog([1.0], bounds=[(2.0, 1.0)]).status == "infeasible"


def test_bounds_only():
    res = linprog([1.0, -1.0], bounds=[(-2.0, 3.0), (None, 5.0)])
    np.testing.assert_allclose(res.x, [-2.0, 5.0])


def test_free_variable():
    # min v s.t. v >= x - 1, v >= -x, x in [0, 1]  ->  v = -0.5
    res = linprog([0.0, 1.0], [[1.0, -1.0], [-1.0, -1.0]], [1.0, 0.0], [(0, 1), (None, None)])
    assert res.fun == pytest.approx(-0.5)


def test_degenerate_cycling_example():
    # Beale's example cycles under the largest-coefficient rule; Bland's rule terminates
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    res = linprog(c, A, [0, 0, 1])
    assert res.ok
    assert res.fun == pytest.approx(-0.05)


def test_iteration_cap():
    with pytest.raises(SolverError) as info:
        linprog([-3, -5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18], max_iter=1)
    assert "iterations" in info.value.diagnostics


def test_agrees_with_highs_on_random_problems(rng):
    mismatches = []
    for trial in range(300):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(0, 40))
        A = rng.normal(size=(m, n)) * 10.0 ** rng.integers(-6, 1, size=(m, 1))
        b = rng.normal(size=m) * 1e-2
        c = rng.normal(size=n)
        kinds = [(0, 1), (None, None), (-1, None), (None, 2)]
        bounds = [kinds[int(rng.integers(4))] for _ in range(n)]
        A2 = np.vstack([A, np.eye(n), -np.eye(n)])
        b2 = np.concatenate([b, 5 * np.ones(n), 5 * np.ones(n)])
        mine = linprog(c, A2, b2, bounds)
        ref = highs(c, A_ub=A2, b_ub=b2, bounds=bounds, method="highs")
        if (ref.status == 0) != mine.ok:
            mismatches.append((trial, ref.status, mine.status))
        elif mine.ok:
            assert abs(mine.fun - ref.fun) <= 1e-6
            assert np.all(A2 @ mine.x <= b2 + 1e-8)
    assert not mismatches
