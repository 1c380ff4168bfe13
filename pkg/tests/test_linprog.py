import itertools
import random
from fractions import Fraction as F

from hypothesis import given, settings, strategies as st

from affinelogic.linalg import gauss_solve
from affinelogic.linprog import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_standard


def test_hand_lp_unique_optimum():
    # min x + y  s.t.  x + 2y = 4, 3x + 2y = 6, x,y >= 0  ->  (1, 3/2)
    res = solve_standard([[F(1), F(2)], [F(3), F(2)]], [F(4), F(6)], [F(1), F(1)])
    assert res.status == OPTIMAL
    assert res.x == (F(1), F(3, 2))
    assert res.value == F(5, 2)


def test_hand_lp_vertex_choice():
    # min -x  s.t.  x + y = 1  ->  all mass on x
    res = solve_standard([[F(1), F(1)]], [F(1)], [F(-1), F(0)])
    assert res.status == OPTIMAL
    assert res.x == (F(1), F(0))
    assert res.value == -1


def test_unbounded():
    # min -x  s.t.  x - y = 0: x = y -> -x unbounded below
    res = solve_standard([[F(1), F(-1)]], [F(0)], [F(-1), F(0)])
    assert res.status == UNBOUNDED


def test_infeasible_farkas():
    # x + y = 1 and x + y = 2 cannot both hold
    rows = [[F(1), F(1)], [F(1), F(1)]]
    b = [F(1), F(2)]
    res = solve_standard(rows, b, [F(0), F(0)])
    assert res.status == INFEASIBLE
    y = res.farkas
    for j in range(2):
        assert sum(yi * rows[i][j] for i, yi in enumerate(y)) <= 0
    assert sum(yi * b[i] for i, yi in enumerate(y)) > 0


def test_negative_rhs_handled():
    # -x = -2 with x >= 0 means x = 2
    res = solve_standard([[F(-1)]], [F(-2)], [F(1)])
    assert res.status == OPTIMAL
    assert res.x == (F(2),)


def test_redundant_rows_dropped():
    rows = [[F(1), F(1)], [F(2), F(2)]]
    res = solve_standard(rows, [F(1), F(2)], [F(1), F(2)])
    assert res.status == OPTIMAL
    assert res.value == 1


def test_degenerate_no_cycle():
    # classic degeneracy: duplicate tight constraints at the optimum
    rows = [
        [F(1), F(0), F(1), F(0), F(0)],
        [F(0), F(1), F(0), F(1), F(0)],
        [F(1), F(1), F(0), F(0), F(1)],
    ]
    b = [F(1), F(1), F(1)]
    cost = [F(-1), F(-1), F(0), F(0), F(0)]
    res = solve_standard(rows, b, cost)
    assert res.status == OPTIMAL
    assert res.value == -1


def _brute_force(rows, b, cost):
    """Enumerate basic solutions; exact but exponential."""
    m, n = len(rows), len(cost)
    feasible = False
    best = None
    for size in range(min(m, n) + 1):
        for cols in itertools.combinations(range(n), size):
            sol = gauss_solve([[row[j] for j in cols] for row in rows], b)
            if not sol.consistent or sol.free_count > 0:
                continue
            if any(v < 0 for v in sol.x):
                continue
            x = [F(0)] * n
            for j, v in zip(cols, sol.x):
                x[j] = v
            feasible = True
            val = sum(c * xi for c, xi in zip(cost, x))
            if best is None or val < best:
                best = val
    return feasible, best


@settings(max_examples=120, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_simplex_against_basic_solution_enumeration(seed):
    rng = random.Random(seed)
    m = rng.randint(1, 3)
    n = rng.randint(m, 5)
    rows = [[F(rng.randint(-2, 3)) for _ in range(n)] for _ in range(m)]
    b = [F(rng.randint(-2, 3)) for _ in range(m)]
    cost = [F(rng.randint(-3, 3)) for _ in range(n)]
    res = solve_standard(rows, b, cost)
    feasible, best = _brute_force(rows, b, cost)

    if res.status == INFEASIBLE:
        assert not feasible
        y = res.farkas
        for j in range(n):
            assert sum(yi * rows[i][j] for i, yi in enumerate(y)) <= 0
        assert sum(yi * b[i] for i, yi in enumerate(y)) > 0
    elif res.status == OPTIMAL:
        assert feasible
        # optimum is attained at a basic solution, so values must agree
        assert best is not None and res.value == best
        assert all(v >= 0 for v in res.x)
        for row, bi in zip(rows, b):
            assert sum(a * x for a, x in zip(row, res.x)) == bi
    else:
        assert res.status == UNBOUNDED
        assert feasible


def test_row_length_mismatch():
    import pytest

    with pytest.raises(ValueError):
        solve_standard([[F(1)]], [F(1)], [F(1), F(2)])
