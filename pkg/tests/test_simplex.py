"""Tests for the exact bounded-variable simplex"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import LinearProgramError
from src.helpers.simplex import BoundedSimplex, solve_bounded_lp

F = Fraction


def test_single_row_with_bounds():
    """x1 hits its bound, x2 takes the remainder"""
    result = solve_bounded_lp([(1,), (1,)], [F(3, 2)], [2, 1], [1, 1])
    assert result.is_optimal
    assert result.values == [1, F(1, 2)]
    assert result.objective == F(5, 2)


def test_two_rows():
    """x1 = x2 and x1 + x3 = 1 with everything at most 1"""
    columns = [(1, 1), (-1, 0), (0, 1)]
    result = solve_bounded_lp(columns, [0, 1], [1, 1, 1], [1, 1, 1])
    assert result.is_optimal
    assert result.objective == 2
    assert result.values == [1, 1, 0]


def test_negative_rhs():
    result = solve_bounded_lp([(-1,), (-1,)], [-1], [1, -1], [1, 1])
    assert result.is_optimal
    assert result.values == [1, 0]
    assert result.objective == 1


def test_infeasible():
    """Bounds too tight to meet the row"""
    result = solve_bounded_lp([(1,), (1,)], [3], [1, 1], [1, 1])
    assert result.status == 'infeasible'
    assert not result.is_optimal


def test_zero_upper_bound_stays_at_zero():
    result = solve_bounded_lp([(1,), (1,)], [F(1, 3)], [5, 1], [0, 1])
    assert result.values == [0, F(1, 3)]


def test_iteration_limit():
    result = solve_bounded_lp([(1,), (1,)], [1], [1, 2], [1, 1], max_iterations=0)
    assert result.status == 'iteration_limit'


@pytest.mark.parametrize('columns,rhs,objective,upper,message', [
    ([(1,), (1,)], [1], [1], [1, 1], "2 columns"),
    ([(1, 0)], [1], [1], [1], "column 0 has 2 entries"),
    ([(F(1, 2),)], [1], [1], [1], "not integral"),
    ([(1,)], [1], [1], [-1], "nonnegative"),
])
def test_malformed(columns, rhs, objective, upper, message):
    with pytest.raises(LinearProgramError, match=message):
        BoundedSimplex(columns, rhs, objective, upper)


coefficient = st.integers(min_value=-4, max_value=4)


@st.composite
def bounded_lps(draw):
    rows = draw(st.integers(min_value=1, max_value=3))
    n = draw(st.integers(min_value=rows, max_value=7))
    columns = [tuple(draw(coefficient) for _ in range(rows)) for _ in range(n)]
    # rhs from a feasible point keeps most instances feasible
    point = [F(draw(st.integers(0, 4)), 4) for _ in range(n)]
    rhs = [sum(col[i] * x for col, x in zip(columns, point)) for i in range(rows)]
    objective = [draw(coefficient) for _ in range(n)]
    return columns, rhs, objective, [1] * n


@settings(max_examples=60, deadline=None)
@given(bounded_lps())
def test_matches_floating_point_solver(lp):
    """Optimal value agrees with scipy's HiGHS solver"""
    columns, rhs, objective, upper = lp
    result = solve_bounded_lp(columns, rhs, objective, upper)
    assert result.is_optimal
    for i, b in enumerate(rhs):
        assert sum(col[i] * x for col, x in zip(columns, result.values)) == b
    assert all(0 <= x <= 1 for x in result.values)
    a_eq = [[col[i] for col in columns] for i in range(len(rhs))]
    reference = linprog([-c for c in objective], A_eq=a_eq, b_eq=[float(b) for b in rhs],
                        bounds=[(0, 1)] * len(columns), method='highs')
    assert reference.status == 0
    assert float(result.objective) == pytest.approx(-reference.fun, abs=1e-7)


def test_beale_cycling_example():
    """Beale's degenerate LP, which cycles under textbook Dantzig pivoting, still reaches 5/4"""
    columns = [(1, 1, 0), (-32, -24, 0), (-4, -1, 1), (36, 6, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    objective = [F(3, 4), -20, F(1, 2), -6, 0, 0, 0]
    upper = [100] * 7
    result = solve_bounded_lp(columns, [0, 0, 1], objective, upper)
    assert result.is_optimal
    assert result.objective == F(5, 4)
    assert result.values[0] == 1 and result.values[2] == 1
    assert result.pivots < 50
    a_eq = [[col[i] for col in columns] for i in range(3)]
    reference = linprog([-float(c) for c in objective], A_eq=a_eq, b_eq=[0, 0, 1],
                        bounds=[(0, 100)] * 7, method='highs')
    assert -reference.fun == pytest.approx(1.25, abs=1e-9)
