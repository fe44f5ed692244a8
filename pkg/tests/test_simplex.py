"""Tests for the LP backends."""

from fractions import Fraction

import pytest

from ergopt.core.simplex import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    solve_equality_lp,
    solve_linear_system,
)

# max x1 + 2 x2  s.t.  x1 + x2 <= 4,  x1 + 3 x2 <= 6  (slacks in columns 2, 3)
A = [[1, 1, 1, 0], [1, 3, 0, 1]]
b = [4, 6]
c = [1, 2, 0, 0]


@pytest.mark.unit
class TestExactSimplex:
    def test_optimum_and_duals(self):
        solution = solve_equality_lp(A, b, c)
        assert solution.status == OPTIMAL
        assert solution.mode == "exact"
        assert solution.value == 5
        assert solution.x == [3, 1, 0, 0]
        assert solution.duals == [Fraction(1, 2), Fraction(1, 2)]
        assert all(isinstance(v, Fraction) for v in solution.x)

    def test_strong_duality(self):
        solution = solve_equality_lp(A, b, c)
        assert sum(y * bi for y, bi in zip(solution.duals, b)) == solution.value

    def test_minimize(self):
        solution = solve_equality_lp([[1, 2]], [4], [1, 1], sense="min")
        assert solution.value == 2
        assert solution.x == [0, 2]
        assert solution.duals == [Fraction(1, 2)]

    def test_infeasible(self):
        solution = solve_equality_lp([[1, 1]], [-1], [1, 1])
        assert solution.status == INFEASIBLE

    def test_unbounded(self):
        solution = solve_equality_lp([[1, -1]], [0], [1, 0])
        assert solution.status == UNBOUNDED

    def test_warm_basis_reaches_same_optimum(self):
        cold = solve_equality_lp(A, b, c)
        warm = solve_equality_lp(A, b, c, warm_basis=cold.basis)
        assert warm.value == cold.value
        assert warm.pivots <= cold.pivots

    def test_rejects_unknown_sense(self):
        with pytest.raises(ValueError):
            solve_equality_lp(A, b, c, sense="maximum")

    def test_records_metrics(self, metrics):
        solve_equality_lp(A, b, c)
        assert metrics.total_solves() == 1
        assert metrics.counters["lp_solves:mode=exact,status=optimal"] == 1


@pytest.mark.unit
class TestFloatSimplex:
    def test_optimum(self):
        solution = solve_equality_lp(A, b, c, mode="float")
        assert solution.status == OPTIMAL
        assert solution.mode == "float"
        assert solution.value == pytest.approx(5.0)
        assert solution.x == pytest.approx([3.0, 1.0, 0.0, 0.0], abs=1e-9)

    def test_minimize(self):
        solution = solve_equality_lp([[1, 2]], [4], [1, 1], sense="min", mode="float")
        assert solution.value == pytest.approx(2.0)

    def test_infeasible(self):
        assert solve_equality_lp([[1, 1]], [-1], [1, 1], mode="float").status == INFEASIBLE


@pytest.mark.unit
class TestLinearSystem:
    def test_unique_solution(self):
        assert solve_linear_system([[1, 1], [1, -1]], [3, 1]) == [2, 1]

    def test_inconsistent(self):
        with pytest.raises(ValueError):
            solve_linear_system([[1, 1], [1, 1]], [1, 2])

    def test_free_variables(self):
        with pytest.raises(ValueError):
            solve_linear_system([[1, 1]], [1])
        assert solve_linear_system([[1, 1]], [1], unique=False) == [1, 0]

    def test_redundant_rows_are_fine(self):
        assert solve_linear_system([[1, 0], [0, 1], [1, 1]], [1, 2, 3]) == [1, 2]
