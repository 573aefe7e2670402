"""Tests for the simplex LP kernel and the active-set QP."""

import logging

import numpy as np
import pytest

from approachability.core.errors import InfeasibleError, UnboundedError
from approachability.core.lp import find_feasible_point, solve_lp
from approachability.core.qp import project_polyhedron, simplex_least_squares, solve_qp


class TestSolveLP:
    """Tests for solve_lp."""

    def test_maximize_single_inequality(self):
        """Test the docstring example: max x + y s.t. x + 2y <= 4."""
        sol = solve_lp(np.array([1.0, 1.0]), A_ub=np.array([[1.0, 2.0]]), b_ub=np.array([4.0]), maximize=True)
        assert sol.objective == pytest.approx(4.0)
        np.testing.assert_allclose(sol.x, [4.0, 0.0], atol=1e-12)

    def test_minimize_with_equality(self):
        """Test min x1 + 2 x2 over the segment x1 + x2 = 1."""
        sol = solve_lp(np.array([1.0, 2.0]), A_eq=np.array([[1.0, 1.0]]), b_eq=np.array([1.0]))
        assert sol.objective == pytest.approx(1.0)
        np.testing.assert_allclose(sol.x, [1.0, 0.0], atol=1e-12)

    def test_redundant_equality_logged(self, caplog):
        """Test a repeated equality row is dropped with a warning and the optimum kept."""
        with caplog.at_level(logging.WARNING, logger="approachability.core.lp"):
            sol = solve_lp(
                np.array([1.0, 2.0]),
                A_eq=np.array([[1.0, 1.0], [1.0, 1.0]]),
                b_eq=np.array([1.0, 1.0]),
            )
        assert sol.objective == pytest.approx(1.0)
        np.testing.assert_allclose(sol.x, [1.0, 0.0], atol=1e-12)
        assert any("redundant constraint row" in r.getMessage() for r in caplog.records)

    def test_duals_certify_optimality(self):
        """Test that the multipliers are dual feasible and close the duality gap."""
        c = np.array([3.0, 2.0])
        A = np.array([[1.0, 1.0], [1.0, 3.0]])
        b = np.array([4.0, 6.0])
        sol = solve_lp(c, A_ub=A, b_ub=b, maximize=True)

        assert sol.objective == pytest.approx(12.0)
        assert np.all(sol.duals >= 0)
        assert np.all(A.T @ sol.duals >= c - 1e-9)
        assert b @ sol.duals == pytest.approx(sol.objective)

    def test_infeasible(self):
        """Test that x <= -1 with x >= 0 raises InfeasibleError."""
        with pytest.raises(InfeasibleError):
            solve_lp(np.array([1.0]), A_ub=np.array([[1.0]]), b_ub=np.array([-1.0]))

    def test_unbounded(self):
        """Test that max x over x >= 0 raises UnboundedError."""
        with pytest.raises(UnboundedError):
            solve_lp(np.array([1.0]), A_ub=np.array([[-1.0]]), b_ub=np.array([0.0]), maximize=True)

    def test_free_variables(self):
        """Test that free variables may go negative."""
        sol = solve_lp(np.array([1.0]), A_ub=np.array([[-1.0]]), b_ub=np.array([2.0]), free=True)
        np.testing.assert_allclose(sol.x, [-2.0])

    def test_degenerate_program_terminates(self):
        """Test Bland's rule on a classic cycling example."""
        c = np.array([-0.75, 150.0, -0.02, 6.0])
        A = np.array(
            [
                [0.25, -60.0, -0.04, 9.0],
                [0.5, -90.0, -0.02, 3.0],
                [0.0, 0.0, 1.0, 0.0],
            ]
        )
        b = np.array([0.0, 0.0, 1.0])
        sol = solve_lp(c, A_ub=A, b_ub=b)
        assert sol.objective == pytest.approx(-0.05)

    def test_deterministic(self):
        """Test that the returned vertex is the same on repeated calls."""
        c = np.array([1.0, 1.0, 1.0])
        A = np.array([[1.0, 1.0, 1.0]])
        first = solve_lp(c, A_ub=A, b_ub=np.array([1.0]), maximize=True)
        second = solve_lp(c, A_ub=A, b_ub=np.array([1.0]), maximize=True)
        np.testing.assert_array_equal(first.x, second.x)

    def test_shape_mismatch(self):
        """Test that constraint matrices with the wrong width are rejected."""
        with pytest.raises(ValueError, match="columns"):
            solve_lp(np.array([1.0, 1.0]), A_ub=np.array([[1.0]]), b_ub=np.array([1.0]))


class TestFeasiblePoint:
    """Tests for find_feasible_point."""

    def test_point_satisfies_constraints(self):
        """Test that the returned point lies in the polyhedron."""
        A = np.array([[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        b = np.array([1.0, 3.0, 3.0])
        x = find_feasible_point(A, b, 2)
        assert np.all(A @ x <= b + 1e-9)

    def test_empty_polyhedron(self):
        """Test that an empty polyhedron raises InfeasibleError."""
        with pytest.raises(InfeasibleError):
            find_feasible_point(np.array([[1.0], [-1.0]]), np.array([-1.0, -1.0]), 1)


class TestQP:
    """Tests for the active-set QP and its wrappers."""

    def test_unconstrained_minimum(self):
        """Test that an interior minimizer is returned unchanged."""
        x = solve_qp(np.eye(2), np.array([-0.2, -0.3]), A_ub=np.eye(2), b_ub=np.ones(2))
        np.testing.assert_allclose(x, [0.2, 0.3], atol=1e-10)

    def test_halfspace_projection(self):
        """Test projection onto {x1 + x2 <= 0}."""
        x = project_polyhedron(np.array([1.0, 1.0]), np.array([[1.0, 1.0]]), np.array([0.0]))
        np.testing.assert_allclose(x, [0.0, 0.0], atol=1e-10)

    def test_corner_projection(self):
        """Test projection onto the unit box corner."""
        A = np.vstack([np.eye(2), -np.eye(2)])
        b = np.array([1.0, 1.0, 0.0, 0.0])
        x = project_polyhedron(np.array([3.0, 2.0]), A, b)
        np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-10)

    def test_simplex_least_squares_hits_reachable_target(self):
        """Test that a target inside the convex hull is reproduced exactly."""
        M = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        p = simplex_least_squares(M, np.array([0.25, 0.5]))
        np.testing.assert_allclose(p, [0.25, 0.5, 0.25], atol=1e-8)
        assert p.sum() == pytest.approx(1.0)

    def test_simplex_least_squares_clips_to_simplex(self):
        """Test that an unreachable target gives the nearest simplex point."""
        M = np.eye(2)
        p = simplex_least_squares(M, np.array([2.0, 0.0]))
        np.testing.assert_allclose(p, [1.0, 0.0], atol=1e-8)
