"""Primal active-set method for small convex quadratic programs.

Used for Euclidean projection onto polyhedra and for least-squares responses
over the probability simplex. Problems here have a handful of variables and
constraints, so each working-set subproblem is solved directly from its KKT
system.
"""

from typing import List, Optional

import numpy as np

from .errors import SolverError
from .lp import find_feasible_point

ACTIVE_TOL = 1e-10
STEP_TOL = 1e-12


def solve_qp(
    H: np.ndarray,
    g: np.ndarray,
    A_ub: Optional[np.ndarray] = None,
    b_ub: Optional[np.ndarray] = None,
    A_eq: Optional[np.ndarray] = None,
    b_eq: Optional[np.ndarray] = None,
    x0: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Minimize 0.5 x.H.x + g.x subject to A_ub x <= b_ub and A_eq x = b_eq.

    Args:
        H: Symmetric positive (semi)definite matrix
        g: Linear term
        A_ub, b_ub: Inequality constraints
        A_eq, b_eq: Equality constraints
        x0: Feasible starting point; found by LP when omitted

    Returns:
        Minimizer x

    Raises:
        InfeasibleError: If the constraints admit no point
        SolverError: If the working-set iteration does not converge
    """
    H = np.asarray(H, dtype=float)
    g = np.asarray(g, dtype=float).reshape(-1)
    n = g.shape[0]
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, float).reshape(-1)
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, float).reshape(-1)
    m_eq = A_eq.shape[0]

    if x0 is None:
        x = find_feasible_point(A_ub, b_ub, n, A_eq, b_eq)
    else:
        x = np.asarray(x0, dtype=float).copy()

    # Initial working set: active inequalities that keep the rows independent
    working: List[int] = []
    for i in np.flatnonzero(np.abs(A_ub @ x - b_ub) <= ACTIVE_TOL):
        rows = np.vstack([A_eq, A_ub[working + [int(i)]]])
        if np.linalg.matrix_rank(rows) == rows.shape[0]:
            working.append(int(i))

    max_iter = 20 * (A_ub.shape[0] + n) + 100
    for _ in range(max_iter):
        A_w = np.vstack([A_eq, A_ub[working]])
        k = A_w.shape[0]
        kkt = np.zeros((n + k, n + k))
        kkt[:n, :n] = H
        kkt[:n, n:] = A_w.T
        kkt[n:, :n] = A_w
        rhs = np.concatenate([-(H @ x + g), np.zeros(k)])
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        step, multipliers = sol[:n], sol[n:]

        if np.linalg.norm(step) <= STEP_TOL * max(1.0, np.linalg.norm(x)):
            ineq = multipliers[m_eq:]
            if ineq.size == 0 or ineq.min() >= -ACTIVE_TOL:
                return x
            working.pop(int(np.argmin(ineq)))
            continue

        alpha, blocking = 1.0, None
        slopes = A_ub @ step
        for i in np.flatnonzero(slopes > STEP_TOL):
            if i in working:
                continue
            ratio = max(b_ub[i] - A_ub[i] @ x, 0.0) / slopes[i]
            if ratio < alpha:
                alpha, blocking = ratio, int(i)
        x = x + alpha * step
        if blocking is not None:
            working.append(blocking)

    raise SolverError(f"active-set QP did not converge in {max_iter} iterations")


def project_polyhedron(
    x: np.ndarray, A: np.ndarray, b: np.ndarray, x0: Optional[np.ndarray] = None
) -> np.ndarray:
    """Euclidean projection of x onto {y : A y <= b}."""
    x = np.asarray(x, dtype=float)
    if np.all(A @ x <= b + 1e-12 * np.maximum(1.0, np.abs(b))):
        return x.copy()
    n = x.shape[0]
    return solve_qp(np.eye(n), -x, A, b, x0=x0)


def simplex_least_squares(M: np.ndarray, target: np.ndarray) -> np.ndarray:
    """
    Minimize ||M p - target||^2 over the probability simplex.

    A small ridge keeps the Hessian definite when M has dependent columns.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[1]
    H = M.T @ M + 1e-12 * np.eye(n)
    g = -M.T @ np.asarray(target, dtype=float)
    p = solve_qp(
        H,
        g,
        A_ub=-np.eye(n),
        b_ub=np.zeros(n),
        A_eq=np.ones((1, n)),
        b_eq=np.ones(1),
        x0=np.full(n, 1.0 / n),
    )
    p = np.maximum(p, 0.0)
    return p / p.sum()
