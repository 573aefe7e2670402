"""Dense two-phase simplex method for small linear programs.

The tableau stores the constraint rows [A | b] of the standard form
min c.x s.t. A x = b, x >= 0 and a separate reduced-cost row. Bland's rule
(lowest index enters, lowest basic index leaves on ratio ties) guarantees
termination and makes the returned vertex a deterministic function of the
input.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import InfeasibleError, SolverError, UnboundedError

_logger = logging.getLogger(__name__)

# Pivot elements smaller than this are treated as zero
PIVOT_TOL = 1e-12

# Reduced costs above -COST_TOL count as nonnegative (optimality)
COST_TOL = 1e-11

# Phase-1 objective above this (relative to ||b||) means infeasible
FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class LPSolution:
    """Optimal vertex of a linear program.

    Attributes:
        x: Optimal values of the structural variables
        objective: Optimal objective value in the caller's sense (max or min)
        duals: One multiplier per constraint row, inequality rows first then
            equality rows. For a maximization with A_ub x <= b_ub the
            inequality multipliers are nonnegative and satisfy
            A_ub.T @ y_ub + A_eq.T @ y_eq >= c.
        iterations: Total number of pivots over both phases
    """

    x: np.ndarray
    objective: float
    duals: np.ndarray
    iterations: int


def _as_rows(A: Optional[np.ndarray], n: int) -> np.ndarray:
    if A is None:
        return np.zeros((0, n))
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[1] != n:
        raise ValueError(f"Constraint matrix has {A.shape[1]} columns, expected {n}")
    return A


def _as_vector(b: Optional[np.ndarray], m: int) -> np.ndarray:
    if b is None:
        return np.zeros(0)
    b = np.asarray(b, dtype=float).reshape(-1)
    if b.shape[0] != m:
        raise ValueError(f"Right-hand side has {b.shape[0]} entries, expected {m}")
    return b


class _Tableau:
    """Constraint rows plus basis bookkeeping for one simplex phase."""

    def __init__(self, rows: np.ndarray, basis: List[int], max_iter: int):
        self.T = rows
        self.basis = basis
        self.max_iter = max_iter
        self.iterations = 0

    def pivot(self, r: int, col: int) -> None:
        T = self.T
        T[r] /= T[r, col]
        factors = T[:, col].copy()
        factors[r] = 0.0
        T -= np.outer(factors, T[r])
        self.basis[r] = col

    def reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        n_cols = self.T.shape[1] - 1
        c_B = cost[self.basis]
        return cost - c_B @ self.T[:, :n_cols]

    def optimize(self, cost: np.ndarray, allowed: int) -> None:
        """Run Bland's-rule simplex over the first `allowed` columns."""
        T = self.T
        while True:
            d = self.reduced_costs(cost)[:allowed]
            entering = np.flatnonzero(d < -COST_TOL)
            if entering.size == 0:
                return
            col = int(entering[0])
            column = T[:, col]
            candidates = np.flatnonzero(column > PIVOT_TOL)
            if candidates.size == 0:
                raise UnboundedError("unbounded linear program")
            ratios = T[candidates, -1] / column[candidates]
            best = ratios.min()
            tied = candidates[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
            r = int(min(tied, key=lambda i: self.basis[i]))
            self.pivot(r, col)
            self.iterations += 1
            if self.iterations > self.max_iter:
                raise SolverError(
                    f"simplex exceeded {self.max_iter} pivots "
                    f"(tableau {T.shape[0]}x{T.shape[1]})"
                )


def solve_lp(
    c: np.ndarray,
    A_ub: Optional[np.ndarray] = None,
    b_ub: Optional[np.ndarray] = None,
    A_eq: Optional[np.ndarray] = None,
    b_eq: Optional[np.ndarray] = None,
    maximize: bool = False,
    free: bool = False,
) -> LPSolution:
    """
    Solve a small dense linear program with the two-phase simplex method.

    Variables are nonnegative unless `free` is set, in which case each
    variable is split into positive and negative parts.

    Args:
        c: Objective coefficients
        A_ub: Inequality matrix (rows A_ub x <= b_ub)
        b_ub: Inequality right-hand side
        A_eq: Equality matrix
        b_eq: Equality right-hand side
        maximize: Maximize instead of minimize
        free: Treat all variables as unrestricted in sign

    Returns:
        LPSolution with the optimal vertex and constraint multipliers

    Raises:
        InfeasibleError: If no point satisfies the constraints
        UnboundedError: If the objective is unbounded over the feasible set
        SolverError: If the pivot limit is exceeded

    Example:
        >>> sol = solve_lp(np.array([1.0, 1.0]), A_ub=np.array([[1.0, 2.0]]),
        ...                b_ub=np.array([4.0]), maximize=True)
        >>> sol.objective
        4.0
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.shape[0]
    A_ub = _as_rows(A_ub, n)
    A_eq = _as_rows(A_eq, n)
    b_ub = _as_vector(b_ub, A_ub.shape[0])
    b_eq = _as_vector(b_eq, A_eq.shape[0])

    if free:
        split = solve_lp(
            np.concatenate([c, -c]),
            np.hstack([A_ub, -A_ub]) if A_ub.shape[0] else None,
            b_ub if A_ub.shape[0] else None,
            np.hstack([A_eq, -A_eq]) if A_eq.shape[0] else None,
            b_eq if A_eq.shape[0] else None,
            maximize=maximize,
        )
        return LPSolution(
            x=split.x[:n] - split.x[n:],
            objective=split.objective,
            duals=split.duals,
            iterations=split.iterations,
        )

    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    cost = -c if maximize else c.copy()

    # Standard form columns: structural x, then one slack per inequality row
    A = np.zeros((m, n + m_ub))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    b = np.concatenate([b_ub, b_eq])
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b = b * sign

    # Rows whose slack is already a unit column start with it in the basis;
    # every other row gets an artificial variable
    n_std = n + m_ub
    basis: List[int] = []
    artificial_rows: List[int] = []
    for i in range(m):
        if i < m_ub and sign[i] > 0:
            basis.append(n + i)
        else:
            basis.append(n_std + len(artificial_rows))
            artificial_rows.append(i)
    n_art = len(artificial_rows)

    rows = np.zeros((m, n_std + n_art + 1))
    rows[:, :n_std] = A
    for k, i in enumerate(artificial_rows):
        rows[i, n_std + k] = 1.0
    rows[:, -1] = b

    max_iter = 50 * (m + n_std + n_art) + 1000
    tableau = _Tableau(rows, basis, max_iter)

    if n_art:
        phase1_cost = np.concatenate([np.zeros(n_std), np.ones(n_art)])
        tableau.optimize(phase1_cost, allowed=n_std + n_art)
        infeasibility = float(phase1_cost[tableau.basis] @ tableau.T[:, -1])
        if infeasibility > FEASIBILITY_TOL * max(1.0, float(np.abs(b).max(initial=0))):
            raise InfeasibleError(
                f"infeasible linear program (phase-1 residual {infeasibility:.3e})"
            )
        # Drive remaining artificials out of the basis; rows where that is
        # impossible are linear combinations of the others
        keep = []
        for r in range(m):
            if tableau.basis[r] < n_std:
                keep.append(r)
                continue
            candidates = np.flatnonzero(np.abs(tableau.T[r, :n_std]) > PIVOT_TOL)
            if candidates.size:
                tableau.pivot(r, int(candidates[0]))
                keep.append(r)
            else:
                _logger.warning(f"Dropping redundant constraint row {r}")
        tableau.T = np.hstack([tableau.T[keep, :n_std], tableau.T[keep, -1:]])
        tableau.basis = [tableau.basis[r] for r in keep]
        kept_rows = keep
    else:
        kept_rows = list(range(m))

    full_cost = np.concatenate([cost, np.zeros(m_ub)])
    tableau.optimize(full_cost, allowed=n_std)

    x_std = np.zeros(n_std)
    x_std[tableau.basis] = np.maximum(tableau.T[:, -1], 0.0)
    x = x_std[:n]

    duals = np.zeros(m)
    if kept_rows:
        A_B = A[np.ix_(kept_rows, tableau.basis)]
        try:
            pi = np.linalg.solve(A_B.T, full_cost[tableau.basis])
        except np.linalg.LinAlgError as e:
            raise SolverError(f"singular final basis: {e}") from e
        duals[kept_rows] = pi
    duals *= sign
    if maximize:
        duals = -duals
    # Inequality multipliers are sign-constrained; clear rounding noise
    if m_ub:
        duals[:m_ub] = np.maximum(duals[:m_ub], 0.0) if maximize else np.minimum(
            duals[:m_ub], 0.0
        )

    _logger.debug(f"LP {m}x{n} solved in {tableau.iterations} pivots")
    return LPSolution(
        x=x,
        objective=float(c @ x),
        duals=duals,
        iterations=tableau.iterations,
    )


def find_feasible_point(
    A_ub: Optional[np.ndarray],
    b_ub: Optional[np.ndarray],
    n: int,
    A_eq: Optional[np.ndarray] = None,
    b_eq: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Return some point of {x : A_ub x <= b_ub, A_eq x = b_eq} (x free).

    Raises:
        InfeasibleError: If the polyhedron is empty
    """
    sol = solve_lp(np.zeros(n), A_ub, b_ub, A_eq, b_eq, free=True)
    return sol.x
