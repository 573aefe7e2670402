"""Regret under average-cost constraints.

The agent must keep the average cost vector in a polyhedral set Gamma while
earning at least the best constrained reward in hindsight
u*_Gamma(q) = max_p {u(p, q) : c(p, q) in Gamma}. The satisficing set is
V*(q) = {(u, c) : u >= u*_Gamma(q), c in Gamma}.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import InfeasibleError, ScenarioError, UnsupportedQueryError
from ..core.games import MixedAction
from ..core.lp import solve_lp
from ..core.registry import register_problem
from ..core.sets import RecessionDirection, TargetSet
from .base import (
    Problem,
    ProblemFactory,
    SatisficingProblem,
    as_utility,
    best_response,
    build_generalized,
)

_logger = logging.getLogger(__name__)

# Slack on A c <= b when deciding whether the plain best response is feasible
CONSTRAINT_TOL = 1e-12


def as_cost_tensor(c: Any, shape: Tuple[int, int]) -> np.ndarray:
    """Cost tensor of shape (n_agent, n_opp, s); a matrix means s = 1."""
    c = np.array(c, dtype=float)
    if c.ndim == 2:
        c = c[:, :, None]
    if c.ndim != 3 or c.shape[:2] != shape or not np.all(np.isfinite(c)):
        raise ValueError(f"cost tensor must be finite with shape {shape} + (s,), got {c.shape}")
    return c


def constrained_response(
    u: np.ndarray,
    c: np.ndarray,
    gamma: Optional[TargetSet],
    q: MixedAction,
) -> Tuple[MixedAction, float]:
    """
    Best constrained response and its value u*_Gamma(q).

    Solves max_p u(p, q) s.t. A c(p, q) <= b, p in the simplex, where
    Gamma = {c : A c <= b}. When the plain best response already meets the
    constraint it is returned unchanged.

    Args:
        u: Utility matrix u(a, z)
        c: Cost tensor c(a, z) in R^s
        gamma: Polyhedral constraint set, None for no constraint
        q: Opponent mixed action

    Returns:
        (p, u*_Gamma(q))

    Raises:
        ScenarioError: If no mixed action meets the constraint at q
    """
    rewards = u @ q.probs
    costs = np.einsum("azs,z->as", c, q.probs)
    n_agent = u.shape[0]
    a_star = best_response(u, q)
    if gamma is None:
        return MixedAction.pure(n_agent, a_star), float(rewards[a_star])

    A, b = gamma.halfspaces()
    if np.all(A @ costs[a_star] <= b + CONSTRAINT_TOL):
        return MixedAction.pure(n_agent, a_star), float(rewards[a_star])
    try:
        sol = solve_lp(
            rewards,
            A_ub=A @ costs.T,
            b_ub=b,
            A_eq=np.ones((1, n_agent)),
            b_eq=np.ones(1),
            maximize=True,
        )
    except InfeasibleError as e:
        raise ScenarioError(
            f"constraint set is infeasible at q={np.round(q.probs, 6).tolist()}: "
            f"no mixed action keeps the expected cost in Gamma"
        ) from e
    p = MixedAction.normalized(sol.x)
    return p, float(rewards @ p.probs)


def _recession(gamma: Optional[TargetSet], s: int) -> List[RecessionDirection]:
    directions: List[RecessionDirection] = [(0, 1)]
    if gamma is None:
        return directions + [(1 + j, sign) for j in range(s) for sign in (1, -1)]
    try:
        directions += [(1 + j, sign) for j, sign in gamma.recession_directions()]
    except UnsupportedQueryError:
        _logger.warning("Gamma's recession cone is not a quadrant; only +u is exempt")
    return directions


def constrained_problem(
    u: np.ndarray, c: np.ndarray, gamma: Optional[TargetSet]
) -> SatisficingProblem:
    """Satisficing problem with payoff v(a, z) = (u(a, z), c(a, z))."""
    u = as_utility(u)
    c = as_cost_tensor(c, u.shape)
    if gamma is not None and gamma.dim != c.shape[2]:
        raise ValueError(f"Gamma has dimension {gamma.dim}, costs have {c.shape[2]}")

    def respond(q: MixedAction) -> MixedAction:
        return constrained_response(u, c, gamma, q)[0]

    def goal_residual(v: np.ndarray, q: MixedAction) -> float:
        shortfall = max(0.0, constrained_response(u, c, gamma, q)[1] - float(v[0]))
        violation = 0.0 if gamma is None else gamma.distance(v[1:])
        return shortfall + violation

    return SatisficingProblem(
        v=np.concatenate([u[:, :, None], c], axis=2),
        respond=respond,
        goal_residual=goal_residual,
        recession=_recession(gamma, c.shape[2]),
        name="constrained regret",
    )


def check_feasibility(
    u: np.ndarray,
    c: np.ndarray,
    gamma: Optional[TargetSet],
    rng: np.random.Generator,
    count: int = 20,
) -> None:
    """
    Verify the constraint is feasible at every pure q and `count` random q.

    Raises:
        ScenarioError: Naming the first q at which Gamma cannot be met
    """
    n_opp = u.shape[1]
    qs = [MixedAction.pure(n_opp, z) for z in range(n_opp)]
    qs += [MixedAction.normalized(rng.dirichlet(np.ones(n_opp))) for _ in range(count)]
    for q in qs:
        constrained_response(u, c, gamma, q)


@register_problem("constrained")
class ConstrainedRegret(ProblemFactory):
    @classmethod
    def build(
        cls,
        utility: Any = None,
        cost: Any = None,
        constraint: Optional[TargetSet] = None,
        **_: Optional[Any],
    ) -> Problem:
        u = as_utility(utility)
        c = as_cost_tensor(cost, u.shape)
        check_feasibility(u, c, constraint, np.random.default_rng(0))
        game, oracle = build_generalized(constrained_problem(u, c, constraint))
        s = c.shape[2]

        def summarize(average: np.ndarray) -> Dict[str, float]:
            costs = average[1 : 1 + s]
            q_bar = MixedAction.normalized(np.maximum(average[1 + s :], 0.0))
            return {
                "average_reward": float(average[0]),
                "constrained_best": constrained_response(u, c, constraint, q_bar)[1],
                "cost_violation": 0.0 if constraint is None else constraint.distance(costs),
            }

        return Problem(
            game,
            oracle.certified_set,
            oracle,
            utility=u,
            label="constrained regret",
            summarize=summarize,
        )
