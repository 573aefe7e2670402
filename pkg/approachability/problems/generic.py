"""Inline vector games with a target set and a response rule.

Scenario files can describe a vector game directly by its payoff tensor
r(a, z) in R^d, a target set S and how to respond to q:

- auto: compute a response numerically. Balls and singletons use the
  simplex least-squares fit to the center; other polyhedral sets solve
  min_p max_i [A_S r(p, q) - b_S]_i over the simplex, which is zero exactly
  when some p lands in S
- constant: always play the same mixed action
"""

from typing import Any, Callable, Optional

import numpy as np

from ..algorithms.base import ResponseOracle
from ..core.errors import ScenarioError, UnsupportedQueryError
from ..core.games import MixedAction, VectorGame, as_mixed
from ..core.lp import solve_lp
from ..core.qp import simplex_least_squares
from ..core.registry import register_problem
from ..core.sets import Ball, Singleton, TargetSet
from .base import Problem, ProblemFactory

RESPONSE_RULES = ("auto", "constant")


def rewards_matrix(game: VectorGame, q: MixedAction) -> np.ndarray:
    """R_q with column a equal to r(delta_a, q), shape (dim, n_agent)."""
    return np.einsum("azk,z->ka", game.payoff, q.probs)


def least_violation_response(game: VectorGame, target: TargetSet, q: MixedAction) -> MixedAction:
    """
    p minimizing the largest constraint violation of r(p, q) in {A x <= b}.

    Solved as the LP min t s.t. A R_q p - t <= b, sum p = 1, p, t >= 0.
    """
    A, b = target.halfspaces()
    R = rewards_matrix(game, q)
    n_agent = game.n_agent
    A_ub = np.hstack([A @ R, -np.ones((A.shape[0], 1))])
    A_eq = np.append(np.ones(n_agent), 0.0)[None, :]
    cost = np.append(np.zeros(n_agent), 1.0)
    sol = solve_lp(cost, A_ub=A_ub, b_ub=b, A_eq=A_eq, b_eq=np.ones(1))
    return MixedAction.normalized(sol.x[:n_agent])


def auto_response(game: VectorGame, target: TargetSet) -> Callable[[MixedAction], MixedAction]:
    """Numerical response map for `target`; rejects sets it cannot handle."""
    if isinstance(target, (Ball, Singleton)):
        center = target.center if isinstance(target, Ball) else target.point

        def fit(q: MixedAction) -> MixedAction:
            return MixedAction.normalized(simplex_least_squares(rewards_matrix(game, q), center))

        return fit

    try:
        target.halfspaces()
    except UnsupportedQueryError as e:
        raise ScenarioError(
            f"response rule 'auto' needs a polyhedral or ball target, got {target!r}"
        ) from e

    def least_violation(q: MixedAction) -> MixedAction:
        return least_violation_response(game, target, q)

    return least_violation


def constant_response(action: Any, n_agent: int) -> Callable[[MixedAction], MixedAction]:
    p = as_mixed(action)
    if len(p) != n_agent:
        raise ScenarioError(f"constant response has {len(p)} entries, agent has {n_agent} actions")

    def constant(q: MixedAction) -> MixedAction:
        return p

    return constant


@register_problem("generic-vector")
class GenericVectorGame(ProblemFactory):
    @classmethod
    def build(
        cls,
        payoff: Any = None,
        target: Optional[TargetSet] = None,
        rule: str = "auto",
        action: Any = None,
        **_: Optional[Any],
    ) -> Problem:
        if target is None:
            raise ScenarioError("generic-vector problems need a target set")
        game = VectorGame(np.asarray(payoff, dtype=float))
        if rule == "auto":
            respond = auto_response(game, target)
        elif rule == "constant":
            if action is None:
                raise ScenarioError("response rule 'constant' needs an action")
            respond = constant_response(action, game.n_agent)
        else:
            raise ScenarioError(f"unknown response rule {rule!r}; expected one of {RESPONSE_RULES}")
        oracle = ResponseOracle(respond=respond, certified_set=target, name=f"generic/{rule}")
        return Problem(game, target, oracle, label="generic vector game")
