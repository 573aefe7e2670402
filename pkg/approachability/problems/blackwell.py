"""Blackwell's no-regret embedding.

The reward (u(a, z), e_z) averages to (U_bar_n, q_bar_n); approaching
S = {(u, q) : u >= u*(q)} means the average utility is eventually no worse
than the best reward in hindsight against the empirical opponent play.
"""

from typing import Any, Optional, Tuple

import numpy as np

from ..algorithms.base import ResponseOracle
from ..core.games import MixedAction, VectorGame
from ..core.registry import register_problem
from .base import (
    GraphTarget,
    Problem,
    ProblemFactory,
    SatisficingProblem,
    as_utility,
    best_response,
    best_reward,
    build_generalized,
)


def classical_problem(u: np.ndarray) -> SatisficingProblem:
    """V*(q) = {v : v >= u*(q)} with the pure best response."""
    u = as_utility(u)
    n_agent = u.shape[0]

    def respond(q: MixedAction) -> MixedAction:
        return MixedAction.pure(n_agent, best_response(u, q))

    def goal_residual(v: np.ndarray, q: MixedAction) -> float:
        return max(0.0, best_reward(u, q) - float(v[0]))

    return SatisficingProblem(
        v=u[:, :, None],
        respond=respond,
        goal_residual=goal_residual,
        recession=[(0, 1)],
        name="best reward in hindsight",
    )


def build_blackwell_embedding(
    u: np.ndarray,
) -> Tuple[VectorGame, GraphTarget, ResponseOracle]:
    """
    Vector game in R^{1+|Z|} with the graph target {(u, q) : u >= u*(q)}.

    Returns:
        (game, target, oracle)
    """
    game, oracle = build_generalized(classical_problem(u))
    target = oracle.certified_set
    assert isinstance(target, GraphTarget)
    return game, target, oracle


@register_problem("blackwell")
class BlackwellEmbedding(ProblemFactory):
    @classmethod
    def build(cls, utility: Any = None, **_: Optional[Any]) -> Problem:
        u = as_utility(utility)
        game, target, oracle = build_blackwell_embedding(u)
        return Problem(game, target, oracle, utility=u, label="blackwell embedding")
