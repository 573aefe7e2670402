"""External regret as approachability of the nonpositive orthant.

Coordinate a' of the vector reward is the regret for not having played a':
r_a'(a, z) = u(a', z) - u(a, z). The average reward is exactly the regret
vector L_n, so approaching the orthant is having no external regret.
"""

from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..algorithms.base import ResponseOracle
from ..algorithms.regret_matching import regret_matching_policy
from ..core.games import MixedAction, VectorGame
from ..core.registry import register_problem
from ..core.sets import NonpositiveOrthant
from .base import Problem, ProblemFactory, as_utility, best_response

__all__ = [
    "build_external_game",
    "external_regret",
    "max_regret_summary",
    "regret_matching_policy",
    "ExternalRegret",
]

AgentHistory = Union[Sequence[int], np.ndarray]


def _agent_utilities(
    agent: AgentHistory, opponent: Sequence[int], u: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-step utilities u(a_k, z_k) (or u(p_k, z_k)) and the z-columns."""
    z = np.asarray(opponent, dtype=int).reshape(-1)
    if z.size == 0:
        raise ValueError("regret of an empty history is undefined")
    columns = u[:, z]  # (n_agent, n)
    agent_arr = np.asarray(agent)
    if agent_arr.ndim == 2:
        # Mixed actions p_k, one row per step
        if agent_arr.shape != (z.size, u.shape[0]):
            raise ValueError(
                f"mixed-action history has shape {agent_arr.shape}, expected "
                f"({z.size}, {u.shape[0]})"
            )
        obtained = np.einsum("ka,ak->k", agent_arr.astype(float), columns)
    else:
        a = agent_arr.astype(int).reshape(-1)
        if a.size != z.size:
            raise ValueError(f"{a.size} agent actions but {z.size} opponent actions")
        obtained = u[a, z]
    return obtained, columns


def external_regret(
    agent: AgentHistory, opponent: Sequence[int], u: np.ndarray
) -> np.ndarray:
    """
    Average external regret L_n(a') = (1/n) sum_k u(a', z_k) - u(a_k, z_k).

    Args:
        agent: Realized actions a_k, or an (n, n_agent) array of mixed
            actions p_k for the smoothed regret
        opponent: Opponent actions z_k
        u: Utility matrix u(a, z)

    Returns:
        Regret vector over the agent's actions

    Raises:
        ValueError: If the history is empty or the lengths differ
    """
    u = as_utility(u)
    obtained, columns = _agent_utilities(agent, opponent, u)
    return (columns - obtained[None, :]).mean(axis=1)


def build_external_game(
    u: np.ndarray,
) -> Tuple[VectorGame, NonpositiveOrthant, ResponseOracle]:
    """
    External-regret vector game, its orthant target and the best-response oracle.

    The oracle answers q with the pure best response (lowest index on ties);
    every coordinate of r(a*, q) is u(a', q) - u(a*, q) <= 0.
    """
    u = as_utility(u)
    n_agent = u.shape[0]
    # payoff[a, z, a'] = u(a', z) - u(a, z)
    payoff = u.T[None, :, :] - u[:, :, None]
    game = VectorGame(payoff)
    target = NonpositiveOrthant(n_agent)

    def respond(q: MixedAction) -> MixedAction:
        return MixedAction.pure(n_agent, best_response(u, q))

    return game, target, ResponseOracle(respond, target, name="external best response")


def max_regret_summary(average: np.ndarray) -> Dict[str, float]:
    """Largest coordinate of an average regret vector."""
    return {"max_regret": float(np.max(average))}


@register_problem("external")
class ExternalRegret(ProblemFactory):
    @classmethod
    def build(cls, utility: Any = None, **_: Optional[Any]) -> Problem:
        u = as_utility(utility)
        game, target, oracle = build_external_game(u)
        return Problem(
            game,
            target,
            oracle,
            utility=u,
            label="external regret",
            summarize=max_regret_summary,
        )
