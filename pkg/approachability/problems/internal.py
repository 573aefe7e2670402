"""Internal (swap) regret as approachability of the nonpositive orthant.

Coordinate (a1, a2) measures the gain from having played a2 every time a1
was played: r_{a1,a2}(a, z) = u(a2, z) - u(a1, z) if a = a1, else 0.
Coordinates are flattened row-major, index a1 * n_agent + a2.
"""

from typing import Any, Optional, Sequence, Tuple

import numpy as np

from ..algorithms.base import ResponseOracle
from ..core.games import MixedAction, VectorGame
from ..core.registry import register_problem
from ..core.sets import NonpositiveOrthant
from .base import Problem, ProblemFactory, as_utility, best_response
from .external import AgentHistory, max_regret_summary


def internal_regret(
    agent: AgentHistory, opponent: Sequence[int], u: np.ndarray
) -> np.ndarray:
    """
    Average internal regret I_n(a, a') = (1/n) sum_k [a_k = a](u(a', z_k) - u(a, z_k)).

    With an (n, n_agent) array of mixed actions the indicator is replaced by
    p_k(a) (smoothed internal regret).

    Returns:
        Matrix I_n over A x A (zero diagonal)
    """
    u = as_utility(u)
    z = np.asarray(opponent, dtype=int).reshape(-1)
    if z.size == 0:
        raise ValueError("regret of an empty history is undefined")
    agent_arr = np.asarray(agent)
    n_agent = u.shape[0]
    if agent_arr.ndim == 2:
        weights = agent_arr.astype(float)
        if weights.shape != (z.size, n_agent):
            raise ValueError(
                f"mixed-action history has shape {weights.shape}, expected ({z.size}, {n_agent})"
            )
    else:
        a = agent_arr.astype(int).reshape(-1)
        if a.size != z.size:
            raise ValueError(f"{a.size} agent actions but {z.size} opponent actions")
        weights = np.zeros((z.size, n_agent))
        weights[np.arange(z.size), a] = 1.0
    columns = u[:, z]  # (n_agent, n)
    # gain[k, a, a'] = u(a', z_k) - u(a, z_k)
    gain = columns.T[:, None, :] - columns.T[:, :, None]
    return np.einsum("ka,kab->ab", weights, gain) / z.size


def build_internal_game(
    u: np.ndarray,
) -> Tuple[VectorGame, NonpositiveOrthant, ResponseOracle]:
    """
    Internal-regret vector game in R^{|A|^2}, its orthant target and oracle.

    The pure best response a* makes row a* equal to u(a2, q) - u(a*, q) <= 0
    and every other row 0.
    """
    u = as_utility(u)
    n_agent, n_opp = u.shape
    payoff = np.zeros((n_agent, n_opp, n_agent, n_agent))
    for a in range(n_agent):
        payoff[a, :, a, :] = u.T - u[a][:, None]
    game = VectorGame(payoff.reshape(n_agent, n_opp, n_agent * n_agent))
    target = NonpositiveOrthant(n_agent * n_agent)

    def respond(q: MixedAction) -> MixedAction:
        return MixedAction.pure(n_agent, best_response(u, q))

    return game, target, ResponseOracle(respond, target, name="internal best response")


@register_problem("internal")
class InternalRegret(ProblemFactory):
    @classmethod
    def build(cls, utility: Any = None, **_: Optional[Any]) -> Problem:
        u = as_utility(utility)
        game, target, oracle = build_internal_game(u)
        return Problem(
            game,
            target,
            oracle,
            utility=u,
            label="internal regret",
            summarize=max_regret_summary,
        )
