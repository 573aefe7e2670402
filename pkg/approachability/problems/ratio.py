"""Reward-to-cost ratio regret.

With a positive cost c(a, z) (for instance the duration of a stage), the
agent wants the ratio U_bar_n / C_bar_n of average reward to average cost to
be no worse than rho*(q_bar_n) = max_p u(p, q) / c(p, q). The maximum is
attained at a pure action, so the response is pure.
"""

from typing import Any, Dict, Optional

import numpy as np

from ..core.games import MixedAction
from ..core.registry import register_problem
from .base import Problem, ProblemFactory, SatisficingProblem, as_utility, build_generalized


def _check_costs(c: Any) -> np.ndarray:
    c = as_utility(c, "cost")
    if c.min() <= 0:
        raise ValueError(f"ratio costs must be strictly positive (min {c.min()!r})")
    return c


def ratio_response(u: np.ndarray, c: np.ndarray, q: MixedAction) -> int:
    """a* in argmax_a u(a, q) / c(a, q), lowest index on ties."""
    return int(np.argmax((u @ q.probs) / (c @ q.probs)))


def rho_star(u: np.ndarray, c: np.ndarray, q: MixedAction) -> float:
    """Best ratio in hindsight rho*(q) = max_a u(a, q) / c(a, q)."""
    return float(((u @ q.probs) / (c @ q.probs)).max())


def rho1_at_pure(u: np.ndarray, c: np.ndarray, z: int) -> float:
    """
    Attainable ratio goal at a pure opponent action z.

    At pure q the calibration envelope coincides with rho*, so this is
    rho*(delta_z).
    """
    u = as_utility(u)
    c = _check_costs(c)
    return rho_star(u, c, MixedAction.pure(u.shape[1], z))


def ratio_problem(u: np.ndarray, c: np.ndarray) -> SatisficingProblem:
    """V*(q) = {(u, c) : u >= rho*(q) c}, payoff v(a, z) = (u(a, z), c(a, z))."""
    u = as_utility(u)
    c = _check_costs(c)
    if u.shape != c.shape:
        raise ValueError(f"utility {u.shape} and cost {c.shape} shapes differ")
    n_agent = u.shape[0]

    def respond(q: MixedAction) -> MixedAction:
        return MixedAction.pure(n_agent, ratio_response(u, c, q))

    def goal_residual(v: np.ndarray, q: MixedAction) -> float:
        reward, cost = float(v[0]), float(v[1])
        if cost <= 0:
            return float("inf")
        return max(0.0, rho_star(u, c, q) * cost - reward)

    return SatisficingProblem(
        v=np.stack([u, c], axis=2),
        respond=respond,
        goal_residual=goal_residual,
        recession=[(0, 1)],
        name="reward-to-cost ratio",
    )


def ratio_summary(average: np.ndarray) -> Dict[str, float]:
    """U_bar / C_bar from the average (reward, cost, q) vector."""
    reward, cost = float(average[0]), float(average[1])
    return {
        "average_reward": reward,
        "average_cost": cost,
        "ratio": reward / cost if cost > 0 else float("nan"),
    }


@register_problem("ratio")
class RatioRegret(ProblemFactory):
    @classmethod
    def build(cls, utility: Any = None, cost: Any = None, **_: Optional[Any]) -> Problem:
        u = as_utility(utility)
        game, oracle = build_generalized(ratio_problem(u, cost))
        return Problem(
            game,
            oracle.certified_set,
            oracle,
            utility=u,
            label="ratio regret",
            summarize=ratio_summary,
        )
