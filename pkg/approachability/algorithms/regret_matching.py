"""Regret matching for external regret.

Plays actions with probability proportional to the positive parts of the
average regret vector; on the external-regret game this is Blackwell's
strategy for the nonpositive orthant, with d(L_n, orthant) <= rho/sqrt(n).
"""

from typing import Optional

import numpy as np

from ..core.errors import ScenarioError
from ..core.games import MixedAction, VectorGame, rewards_against_pure
from ..core.registry import register_algorithm
from ..core.sets import NonpositiveOrthant, TargetSet
from .base import BOUND_TOL, Approacher, PlannedStep, ResponseOracle, StepOutcome


def regret_matching_policy(regrets: np.ndarray) -> MixedAction:
    """
    Mixed action proportional to the positive parts of a regret vector.

    Args:
        regrets: Average regret L(a) for every action a

    Returns:
        p(a) = [L(a)]_+ / sum [L]_+, or uniform when no regret is positive

    Example:
        >>> regret_matching_policy(np.array([0.5, -0.2, 0.3])).probs
        array([0.625, 0.   , 0.375])
    """
    positive = np.maximum(np.asarray(regrets, dtype=float), 0.0)
    if positive.sum() <= 0:
        return MixedAction.uniform(positive.shape[0])
    return MixedAction.normalized(positive)


@register_algorithm("regret-matching")
class RegretMatching(Approacher):
    """Regret-matching baseline, valid on the external-regret game only."""

    gates_bound = True

    def __init__(
        self,
        game: VectorGame,
        target: TargetSet,
        oracle: Optional[ResponseOracle] = None,
        rho: Optional[float] = None,
    ):
        super().__init__(game, target, oracle, rho)
        if not isinstance(target, NonpositiveOrthant) or game.dim != game.n_agent:
            raise ScenarioError(
                "regret-matching runs on the external-regret game (one regret "
                "coordinate per agent action, nonpositive-orthant target)"
            )
        self.n = 0
        self.regret = np.zeros(game.dim)
        self.realized_bar = np.zeros(game.dim)

    def plan(self) -> PlannedStep:
        # Steering toward the orthant is minus the positive part of the regret
        direction = -np.maximum(self.regret, 0.0)
        return PlannedStep(
            p=regret_matching_policy(self.regret),
            direction=direction,
            game_value=0.0,
            degenerate=not np.any(direction),
        )

    def commit(self, plan: PlannedStep, a_n: int, z_n: int) -> StepOutcome:
        rewards = rewards_against_pure(self.game, plan.p)
        smoothed = rewards[z_n]
        realized = self.game.payoff[a_n, z_n]
        # Blackwell condition: [L]_+ . r(p, z) = 0 for every z
        positive = -plan.direction
        scale = max(1.0, float(np.linalg.norm(positive)) * self.rho)
        audit_pass = bool(np.abs(rewards @ positive).max() <= 1e-8 * scale)

        self.n += 1
        self.regret = self.regret + (smoothed - self.regret) / self.n
        self.realized_bar = self.realized_bar + (realized - self.realized_bar) / self.n
        dist = self.target.distance(self.regret)
        ratio = self._bound_ratio(dist, self.n)
        return StepOutcome(
            r_n=smoothed,
            realized=realized,
            steering_norm=dist,
            dist_to_S=dist,
            audit_pass=audit_pass,
            bound_ratio=ratio,
            bound_ok=dist <= self.rho / np.sqrt(self.n) + BOUND_TOL,
        )
