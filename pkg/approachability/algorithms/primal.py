"""Blackwell's projection-based approachability strategy.

When the average reward is outside S, the agent projects it onto S and
plays the maximizer of the game projected on the direction pointing from
the average to its projection. Inside S any action will do; uniform is used.
"""

from typing import Optional

import numpy as np

from ..core.games import (
    MixedAction,
    VectorGame,
    project_game,
    rewards_against_pure,
    solve_zero_sum,
)
from ..core.registry import register_algorithm
from ..core.sets import MEMBERSHIP_TOL, TargetSet
from .base import Approacher, PlannedStep, ResponseOracle, StepOutcome

SEPARATION_TOL = 1e-8


def primal_plan(r_bar: np.ndarray, target: TargetSet, game: VectorGame) -> PlannedStep:
    """
    Plan one step of the projection-based strategy.

    Args:
        r_bar: Average reward after n - 1 steps
        target: Convex target set supporting projection
        game: The vector game

    Returns:
        PlannedStep whose direction is project(S, r_bar) - r_bar (zero and
        uniform p when r_bar is already in S)
    """
    if target.contains(r_bar, MEMBERSHIP_TOL):
        return PlannedStep(
            p=MixedAction.uniform(game.n_agent),
            direction=np.zeros(game.dim),
            game_value=0.0,
            degenerate=True,
        )
    direction = target.project(r_bar) - r_bar
    saddle = solve_zero_sum(project_game(game, direction))
    return PlannedStep(p=saddle.p, direction=direction, game_value=saddle.value)


@register_algorithm("primal-blackwell")
class PrimalBlackwell(Approacher):
    """Projection-based baseline; audited by the separating-hyperplane test."""

    needs_projection = True

    def __init__(
        self,
        game: VectorGame,
        target: TargetSet,
        oracle: Optional[ResponseOracle] = None,
        rho: Optional[float] = None,
    ):
        super().__init__(game, target, oracle, rho)
        self.n = 0
        self.r_bar = np.zeros(game.dim)
        self.realized_bar = np.zeros(game.dim)

    def plan(self) -> PlannedStep:
        return primal_plan(self.r_bar, self.target, self.game)

    def commit(self, plan: PlannedStep, a_n: int, z_n: int) -> StepOutcome:
        rewards = rewards_against_pure(self.game, plan.p)
        smoothed = rewards[z_n]
        realized = self.game.payoff[a_n, z_n]

        # With c the projection of r_bar_{n-1}, approachability of a convex S
        # means direction . (r(p_n, z) - c) >= 0 for every z
        audit_pass = True
        if not plan.degenerate:
            anchor = self.r_bar + plan.direction
            gaps = (rewards - anchor) @ plan.direction
            scale = max(1.0, float(np.linalg.norm(plan.direction)) * self.rho)
            audit_pass = bool(gaps.min() >= -SEPARATION_TOL * scale)

        self.n += 1
        self.r_bar = self.r_bar + (smoothed - self.r_bar) / self.n
        self.realized_bar = self.realized_bar + (realized - self.realized_bar) / self.n
        dist = self.target.distance(self.r_bar)
        return StepOutcome(
            r_n=smoothed,
            realized=realized,
            steering_norm=None,
            dist_to_S=dist,
            audit_pass=audit_pass,
            bound_ratio=None,
            bound_ok=True,
        )
