"""Support-function approachability via online gradient ascent.

For compact S, d(r, S) = max over ||theta|| <= 1 of theta.r - h_S(theta).
The agent runs online gradient ascent on f_r(theta) = theta.r - h_S(theta)
over the unit ball, using the supergradient r - s(theta) where s(theta) is a
support point, and plays p_n minimizing max_q theta_n.r(p, q). If S is
approachable, theta_n.r(p_n, q) <= h_S(theta_n) for all q, so the distance
is bounded by the ascent's average regret.
"""

from typing import Optional, Tuple

import numpy as np

from ..core.games import (
    ZERO_DIRECTION_TOL,
    MixedAction,
    VectorGame,
    project_game,
    rewards_against_pure,
    solve_zero_sum,
)
from ..core.registry import register_algorithm
from ..core.sets import TargetSet
from .base import Approacher, PlannedStep, ResponseOracle, StepOutcome

SEPARATION_TOL = 1e-8


def step_size(n: int, rho_g: float) -> float:
    """eta_n = 1 / (rho_g sqrt(n)); rho_g bounds the supergradient norm."""
    if rho_g <= 0:
        return 1.0 / np.sqrt(n)
    return 1.0 / (rho_g * np.sqrt(n))


def ogd_support_plan(
    theta_prev: np.ndarray,
    r_prev: Optional[np.ndarray],
    target: TargetSet,
    game: VectorGame,
    n: int,
    rho_g: Optional[float] = None,
) -> Tuple[np.ndarray, PlannedStep]:
    """
    Advance theta by one ascent step and plan p_n.

    Args:
        theta_prev: theta_{n-1} (zero at the start)
        r_prev: Smoothed reward of step n - 1, or None at n = 1 (no step)
        target: Compact target set
        game: The vector game
        n: Index of the step being planned (>= 1)
        rho_g: Supergradient bound; defaults to span + diameter(S)

    Returns:
        (theta_n, plan) where plan.direction = -theta_n and plan.p solves
        min_p max_q theta_n.r(p, q)
    """
    if rho_g is None:
        rho_g = game.span + target.diameter()
    theta = np.asarray(theta_prev, dtype=float).copy()
    if r_prev is not None:
        gradient = np.asarray(r_prev, dtype=float) - target.support_argmax(theta)
        theta = theta + step_size(n, rho_g) * gradient
        norm = np.linalg.norm(theta)
        if norm > 1.0:
            theta = theta / norm

    if np.linalg.norm(theta) <= ZERO_DIRECTION_TOL:
        plan = PlannedStep(
            p=MixedAction.uniform(game.n_agent),
            direction=np.zeros(game.dim),
            game_value=0.0,
            degenerate=True,
        )
        return theta, plan
    saddle = solve_zero_sum(project_game(game, -theta))
    return theta, PlannedStep(p=saddle.p, direction=-theta, game_value=-saddle.value)


@register_algorithm("ogd-support")
class OGDSupport(Approacher):
    """Online-gradient baseline for compact targets."""

    needs_compact = True

    def __init__(
        self,
        game: VectorGame,
        target: TargetSet,
        oracle: Optional[ResponseOracle] = None,
        rho: Optional[float] = None,
    ):
        super().__init__(game, target, oracle, rho)
        self.rho_g = self.rho + target.diameter()
        self.n = 0
        self.theta = np.zeros(game.dim)
        self.r_prev: Optional[np.ndarray] = None
        self.r_bar = np.zeros(game.dim)
        self.realized_bar = np.zeros(game.dim)

    def plan(self) -> PlannedStep:
        self.theta, plan = ogd_support_plan(
            self.theta, self.r_prev, self.target, self.game, self.n + 1, self.rho_g
        )
        return plan

    def commit(self, plan: PlannedStep, a_n: int, z_n: int) -> StepOutcome:
        rewards = rewards_against_pure(self.game, plan.p)
        smoothed = rewards[z_n]
        realized = self.game.payoff[a_n, z_n]

        theta = -plan.direction
        h = self.target.support(theta).require()
        scale = max(1.0, float(np.linalg.norm(theta)) * self.rho)
        separated = float((rewards @ theta).max()) <= h + SEPARATION_TOL * scale
        in_ball = float(np.linalg.norm(theta)) <= 1.0 + 1e-12

        self.n += 1
        self.r_prev = smoothed
        self.r_bar = self.r_bar + (smoothed - self.r_bar) / self.n
        self.realized_bar = self.realized_bar + (realized - self.realized_bar) / self.n
        dist = self.target.distance(self.r_bar)
        return StepOutcome(
            r_n=smoothed,
            realized=realized,
            steering_norm=None,
            dist_to_S=dist,
            audit_pass=separated and in_ball,
            bound_ratio=None,
            bound_ok=True,
        )
