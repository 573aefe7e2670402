"""Response-based approachability and its variants.

Each step solves the zero-sum game obtained by projecting the vector game on
the steering direction lambda_{n-1} = r*_bar - r_bar. The agent plays the
maximizer p_n; the minimizer q*_n is answered by the response oracle, and the
resulting r*_n = r(p*_n, q*_n) in S is the step's target point. Because
lambda . r(p_n, z) >= value >= lambda . r*_n, the steering norm obeys

    n^2 ||lambda_n||^2 <= (n-1)^2 ||lambda_{n-1}||^2 + rho^2

and so d(r_bar_n, S) <= ||lambda_n|| <= rho / sqrt(n) against any opponent.

Variants:
- idling: the steering resets to 0 whenever the tracked average is in S and
  an arbitrary action is played while it stays there
- unbounded: coordinates along the set's recession directions are cleared
  from the steering direction when they point into -D_S
- realized: the averages use sampled rewards r(a_n, z_n); the bound then
  holds with probability 1 - delta at rate sqrt(6 rho^2 / (delta n))
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

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
from ..core.sets import MEMBERSHIP_TOL, TargetSet, steer_unbounded
from .base import (
    BOUND_TOL,
    Approacher,
    LearnerState,
    PlannedStep,
    ResponseOracle,
    StepOutcome,
    Variant,
)

_logger = logging.getLogger(__name__)

# Absolute and relative slack on the one-step recursion inequality
RECURSION_ABS_TOL = 1e-9
RECURSION_REL_TOL = 1e-12

# Slack on the descent term and saddle chain, scaled by max(1, ||lambda|| rho)
DESCENT_TOL = 1e-8


def plan_step(
    state: LearnerState,
    game: VectorGame,
    oracle: ResponseOracle,
    idle_action: Optional[int] = None,
) -> PlannedStep:
    """
    Plan step n = state.n + 1.

    Args:
        state: State after n - 1 steps
        game: The vector game
        oracle: Response oracle certified for the target set
        idle_action: Pure action to play instead of uniform when the
            steering direction is zero (idling runs only)

    Returns:
        PlannedStep with p_n, q*_n, p*_n, r*_n and the projected game value

    Raises:
        CertificationError: If r*_n is farther than 1e-6 from the target set
        SolverError: If the projected game cannot be solved
    """
    direction = state.steering(oracle.certified_set)
    if np.linalg.norm(direction) <= ZERO_DIRECTION_TOL:
        if idle_action is not None:
            p = MixedAction.pure(game.n_agent, idle_action)
        else:
            p = MixedAction.uniform(game.n_agent)
        q_star = MixedAction.uniform(game.n_opp)
        p_star, r_star = oracle.certify(game, q_star)
        return PlannedStep(
            p=p,
            direction=np.zeros(game.dim),
            game_value=0.0,
            q_star=q_star,
            p_star=p_star,
            r_star=r_star,
            degenerate=True,
        )

    saddle = solve_zero_sum(project_game(game, direction))
    p_star, r_star = oracle.certify(game, saddle.q)
    return PlannedStep(
        p=saddle.p,
        direction=direction,
        game_value=saddle.value,
        q_star=saddle.q,
        p_star=p_star,
        r_star=r_star,
    )


def _advance(
    state: LearnerState,
    r_star: np.ndarray,
    reward: np.ndarray,
    target: Optional[TargetSet],
    average_after: np.ndarray,
) -> np.ndarray:
    """New steering sum n * lambda_n for the state's variant."""
    if state.variant.idling:
        if target is None:
            raise ValueError("Idling runs need the target set to test membership")
        if target.contains(average_after, MEMBERSHIP_TOL):
            return np.zeros(state.dim)
    return state.steering_sum + (r_star - reward)


def idle_update(
    state: LearnerState,
    r_star: np.ndarray,
    r_n: np.ndarray,
    target: TargetSet,
) -> np.ndarray:
    """
    Idling steering update.

    lt_n = ((n-1) lt_{n-1} + r*_n - r_n) / n if the new average is outside
    S, else 0. Between resets lt_n equals the plain lambda restarted at the
    last time the average entered S.

    Args:
        state: State after n - 1 steps (idling mode)
        r_star: Target point r*_n
        r_n: Reward of step n in the variant's sense
        target: The target set S

    Returns:
        The new steering vector lt_n
    """
    n = state.n + 1
    average_after = _mean_update(state.tracked_average, r_n, n)
    idle_state = state if state.variant.idling else state.replace(
        variant=Variant(
            realized=state.variant.realized,
            idling=True,
            unbounded=state.variant.unbounded,
        )
    )
    return _advance(idle_state, r_star, r_n, target, average_after) / n


def _mean_update(average: np.ndarray, x: np.ndarray, n: int) -> np.ndarray:
    return ((n - 1) * average + x) / n


def commit_step(
    state: LearnerState,
    plan: PlannedStep,
    game: VectorGame,
    a_n: int,
    z_n: int,
    target: Optional[TargetSet] = None,
) -> LearnerState:
    """
    Fold step n into the running averages and the steering sum.

    Args:
        state: State after n - 1 steps
        plan: The step's plan (must carry r_star)
        game: The vector game
        a_n: Sampled agent action
        z_n: Observed opponent action
        target: Target set (required in idling mode)

    Returns:
        State after n steps
    """
    if plan.r_star is None:
        raise ValueError("commit_step needs a plan with a target point")
    n = state.n + 1
    smoothed = rewards_against_pure(game, plan.p)[z_n]
    realized = game.payoff[a_n, z_n]
    reward = realized if state.variant.realized else smoothed

    r_bar = _mean_update(state.r_bar, smoothed, n)
    realized_bar = _mean_update(state.realized_bar, realized, n)
    average_after = realized_bar if state.variant.realized else r_bar
    steering_sum = _advance(state, plan.r_star, reward, target, average_after)

    return LearnerState(
        n=n,
        r_bar=r_bar,
        r_star_bar=_mean_update(state.r_star_bar, plan.r_star, n),
        realized_bar=realized_bar,
        steering_sum=steering_sum,
        variant=state.variant,
    )


@dataclass(frozen=True)
class RecursionAudit:
    """Outcome of the one-step recursion audit.

    Attributes:
        lhs: n^2 ||s_n||^2 for the audited steering s
        rhs: (n-1)^2 ||s_{n-1}||^2 + 2 (n-1) s_{n-1}.(r*_n - r_n) + rho^2
        descent: s_{n-1}.(r*_n - r_n)
        recursion_ok: lhs <= rhs + tolerance
        descent_ok: descent <= tolerance (always True in realized mode)
    """

    lhs: float
    rhs: float
    descent: float
    recursion_ok: bool
    descent_ok: bool

    @property
    def passed(self) -> bool:
        return self.recursion_ok and self.descent_ok


def _audited(lam: np.ndarray, variant: Variant, target: Optional[TargetSet]) -> np.ndarray:
    if variant.unbounded:
        if target is None:
            raise ValueError("Auditing unbounded steering needs the target set")
        return steer_unbounded(lam, target)
    return lam


def audit_recursion(
    state_prev: LearnerState,
    state_next: LearnerState,
    plan: PlannedStep,
    r_n: np.ndarray,
    rho: float,
    target: Optional[TargetSet] = None,
) -> RecursionAudit:
    """
    Check n^2||s_n||^2 <= (n-1)^2||s_{n-1}||^2 + 2(n-1) s_{n-1}.(r*_n - r_n) + rho^2.

    s is the steering vector the variant actually uses (lambda, its idling
    version, or lambda with recession coordinates cleared). In smoothed
    modes the descent term s_{n-1}.(r*_n - r_n) must also be nonpositive up
    to 1e-8 * max(1, ||s_{n-1}|| rho).

    Args:
        state_prev: State before the step
        state_next: State after the step
        plan: The step's plan
        r_n: The step's reward in the variant's sense
        rho: Span of the game
        target: Target set (required for unbounded steering)

    Returns:
        RecursionAudit with the compared quantities
    """
    if plan.r_star is None:
        raise ValueError("audit_recursion needs a plan with a target point")
    n = state_next.n
    s_prev = _audited(state_prev.lam, state_prev.variant, target)
    s_next = _audited(state_next.lam, state_next.variant, target)
    increment = plan.r_star - r_n
    descent = float(s_prev @ increment)

    lhs = float(n * n * (s_next @ s_next))
    rhs = float((n - 1) ** 2 * (s_prev @ s_prev) + 2 * (n - 1) * descent + rho * rho)
    recursion_ok = lhs <= rhs + RECURSION_ABS_TOL + RECURSION_REL_TOL * abs(rhs)

    descent_ok = True
    if not state_prev.variant.realized:
        scale = max(1.0, float(np.linalg.norm(s_prev)) * rho)
        descent_ok = descent <= DESCENT_TOL * scale
    return RecursionAudit(
        lhs=lhs,
        rhs=rhs,
        descent=descent,
        recursion_ok=recursion_ok,
        descent_ok=descent_ok,
    )


def check_saddle_chain(game: VectorGame, plan: PlannedStep) -> bool:
    """lambda.r(p_n, z) >= value >= lambda.r*_n - tol for every pure z."""
    if plan.r_star is None:
        raise ValueError("check_saddle_chain needs a plan with a target point")
    scale = max(1.0, float(np.abs(project_game(game, plan.direction)).max()))
    tol = DESCENT_TOL * scale
    against_pure = rewards_against_pure(game, plan.p) @ plan.direction
    return bool(
        against_pure.min() >= plan.game_value - tol
        and plan.game_value >= float(plan.direction @ plan.r_star) - tol
    )


class ResponseBasedApproacher(Approacher):
    """Runs plan_step / commit_step / audit_recursion for one variant."""

    needs_oracle = True
    gates_bound = True
    variant = Variant()

    def __init__(
        self,
        game: VectorGame,
        target: TargetSet,
        oracle: Optional[ResponseOracle] = None,
        rho: Optional[float] = None,
        idle_action: Optional[int] = None,
    ):
        super().__init__(game, target, oracle, rho)
        if self.variant.unbounded:
            # Fails early for non-quadrant recession cones
            target.recession_directions()
        if idle_action is not None and not 0 <= idle_action < game.n_agent:
            raise ValueError(f"idle_action {idle_action} out of range")
        self.idle_action = idle_action if self.variant.idling else None
        self.state = LearnerState.initial(game.dim, self.variant)
        self.gates_bound = not self.variant.realized

    def plan(self) -> PlannedStep:
        assert self.oracle is not None
        return plan_step(self.state, self.game, self.oracle, self.idle_action)

    def commit(self, plan: PlannedStep, a_n: int, z_n: int) -> StepOutcome:
        prev = self.state
        nxt = commit_step(prev, plan, self.game, a_n, z_n, self.target)
        self.state = nxt

        smoothed = rewards_against_pure(self.game, plan.p)[z_n]
        realized = self.game.payoff[a_n, z_n]
        reward = realized if prev.variant.realized else smoothed
        audit = audit_recursion(prev, nxt, plan, reward, self.rho, self.target)
        chain_ok = check_saddle_chain(self.game, plan)

        steering_norm = float(np.linalg.norm(_audited(nxt.lam, nxt.variant, self.target)))
        dist = self._distance(nxt.tracked_average)
        ratio = self._bound_ratio(steering_norm, nxt.n)
        bound_ok = True
        if self.gates_bound:
            bound_ok = steering_norm <= self.rho / np.sqrt(nxt.n) + BOUND_TOL
            if dist is not None:
                bound_ok = bound_ok and dist <= steering_norm + BOUND_TOL
        if not audit.passed:
            _logger.warning(
                f"Recursion audit failed at n={nxt.n}: lhs={audit.lhs!r} "
                f"rhs={audit.rhs!r} descent={audit.descent!r}"
            )
        return StepOutcome(
            r_n=smoothed,
            realized=realized,
            steering_norm=steering_norm,
            dist_to_S=dist,
            audit_pass=audit.passed and chain_ok,
            bound_ratio=ratio,
            bound_ok=bound_ok,
        )

    def variant_flags(self) -> Dict[str, bool]:
        return self.variant.describe()


@register_algorithm("response-based")
class PlainResponseBased(ResponseBasedApproacher):
    variant = Variant()


@register_algorithm("response-based+idling")
class IdlingResponseBased(ResponseBasedApproacher):
    variant = Variant(idling=True)


@register_algorithm("response-based+unbounded")
class UnboundedResponseBased(ResponseBasedApproacher):
    variant = Variant(unbounded=True)


@register_algorithm("response-based-realized")
class RealizedResponseBased(ResponseBasedApproacher):
    variant = Variant(realized=True)

