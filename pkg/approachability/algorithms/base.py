"""Base types shared by the approaching algorithms.

- ResponseOracle: q -> p map certified against a target set
- LearnerState: running averages and the accumulated steering sum
- PlannedStep: what an algorithm commits to before the opponent moves
- StepOutcome: per-step rewards, distances and audit results
- Approacher: abstract driver interface used by the harness runner
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ..core.errors import CertificationError, ScenarioError
from ..core.games import MixedAction, VectorGame, expected_reward
from ..core.sets import TargetSet, steer_unbounded

# Hard limit for a response oracle's distance to its certified set
CERTIFICATION_TOL = 1e-6

# Tolerance of the pre-run spot check on random opponent actions
SPOT_CHECK_TOL = 1e-7

# Slack allowed on the rho/sqrt(n) bound and on d(avg, S) <= ||steering||
BOUND_TOL = 1e-7


@dataclass(frozen=True)
class ResponseOracle:
    """Map q -> p whose rewards r(p, q) lie in `certified_set`.

    Attributes:
        respond: Response map from opponent to agent mixed actions
        certified_set: The target set S the responses land in
        name: Label used in diagnostics
    """

    respond: Callable[[MixedAction], MixedAction]
    certified_set: TargetSet
    name: str = "oracle"

    def certify(
        self, game: VectorGame, q: MixedAction, tol: float = CERTIFICATION_TOL
    ) -> Tuple[MixedAction, np.ndarray]:
        """
        Respond to q and check the response lands in the certified set.

        Returns:
            (p, r(p, q))

        Raises:
            CertificationError: If r(p, q) is farther than tol from the set
        """
        p = self.respond(q)
        reward = expected_reward(game, p, q)
        residual = self.certified_set.residual(reward)
        if residual > tol:
            raise CertificationError(
                f"{self.name}: response to q={np.round(q.probs, 6).tolist()} gives "
                f"reward {np.round(reward, 6).tolist()} at residual {residual:.3e} "
                f"from the target set (tol {tol:.0e})",
                residual=residual,
            )
        return p, reward

    def spot_check(
        self,
        game: VectorGame,
        rng: np.random.Generator,
        count: int = 20,
        tol: float = SPOT_CHECK_TOL,
    ) -> None:
        """Certify the oracle at every pure q, uniform q and `count` random q."""
        for z in range(game.n_opp):
            self.certify(game, MixedAction.pure(game.n_opp, z), tol)
        self.certify(game, MixedAction.uniform(game.n_opp), tol)
        for _ in range(count):
            self.certify(game, MixedAction.normalized(rng.dirichlet(np.ones(game.n_opp))), tol)


@dataclass(frozen=True)
class Variant:
    """Mode flags of the response-based algorithm.

    Attributes:
        realized: Average sampled rewards r(a_n, z_n) instead of r(p_n, z_n)
        idling: Reset the steering to 0 whenever the average is in S
        unbounded: Clear steering coordinates along recession directions
    """

    realized: bool = False
    idling: bool = False
    unbounded: bool = False

    def describe(self) -> Dict[str, bool]:
        return {"realized": self.realized, "idling": self.idling, "unbounded": self.unbounded}


@dataclass(frozen=True, eq=False)
class LearnerState:
    """Running state of a response-based run.

    The steering vector is kept as the sum n * lambda_n so the recursion
    n lambda_n = (n-1) lambda_{n-1} + (r*_n - r_n) holds without rounding
    drift; `lam` divides it back out.

    Attributes:
        n: Number of committed steps
        r_bar: Average smoothed reward r(p_k, z_k)
        r_star_bar: Average target point r*_k
        realized_bar: Average realized reward r(a_k, z_k)
        steering_sum: n * (variant-specific lambda before recession clearing)
        variant: Mode flags
    """

    n: int
    r_bar: np.ndarray
    r_star_bar: np.ndarray
    realized_bar: np.ndarray
    steering_sum: np.ndarray
    variant: Variant

    @classmethod
    def initial(cls, dim: int, variant: Optional[Variant] = None) -> "LearnerState":
        zeros = np.zeros(dim)
        return cls(
            n=0,
            r_bar=zeros,
            r_star_bar=zeros,
            realized_bar=zeros,
            steering_sum=zeros,
            variant=variant or Variant(),
        )

    @property
    def dim(self) -> int:
        return int(self.r_bar.shape[0])

    @property
    def lam(self) -> np.ndarray:
        """Variant-specific lambda_n (zero before the first step)."""
        if self.n == 0:
            return np.zeros(self.dim)
        return self.steering_sum / self.n

    @property
    def smoothed_lam(self) -> np.ndarray:
        """r_star_bar - r_bar, kept for diagnostics in every mode."""
        return self.r_star_bar - self.r_bar

    @property
    def tracked_average(self) -> np.ndarray:
        """The average the variant steers toward S."""
        return self.realized_bar if self.variant.realized else self.r_bar

    def steering(self, target: TargetSet) -> np.ndarray:
        """Direction used in the projected game."""
        lam = self.lam
        if self.variant.unbounded:
            return steer_unbounded(lam, target)
        return lam

    def replace(self, **changes: object) -> "LearnerState":
        return replace(self, **changes)  # type: ignore[arg-type]


@dataclass(frozen=True, eq=False)
class PlannedStep:
    """Decision for one step, fixed before the opponent moves.

    Attributes:
        p: Agent mixed action p_n
        direction: Steering direction of the projected game
        game_value: Saddle value of the projected game
        q_star: Auxiliary opponent action (response-based only)
        p_star: Response to q_star (response-based only)
        r_star: Target point r(p_star, q_star) (response-based only)
        degenerate: True when the direction was zero and p was not solved for
    """

    p: MixedAction
    direction: np.ndarray
    game_value: float
    q_star: Optional[MixedAction] = None
    p_star: Optional[MixedAction] = None
    r_star: Optional[np.ndarray] = None
    degenerate: bool = False

    @property
    def adversary_direction(self) -> np.ndarray:
        """Direction an omniscient opponent minimizes against."""
        return self.direction


@dataclass(frozen=True, eq=False)
class StepOutcome:
    """Per-step results reported by Approacher.commit."""

    r_n: np.ndarray
    realized: np.ndarray
    steering_norm: Optional[float]
    dist_to_S: Optional[float]
    audit_pass: bool
    bound_ratio: Optional[float]
    bound_ok: bool


class Approacher(ABC):
    """Drives one run of an approaching algorithm.

    Subclasses are registered with @register_algorithm and constructed from
    the game, target set, optional response oracle and the span rho.
    """

    kind: str = ""

    #: Needs a certified response oracle
    needs_oracle: bool = False

    #: Needs distance/projection queries on the target
    needs_projection: bool = False

    #: Needs a compact target (finite support function everywhere)
    needs_compact: bool = False

    #: Whether ||steering_n|| <= rho/sqrt(n) is gated per step
    gates_bound: bool = False

    def __init__(
        self,
        game: VectorGame,
        target: TargetSet,
        oracle: Optional[ResponseOracle] = None,
        rho: Optional[float] = None,
    ):
        if game.dim != target.dim:
            raise ScenarioError(
                f"Target set has dimension {target.dim}, game payoffs have {game.dim}"
            )
        if self.needs_oracle and oracle is None:
            raise ScenarioError(f"Algorithm '{self.kind}' needs a response oracle")
        if self.needs_projection and not target.has_distance:
            raise ScenarioError(
                f"Algorithm '{self.kind}' projects onto the target set, which "
                f"{type(target).__name__} does not support"
            )
        if self.needs_compact and not (target.has_distance and target.is_compact):
            raise ScenarioError(
                f"Algorithm '{self.kind}' needs a compact target set; "
                f"{type(target).__name__} has an unbounded support function"
            )
        self.game = game
        self.target = target
        self.oracle = oracle
        self.rho = game.span if rho is None else float(rho)

    @abstractmethod
    def plan(self) -> PlannedStep:
        """Choose p_n from the current state."""

    @abstractmethod
    def commit(self, plan: PlannedStep, a_n: int, z_n: int) -> StepOutcome:
        """Fold the realized step into the state and audit it."""

    def variant_flags(self) -> Dict[str, bool]:
        return {}

    def _distance(self, x: np.ndarray) -> Optional[float]:
        if not self.target.has_distance:
            return None
        return self.target.distance(x)

    def _bound_ratio(self, norm: float, n: int) -> float:
        if self.rho == 0:
            return 0.0
        return norm * np.sqrt(n) / self.rho
