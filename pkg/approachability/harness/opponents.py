"""Opponent strategies.

Opponents are registered under kind tags and created per run. Each sees the
step index, the agent's plan for the step (p_n and its steering direction)
and, through observe(), the realized actions of earlier steps.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from ..algorithms.base import PlannedStep
from ..core.errors import ScenarioError
from ..core.games import MixedAction, VectorGame, rewards_against_pure, sample_action
from ..core.registry import get_class, register_opponent
from ..problems.base import Problem


@dataclass(frozen=True, eq=False)
class OpponentView:
    """What the opponent may look at before choosing z_n."""

    n: int
    plan: PlannedStep
    game: VectorGame


class Opponent(ABC):
    """Base class for opponent strategies."""

    kind: str = ""
    n_opp: int = 0

    def bind(self, problem: Problem) -> None:
        """Check the strategy against the problem before the run starts."""
        self.n_opp = problem.game.n_opp

    @abstractmethod
    def act(self, view: OpponentView, rng: np.random.Generator) -> int:
        """Choose z_n."""

    def observe(self, a_n: int, z_n: int) -> None:
        pass


@register_opponent("fixed-mixed")
class FixedMixed(Opponent):
    """Draws z_n i.i.d. from a fixed mixed action q."""

    def __init__(self, q: Sequence[float]):
        self.q = MixedAction(np.asarray(q, dtype=float))

    def bind(self, problem: Problem) -> None:
        super().bind(problem)
        if len(self.q) != self.n_opp:
            raise ScenarioError(
                f"fixed-mixed q has {len(self.q)} entries, opponent has {self.n_opp} actions"
            )

    def act(self, view: OpponentView, rng: np.random.Generator) -> int:
        return sample_action(self.q, rng)


@register_opponent("periodic-pure")
class PeriodicPure(Opponent):
    """Cycles through a fixed sequence: z_n = sequence[(n - 1) mod length]."""

    def __init__(self, sequence: Sequence[int]):
        self.sequence = [int(z) for z in sequence]
        if not self.sequence:
            raise ScenarioError("periodic-pure sequence must be nonempty")

    def bind(self, problem: Problem) -> None:
        super().bind(problem)
        bad = [z for z in self.sequence if not 0 <= z < self.n_opp]
        if bad:
            raise ScenarioError(
                f"periodic-pure actions {bad} out of range for {self.n_opp} opponent actions"
            )

    def act(self, view: OpponentView, rng: np.random.Generator) -> int:
        return self.sequence[(view.n - 1) % len(self.sequence)]


@register_opponent("adversarial")
class AdversarialOmniscient(Opponent):
    """
    Sees p_n and plays z in argmin_z direction . r(p_n, z).

    The direction is the one the agent steers along, so this opponent pushes
    the average away from S as hard as one step allows. Ties go to the
    lowest index; with a zero direction that is z = 0.
    """

    def act(self, view: OpponentView, rng: np.random.Generator) -> int:
        scores = rewards_against_pure(view.game, view.plan.p) @ view.plan.adversary_direction
        return int(np.argmin(scores))


@register_opponent("best-response-empirical")
class BestResponseToEmpirical(Opponent):
    """
    Plays argmin_z u(p_bar, z) against the agent's empirical action frequencies.

    Needs a scalar utility, so it only applies to problems built from one.
    Before any play the frequencies are uniform.
    """

    def __init__(self) -> None:
        self.utility: Optional[np.ndarray] = None
        self.counts: Optional[np.ndarray] = None

    def bind(self, problem: Problem) -> None:
        super().bind(problem)
        if problem.utility is None:
            raise ScenarioError(
                f"best-response-empirical needs a scalar utility; {problem.label!r} has none"
            )
        self.utility = problem.utility
        self.counts = np.zeros(problem.utility.shape[0])

    def act(self, view: OpponentView, rng: np.random.Generator) -> int:
        assert self.utility is not None and self.counts is not None
        total = self.counts.sum()
        if total == 0:
            p_bar = np.full(self.counts.shape[0], 1.0 / self.counts.shape[0])
        else:
            p_bar = self.counts / total
        return int(np.argmin(p_bar @ self.utility))

    def observe(self, a_n: int, z_n: int) -> None:
        assert self.counts is not None
        self.counts[a_n] += 1


def make_opponent(kind: str, **fields: Any) -> Opponent:
    """Create a registered opponent from its scenario fields."""
    cls = get_class("opponent", kind)
    return cls(**fields)
