"""Shared pieces of the problem constructions.

A problem bundles a vector game, a target set and a certified response
oracle. Generalized no-regret problems are described by a SatisficingProblem
(payoff v(a, z) in R^K, a response map and a goal test (v, q) in V*(q)) and
turned into the stacked game r(a, z) = (v(a, z), e_z) by build_generalized.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..algorithms.base import ResponseOracle
from ..core.errors import CertificationError, UnsupportedQueryError
from ..core.games import MixedAction, VectorGame
from ..core.sets import MEMBERSHIP_TOL, RecessionDirection, SupportValue, TargetSet

# Distance of a point's q-block from the simplex beyond which membership
# in a graph target is undefined
SIMPLEX_TOL = 1e-6

# Tolerance of satisficing-response certification
SATISFICING_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class Problem:
    """A vector game with its target set and response oracle.

    Attributes:
        game: The vector game r(a, z)
        target: The target set S
        oracle: Response oracle certified for S
        utility: Scalar utility u(a, z) when the problem has one (used by
            best-response opponents), else None
        label: Human-readable description
        summarize: Maps the final average reward to named problem-specific
            quantities reported with a run (for example the final ratio)
    """

    game: VectorGame
    target: TargetSet
    oracle: ResponseOracle
    utility: Optional[np.ndarray] = None
    label: str = ""
    summarize: Optional[Callable[[np.ndarray], Dict[str, float]]] = None

    @property
    def rho(self) -> float:
        return self.game.span


class ProblemFactory(ABC):
    """Registered under a scenario kind tag; builds a Problem from its fields."""

    kind: str = ""

    @classmethod
    @abstractmethod
    def build(cls, **fields: Any) -> Problem:
        pass


def as_utility(u: Any, name: str = "utility") -> np.ndarray:
    """Validate a finite scalar matrix u(a, z)."""
    u = np.array(u, dtype=float)
    if u.ndim != 2 or min(u.shape) < 1:
        raise ValueError(f"{name} must be a nonempty (n_agent, n_opp) matrix, got {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError(f"{name} entries must be finite")
    return u


def best_response(u: np.ndarray, q: MixedAction) -> int:
    """argmax_a u(a, q), ties broken by the lowest action index."""
    return int(np.argmax(u @ q.probs))


def best_reward(u: np.ndarray, q: MixedAction) -> float:
    """u*(q) = max_a u(a, q)."""
    return float((u @ q.probs).max())


@dataclass(frozen=True, eq=False)
class SatisficingProblem:
    """Generalized no-regret problem.

    Attributes:
        v: Payoff tensor of shape (n_agent, n_opp, K)
        respond: Map q -> p with v(p, q) in V*(q)
        goal_residual: (v, q) -> nonnegative violation, zero iff v in V*(q)
        recession: Signed directions of the v-block along which V*(q) is
            unbounded for every q
        name: Label used in diagnostics
    """

    v: np.ndarray
    respond: Callable[[MixedAction], MixedAction]
    goal_residual: Callable[[np.ndarray, MixedAction], float]
    recession: List[RecessionDirection] = field(default_factory=list)
    name: str = "satisficing"

    def __post_init__(self) -> None:
        v = np.array(self.v, dtype=float)
        if v.ndim == 2:
            v = v[:, :, None]
        if v.ndim != 3 or not np.all(np.isfinite(v)):
            raise ValueError(f"Satisficing payoff must be a finite 3-tensor, got {v.shape}")
        object.__setattr__(self, "v", v)

    @property
    def n_agent(self) -> int:
        return int(self.v.shape[0])

    @property
    def n_opp(self) -> int:
        return int(self.v.shape[1])

    @property
    def k(self) -> int:
        return int(self.v.shape[2])

    def payoff_at(self, p: MixedAction, q: MixedAction) -> np.ndarray:
        return np.einsum("a,z,azk->k", p.probs, q.probs, self.v)

    def certify(self, rng: np.random.Generator, count: int = 100) -> None:
        """Check v(respond(q), q) in V*(q) at pure and `count` random q.

        Raises:
            CertificationError: On the first q where the response misses
        """
        qs = [MixedAction.pure(self.n_opp, z) for z in range(self.n_opp)]
        qs += [MixedAction.normalized(rng.dirichlet(np.ones(self.n_opp))) for _ in range(count)]
        for q in qs:
            value = self.payoff_at(self.respond(q), q)
            residual = self.goal_residual(value, q)
            if residual > SATISFICING_TOL:
                raise CertificationError(
                    f"{self.name}: response to q={np.round(q.probs, 6).tolist()} "
                    f"misses V*(q) by {residual:.3e}",
                    residual=residual,
                )


class GraphTarget(TargetSet):
    """Target {(v, q) : v in V*(q)} of a satisficing problem.

    Only membership is available: distance, projection and support queries
    onto these graph sets are never needed by the response-based algorithm.
    """

    has_distance = False

    def __init__(self, problem: SatisficingProblem):
        self.problem = problem

    @property
    def dim(self) -> int:
        return self.problem.k + self.problem.n_opp

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, MixedAction]:
        """Split a point into its v-block and its renormalized q-block.

        Raises:
            UnsupportedQueryError: If the q-block is not within 1e-6 of the
                simplex
        """
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise ValueError(f"point has dimension {x.shape[0]}, set has dimension {self.dim}")
        v, q = x[: self.problem.k], x[self.problem.k :]
        if q.min() < -SIMPLEX_TOL or abs(q.sum() - 1.0) > SIMPLEX_TOL:
            raise UnsupportedQueryError(
                f"q-block {np.round(q, 9).tolist()} is off the simplex; membership undefined"
            )
        return v, MixedAction.normalized(q)

    def residual(self, x: np.ndarray) -> float:
        v, q = self.split(x)
        return float(self.problem.goal_residual(v, q))

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.residual(x) <= tol

    def distance(self, x: np.ndarray) -> float:
        raise UnsupportedQueryError("distance to a graph target is not computed")

    def project(self, x: np.ndarray) -> np.ndarray:
        raise UnsupportedQueryError("projection onto a graph target is not computed")

    def support(self, theta: np.ndarray) -> SupportValue:
        raise UnsupportedQueryError("support function of a graph target is not computed")

    def support_argmax(self, theta: np.ndarray) -> np.ndarray:
        raise UnsupportedQueryError("support function of a graph target is not computed")

    def recession_directions(self) -> List[RecessionDirection]:
        return list(self.problem.recession)

    @property
    def is_compact(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"GraphTarget({self.problem.name}, dim={self.dim})"


def build_generalized(problem: SatisficingProblem) -> Tuple[VectorGame, ResponseOracle]:
    """
    Stack a satisficing problem into r(a, z) = (v(a, z), e_z).

    Projecting this game on lambda = (lambda_v, lambda_q) gives the scalar
    objective lambda_v.v(p, q) + lambda_q.q, and the target point of a step
    is (v(p*(q*), q*), q*).

    Returns:
        (game, oracle) with the oracle certified for GraphTarget(problem)
    """
    n_agent, n_opp, _ = problem.v.shape
    indicator = np.broadcast_to(np.eye(n_opp), (n_agent, n_opp, n_opp))
    game = VectorGame(np.concatenate([problem.v, indicator], axis=2))
    oracle = ResponseOracle(
        respond=problem.respond,
        certified_set=GraphTarget(problem),
        name=problem.name,
    )
    return game, oracle
