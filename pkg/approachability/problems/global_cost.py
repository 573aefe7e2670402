"""Regret with respect to a global cost of the average payoff.

The agent wants G(v_bar_n) to be eventually no worse than the best cost in
hindsight G*(q_bar_n) = min_p G(v(p, q_bar_n)). The response map picks such a
minimizer, and the satisficing set is V*(q) = {v : G(v) <= G*(q)}.

Cost functionals:
- AbsoluteValue: G(v) = |v| for scalar v
- DNorm(d): load balancing, v(a, z) = l(a, z) e_a and G(v) = ||v||_d
- InfNorm: load balancing with G(v) = max_a v_a (makespan)
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import numpy as np

from ..core.games import MixedAction
from ..core.registry import register_problem
from .base import Problem, ProblemFactory, SatisficingProblem, as_utility, build_generalized


class CostFunctional(ABC):
    """Convex cost G on the payoff space with a closed-form response."""

    @abstractmethod
    def cost(self, v: np.ndarray) -> float:
        pass

    @abstractmethod
    def respond(self, v: np.ndarray, q: MixedAction) -> MixedAction:
        """p*(q) in argmin_p G(v(p, q)) for the payoff tensor v."""

    @abstractmethod
    def payoff_tensor(self, data: np.ndarray) -> np.ndarray:
        """Payoff tensor v(a, z) built from the scenario matrix."""


@dataclass(frozen=True)
class AbsoluteValue(CostFunctional):
    """G(v) = |v| for a scalar payoff."""

    def cost(self, v: np.ndarray) -> float:
        return float(abs(np.asarray(v, dtype=float).reshape(-1)[0]))

    def payoff_tensor(self, data: np.ndarray) -> np.ndarray:
        return as_utility(data, "values")[:, :, None]

    def respond(self, v: np.ndarray, q: MixedAction) -> MixedAction:
        values = np.asarray(v, dtype=float)[:, :, 0] @ q.probs
        n_agent = values.shape[0]
        positive = np.flatnonzero(values > 0)
        negative = np.flatnonzero(values < 0)
        zero = np.flatnonzero(values == 0)
        if zero.size:
            return MixedAction.pure(n_agent, int(zero[0]))
        if negative.size == 0:
            # All positive: the smallest value is the cheapest
            return MixedAction.pure(n_agent, int(positive[np.argmin(values[positive])]))
        if positive.size == 0:
            return MixedAction.pure(n_agent, int(negative[np.argmax(values[negative])]))
        # Opposite signs: mix the smallest positive with the largest negative
        # value so the mixture is exactly zero
        a_pos = int(positive[np.argmin(values[positive])])
        a_neg = int(negative[np.argmax(values[negative])])
        v_pos, v_neg = values[a_pos], values[a_neg]
        probs = np.zeros(n_agent)
        probs[a_pos] = -v_neg / (v_pos - v_neg)
        probs[a_neg] = v_pos / (v_pos - v_neg)
        return MixedAction.normalized(probs)


class _LoadBalancing(CostFunctional):
    """Loads l(a, z) >= 0; action a adds its load to coordinate a."""

    def payoff_tensor(self, data: np.ndarray) -> np.ndarray:
        losses = as_utility(data, "losses")
        if np.any(losses < 0):
            raise ValueError("load-balancing losses must be nonnegative")
        n_agent = losses.shape[0]
        return losses[:, :, None] * np.eye(n_agent)[:, None, :]

    @abstractmethod
    def _weights(self, losses: np.ndarray) -> np.ndarray:
        """Unnormalized response weights for strictly positive losses."""

    def respond(self, v: np.ndarray, q: MixedAction) -> MixedAction:
        # l(a, q) sits on the diagonal of v(., q)
        losses = np.diagonal(np.einsum("azk,z->ak", v, q.probs)).copy()
        free = np.flatnonzero(losses == 0)
        if free.size:
            # Zero-loss actions make the cost zero: spread over them
            probs = np.zeros(losses.shape[0])
            probs[free] = 1.0 / free.size
            return MixedAction.normalized(probs)
        return MixedAction.normalized(self._weights(losses))


@dataclass(frozen=True)
class DNorm(_LoadBalancing):
    """G(v) = ||v||_d with 1 < d < inf; response p_a proportional to l_a^{-d/(d-1)}."""

    order: float = 2.0

    def __post_init__(self) -> None:
        if not (self.order > 1 and np.isfinite(self.order)):
            raise ValueError(f"norm order must satisfy 1 < d < inf, got {self.order}")

    def cost(self, v: np.ndarray) -> float:
        return float(np.linalg.norm(np.asarray(v, dtype=float), ord=self.order))

    def _weights(self, losses: np.ndarray) -> np.ndarray:
        exponent = -self.order / (self.order - 1.0)
        # Scale by the smallest loss first to keep the powers in range
        return (losses / losses.min()) ** exponent


@dataclass(frozen=True)
class InfNorm(_LoadBalancing):
    """G(v) = max_a v_a (makespan); response p_a proportional to 1 / l_a."""

    def cost(self, v: np.ndarray) -> float:
        return float(np.max(np.abs(np.asarray(v, dtype=float))))

    def _weights(self, losses: np.ndarray) -> np.ndarray:
        return losses.min() / losses


def global_cost_response(G: CostFunctional, v: np.ndarray, q: MixedAction) -> MixedAction:
    """
    Response p*(q) minimizing G(v(p, q)).

    Args:
        G: The cost functional
        v: Payoff tensor of shape (n_agent, n_opp, K)
        q: Opponent mixed action

    Returns:
        A minimizing mixed action
    """
    return G.respond(np.asarray(v, dtype=float), q)


def best_cost_in_hindsight(G: CostFunctional, v: np.ndarray, q: MixedAction) -> float:
    """G*(q) = G(v(p*(q), q))."""
    v = np.asarray(v, dtype=float)
    p = G.respond(v, q)
    return G.cost(np.einsum("a,z,azk->k", p.probs, q.probs, v))


def global_cost_problem(G: CostFunctional, v: np.ndarray) -> SatisficingProblem:
    """Satisficing problem with V*(q) = {v : G(v) <= G*(q)}."""
    v = np.asarray(v, dtype=float)

    def respond(q: MixedAction) -> MixedAction:
        return G.respond(v, q)

    def goal_residual(point: np.ndarray, q: MixedAction) -> float:
        return max(0.0, G.cost(point) - best_cost_in_hindsight(G, v, q))

    return SatisficingProblem(
        v=v,
        respond=respond,
        goal_residual=goal_residual,
        name=f"global cost {type(G).__name__}",
    )


def concave_envelope(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """
    Smallest concave function above the points (xs, ys), evaluated at xs.

    Computed as the upper hull of the points (monotone chain).

    Args:
        xs: Strictly increasing grid
        ys: Function values on the grid

    Returns:
        Envelope values at xs
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    hull = []
    for i in range(xs.shape[0]):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (xs[i1] - xs[i0]) * (ys[i] - ys[i0]) - (ys[i1] - ys[i0]) * (xs[i] - xs[i0])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.interp(xs, xs[hull], ys[hull])


def security_level_grid(
    G: CostFunctional, v: np.ndarray, grid_size: int = 101
) -> Tuple[float, float]:
    """
    Compare conc(G*) with the security level on a grid (two actions per side).

    Args:
        G: Cost functional
        v: Payoff tensor of shape (2, 2, K)
        grid_size: Number of grid points for p and q in [0, 1]

    Returns:
        (max over the q-grid of conc(G*)(q), min_p max_q G(v(p, q)) on the grid)
    """
    v = np.asarray(v, dtype=float)
    if v.shape[:2] != (2, 2):
        raise ValueError(f"security grid check needs a 2x2 game, got {v.shape[:2]}")
    grid = np.linspace(0.0, 1.0, grid_size)
    mixed = [MixedAction.normalized(np.array([1.0 - t, t])) for t in grid]
    g_star = np.array([best_cost_in_hindsight(G, v, q) for q in mixed])
    envelope = concave_envelope(grid, g_star)
    security = min(
        max(G.cost(np.einsum("a,z,azk->k", p.probs, q.probs, v)) for q in mixed)
        for p in mixed
    )
    return float(envelope.max()), float(security)


class _GlobalFactory(ProblemFactory):
    @staticmethod
    def _problem(G: CostFunctional, data: Any, label: str) -> Problem:
        v = G.payoff_tensor(np.asarray(data, dtype=float))
        satisficing = global_cost_problem(G, v)
        game, oracle = build_generalized(satisficing)
        return Problem(game, oracle.certified_set, oracle, label=label)


@register_problem("global-abs")
class GlobalAbsolute(_GlobalFactory):
    @classmethod
    def build(cls, values: Any = None, **_: Optional[Any]) -> Problem:
        return cls._problem(AbsoluteValue(), values, "global cost |v|")


@register_problem("global-dnorm")
class GlobalDNorm(_GlobalFactory):
    @classmethod
    def build(
        cls, losses: Any = None, norm_order: float = 2.0, **_: Optional[Any]
    ) -> Problem:
        return cls._problem(DNorm(norm_order), losses, f"load balancing d={norm_order}")


@register_problem("global-infnorm")
class GlobalInfNorm(_GlobalFactory):
    @classmethod
    def build(cls, losses: Any = None, **_: Optional[Any]) -> Problem:
        return cls._problem(InfNorm(), losses, "load balancing makespan")
