"""Finite vector-payoff matrix games and the zero-sum saddle-point solver."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import SolverError
from .lp import solve_lp

# Tolerance on the saddle-point certificate inequalities
CERTIFICATE_TOL = 1e-8

# Tolerance on probability vectors summing to one
PROB_TOL = 1e-12

# Directions with norm below this are treated as zero (degenerate plan)
ZERO_DIRECTION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MixedAction:
    """Probability vector over a finite action set.

    Attributes:
        probs: Nonnegative entries summing to one within 1e-12
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if probs.size == 0:
            raise ValueError("MixedAction needs at least one action")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError(f"MixedAction entries must be finite and >= 0: {probs}")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValueError(
                f"MixedAction entries must sum to 1 (got {probs.sum()!r})"
            )
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n: int) -> "MixedAction":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def pure(cls, n: int, index: int) -> "MixedAction":
        if not 0 <= index < n:
            raise ValueError(f"Action index {index} out of range for {n} actions")
        probs = np.zeros(n)
        probs[index] = 1.0
        return cls(probs)

    @classmethod
    def normalized(cls, weights: np.ndarray) -> "MixedAction":
        """Build a MixedAction from nonnegative weights (clipped, rescaled)."""
        weights = np.maximum(np.asarray(weights, dtype=float), 0.0)
        total = weights.sum()
        if total <= 0:
            raise ValueError("Cannot normalize an all-zero weight vector")
        probs = weights / total
        # Fold the rounding residue into the largest entry
        probs[np.argmax(probs)] += 1.0 - probs.sum()
        return cls(probs)

    def __len__(self) -> int:
        return int(self.probs.shape[0])

    def __repr__(self) -> str:
        return f"MixedAction({np.array2string(self.probs, precision=6)})"


ActionLike = Union[MixedAction, Sequence[float], np.ndarray]


def as_mixed(p: ActionLike) -> MixedAction:
    return p if isinstance(p, MixedAction) else MixedAction(np.asarray(p))


@dataclass(frozen=True, eq=False)
class VectorGame:
    """Finite game with vector rewards r(a, z) in R^dim.

    Attributes:
        payoff: Tensor of shape (n_agent, n_opp, dim)
    """

    payoff: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        payoff = np.array(self.payoff, dtype=float)
        if payoff.ndim == 2:
            payoff = payoff[:, :, None]
        if payoff.ndim != 3:
            raise ValueError(
                f"Payoff tensor must have shape (n_agent, n_opp, dim), got {payoff.shape}"
            )
        if min(payoff.shape) < 1:
            raise ValueError(f"Payoff tensor has an empty axis: {payoff.shape}")
        if not np.all(np.isfinite(payoff)):
            raise ValueError("Payoff tensor entries must be finite")
        payoff.setflags(write=False)
        object.__setattr__(self, "payoff", payoff)

    @property
    def n_agent(self) -> int:
        return int(self.payoff.shape[0])

    @property
    def n_opp(self) -> int:
        return int(self.payoff.shape[1])

    @property
    def dim(self) -> int:
        return int(self.payoff.shape[2])

    @cached_property
    def span(self) -> float:
        return span(self)

    def __repr__(self) -> str:
        return f"VectorGame(n_agent={self.n_agent}, n_opp={self.n_opp}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class SaddlePoint:
    """Certified solution of a zero-sum matrix game.

    The agent (rows) maximizes, the opponent (columns) minimizes. Only the
    certificate is guaranteed; among several optimal strategy pairs the one
    returned is whatever the simplex pivot order reaches first.

    Attributes:
        p: Row player's optimal mixed action
        q: Column player's optimal mixed action
        value: Game value
    """

    p: MixedAction
    q: MixedAction
    value: float


def span(game: VectorGame) -> float:
    """
    Euclidean diameter of the set of reward vectors.

    Args:
        game: The vector game

    Returns:
        max over pairs of entries of ||r(a, z) - r(a', z')||
    """
    entries = game.payoff.reshape(-1, game.dim)
    # Translation invariant; center to keep the Gram trick accurate
    entries = entries - entries.mean(axis=0)
    sq = np.einsum("ij,ij->i", entries, entries)
    gram = entries @ entries.T
    d2 = sq[:, None] + sq[None, :] - 2.0 * gram
    return float(np.sqrt(max(float(d2.max()), 0.0)))


def _check_dims(game: VectorGame, p: MixedAction, q: MixedAction) -> None:
    if len(p) != game.n_agent or len(q) != game.n_opp:
        raise ValueError(
            f"Mixed actions of sizes ({len(p)}, {len(q)}) do not match game "
            f"with {game.n_agent} agent and {game.n_opp} opponent actions"
        )


def expected_reward(game: VectorGame, p: ActionLike, q: ActionLike) -> np.ndarray:
    """
    Expected reward vector sum_{a,z} p(a) q(z) r(a, z).

    Raises:
        ValueError: If p or q does not match the game's action sets
    """
    p, q = as_mixed(p), as_mixed(q)
    _check_dims(game, p, q)
    return np.einsum("a,z,azl->l", p.probs, q.probs, game.payoff)


def rewards_against_pure(game: VectorGame, p: ActionLike) -> np.ndarray:
    """Rewards r(p, z) for every pure opponent action z, shape (n_opp, dim)."""
    p = as_mixed(p)
    if len(p) != game.n_agent:
        raise ValueError(f"Mixed action of size {len(p)}, game has {game.n_agent}")
    return np.einsum("a,azl->zl", p.probs, game.payoff)


def project_game(game: VectorGame, direction: np.ndarray) -> np.ndarray:
    """
    Scalar matrix M[a, z] = direction . r(a, z), with no rescaling.

    Raises:
        ValueError: If the direction does not have the payoff dimension
    """
    direction = np.asarray(direction, dtype=float).reshape(-1)
    if direction.shape[0] != game.dim:
        raise ValueError(
            f"Direction has dimension {direction.shape[0]}, game has {game.dim}"
        )
    return game.payoff @ direction


def certificate_gap(M: np.ndarray, saddle: SaddlePoint) -> float:
    """Largest violation of the two saddle-point certificate inequalities."""
    row_guarantee = float((saddle.p.probs @ M).min())
    col_guarantee = float((M @ saddle.q.probs).max())
    return max(saddle.value - row_guarantee, col_guarantee - saddle.value, 0.0)


def solve_zero_sum(M: np.ndarray) -> SaddlePoint:
    """
    Solve the zero-sum game with payoff matrix M (row player maximizes).

    The matrix is shifted so all entries are at least 1, the column player's
    LP max 1.y s.t. M'y <= 1, y >= 0 is solved, and the row player's strategy
    is read from its dual.

    Args:
        M: Finite payoff matrix of shape (n_agent, n_opp)

    Returns:
        SaddlePoint satisfying the certificate with tolerance 1e-8 (scaled by
        max(1, max|M|))

    Raises:
        SolverError: If the LP fails or the certificate does not hold

    Example:
        >>> sp = solve_zero_sum(np.array([[3.0, 0.0], [1.0, 2.0]]))
        >>> round(sp.value, 12)
        1.5
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or not np.all(np.isfinite(M)):
        raise SolverError(f"Zero-sum solver needs a finite matrix, got shape {M.shape}")
    n_rows, n_cols = M.shape

    shift = 1.0 - float(M.min())
    shifted = M + shift
    try:
        sol = solve_lp(
            np.ones(n_cols),
            A_ub=shifted,
            b_ub=np.ones(n_rows),
            maximize=True,
        )
    except SolverError as e:
        raise SolverError(f"Zero-sum LP failed on matrix\n{M}\n{e}") from e

    if sol.x.sum() <= 0 or sol.duals.sum() <= 0:
        raise SolverError(f"Degenerate zero-sum LP solution on matrix\n{M}")
    p = MixedAction.normalized(sol.duals)
    q = MixedAction.normalized(sol.x)
    value = float(p.probs @ M @ q.probs)
    saddle = SaddlePoint(p=p, q=q, value=value)

    gap = certificate_gap(M, saddle)
    tol = CERTIFICATE_TOL * max(1.0, float(np.abs(M).max()))
    if gap > tol:
        raise SolverError(
            f"Saddle certificate violated by {gap:.3e} (tol {tol:.1e}) on matrix\n{M}"
        )
    return saddle


def sample_action(p: ActionLike, rng: np.random.Generator) -> int:
    """
    Sample an action index from p using exactly one uniform draw.

    Inverse-CDF sampling: the first index whose cumulative probability
    exceeds the draw. Zero-probability actions are never returned.

    Example:
        >>> sample_action([0.0, 0.0, 1.0], np.random.default_rng(0))
        2
    """
    probs = as_mixed(p).probs
    u = rng.random()
    index = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    if index >= probs.shape[0]:
        # Cumulative sum rounded below the draw; take the last supported action
        index = int(np.flatnonzero(probs > 0)[-1])
    return index
