"""Per-step records and run reports.

StepRecord holds everything one step produced; RunReport summarizes a run.
records_frame() turns a trajectory into a polars DataFrame for analysis and
for the CSV writers of the command-line layer.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import polars as pl

# Scalar columns of a trajectory frame, in order
FRAME_SCHEMA = {
    "n": pl.Int64,
    "a_n": pl.Int64,
    "z_n": pl.Int64,
    "lambda_norm": pl.Float64,
    "dist_to_S": pl.Float64,
    "game_value": pl.Float64,
    "recursion_audit_pass": pl.Boolean,
    "bound_ratio": pl.Float64,
    "bound_ok": pl.Boolean,
}


@dataclass(frozen=True, eq=False)
class StepRecord:
    """Outcome of step n.

    Attributes:
        n: Step index, starting at 1
        p_n: Agent mixed action
        a_n: Sampled agent action
        z_n: Opponent action
        q_star: Auxiliary opponent action (response-based algorithms)
        p_star: Response to q_star
        r_n: Smoothed reward r(p_n, z_n)
        R_n: Realized reward r(a_n, z_n)
        r_star: Target point r(p_star, q_star)
        lambda_norm: Norm of the steering vector after the step (None for
            baselines without one)
        dist_to_S: Distance of the tracked average to S when computable
        game_value: Value of the step's projected game
        recursion_audit_pass: Outcome of the step's audits
        bound_ratio: ||lambda_n|| sqrt(n) / rho when defined
        bound_ok: Whether the gated convergence bound held
    """

    n: int
    p_n: np.ndarray
    a_n: int
    z_n: int
    q_star: Optional[np.ndarray]
    p_star: Optional[np.ndarray]
    r_n: np.ndarray
    R_n: np.ndarray
    r_star: Optional[np.ndarray]
    lambda_norm: Optional[float]
    dist_to_S: Optional[float]
    game_value: float
    recursion_audit_pass: bool
    bound_ratio: Optional[float]
    bound_ok: bool

    def scalars(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in FRAME_SCHEMA}


@dataclass
class RunReport:
    """Summary of one run.

    Attributes:
        scenario_id: Scenario identifier
        seed: Run seed
        algorithm: Algorithm kind tag
        n_steps: Number of completed steps
        max_bound_ratio: max_n ||lambda_n|| sqrt(n) / rho (0 without steps)
        final_dist: d(average, S) after the last step, when computable
        flags: Variant flags of the algorithm
        wall_time: Seconds spent in the step loop
        audit_failures: Steps whose audits failed
        bound_violations: Steps whose gated bound failed
        summary: Problem-specific quantities at the final average
    """

    scenario_id: str
    seed: int
    algorithm: str
    n_steps: int
    max_bound_ratio: float
    final_dist: Optional[float]
    flags: Dict[str, bool] = field(default_factory=dict)
    wall_time: float = 0.0
    audit_failures: List[int] = field(default_factory=list)
    bound_violations: List[int] = field(default_factory=list)
    summary: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.audit_failures and not self.bound_violations

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["passed"] = self.passed
        return data


def records_frame(records: Sequence[StepRecord]) -> pl.DataFrame:
    """Scalar columns of a trajectory as a DataFrame (one row per step)."""
    return pl.DataFrame([r.scalars() for r in records], schema=FRAME_SCHEMA)


def average_reward(records: Sequence[StepRecord], realized: bool = False) -> np.ndarray:
    """Average smoothed (or realized) reward of a trajectory."""
    if not records:
        raise ValueError("average of an empty trajectory is undefined")
    rewards = [r.R_n if realized else r.r_n for r in records]
    return np.mean(np.stack(rewards), axis=0)


@dataclass(frozen=True)
class IncrementCheck:
    """Statistics of n^2||l_n||^2 - (n-1)^2||l_{n-1}||^2 over a realized run.

    Attributes:
        mean: Sample mean of the increments
        stderr: Standard error of the mean
        count: Number of increments
        passed: mean <= rho^2 + 3 stderr
    """

    mean: float
    stderr: float
    count: int
    passed: bool


def realized_increment_check(records: Sequence[StepRecord], rho: float) -> IncrementCheck:
    """
    Check the expected one-step growth of n^2||l_n||^2 stays below rho^2.

    In realized mode the one-step recursion holds only in conditional
    expectation, so the check is statistical: the increments' sample mean
    must not exceed rho^2 by more than three standard errors.

    Args:
        records: Trajectory of a realized-mode run
        rho: Span of the game

    Returns:
        IncrementCheck with the sample statistics
    """
    norms = np.array([np.nan if r.lambda_norm is None else r.lambda_norm for r in records])
    if norms.size == 0 or np.any(np.isnan(norms)):
        raise ValueError("increment check needs a nonempty trajectory with steering norms")
    n = np.arange(1, norms.size + 1, dtype=float)
    energy = (n * norms) ** 2
    increments = np.diff(np.concatenate([[0.0], energy]))
    mean = float(increments.mean())
    stderr = float(increments.std(ddof=1) / np.sqrt(increments.size)) if increments.size > 1 else 0.0
    return IncrementCheck(
        mean=mean,
        stderr=stderr,
        count=int(increments.size),
        passed=mean <= rho * rho + 3.0 * stderr,
    )
