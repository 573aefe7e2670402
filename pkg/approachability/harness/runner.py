"""Deterministic simulation runner.

A run is a pure function of (scenario, seed):

1. Build the problem, the algorithm and a fresh opponent
2. Spot-check the response oracle on pure, uniform and 20 random q
3. For n = 1..n_steps: plan p_n, let the opponent choose z_n, sample
   a_n ~ p_n, commit the step and record its audits

A failed spot check and errors raised inside the step loop are wrapped in
RunAborted together with the records of the completed steps. With fail_fast
a failed audit or bound check aborts the run the same way.
"""

import logging
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Protocol, Tuple, Union

import numpy as np

from ..algorithms.base import Approacher
from ..algorithms.response_based import ResponseBasedApproacher
from ..core.errors import (
    ApproachabilityError,
    AuditError,
    CertificationError,
    RunAborted,
    ScenarioError,
)
from ..core.games import sample_action
from ..core.registry import get_class
from ..problems.base import Problem
from .opponents import Opponent, OpponentView
from .records import RunReport, StepRecord, average_reward
from .rng import make_streams

_logger = logging.getLogger(__name__)

# Random opponent actions used by the pre-run oracle spot check
SPOT_CHECK_COUNT = 20


@dataclass(frozen=True, eq=False)
class RunSetup:
    """Everything a run needs, built from a scenario.

    Attributes:
        scenario_id: Scenario identifier
        problem: Game, target set and response oracle
        algorithm: Registered algorithm kind
        make_opponent: Creates a fresh opponent for each run
        n_steps: Number of steps
        idle_action: Pure action played while idling (idling runs only)
    """

    scenario_id: str
    problem: Problem
    algorithm: str
    make_opponent: Callable[[], Opponent]
    n_steps: int
    idle_action: Optional[int] = None


class ScenarioLike(Protocol):
    """A validated scenario that can build its run setup."""

    @property
    def scenario_id(self) -> str:
        ...

    def setup(self) -> RunSetup:
        ...

    def sweep_settings(self) -> Dict[str, Any]:
        ...


def _setup(scenario: Union[RunSetup, ScenarioLike]) -> RunSetup:
    return scenario if isinstance(scenario, RunSetup) else scenario.setup()


def build_approacher(setup: RunSetup) -> Approacher:
    """
    Instantiate the scenario's algorithm on its problem.

    Raises:
        ScenarioError: If the algorithm is unknown or cannot run on the target
    """
    try:
        cls = get_class("algorithm", setup.algorithm)
    except KeyError as e:
        raise ScenarioError(str(e)) from e
    problem = setup.problem
    if issubclass(cls, ResponseBasedApproacher):
        return cls(
            problem.game,
            problem.target,
            problem.oracle,
            rho=problem.rho,
            idle_action=setup.idle_action,
        )
    if setup.idle_action is not None:
        raise ScenarioError("idle_action only applies to response-based algorithms")
    return cls(problem.game, problem.target, problem.oracle, rho=problem.rho)


def run(
    scenario: Union[RunSetup, ScenarioLike], seed: int, fail_fast: bool = False
) -> Tuple[List[StepRecord], RunReport]:
    """
    Execute one run.

    Args:
        scenario: Validated scenario (or a prebuilt RunSetup)
        seed: Run seed; the agent and opponent draw from separate streams
        fail_fast: Abort at the first step whose audits or gated bound fail

    Returns:
        (records, report)

    Raises:
        ScenarioError: If the scenario cannot be built
        RunAborted: If the oracle fails the pre-run spot check (step 0, no
            records) or a step fails; carries the completed records
    """
    setup = _setup(scenario)
    problem = setup.problem
    game = problem.game
    streams = make_streams(seed)
    approacher = build_approacher(setup)
    opponent = setup.make_opponent()
    opponent.bind(problem)
    if approacher.needs_oracle:
        try:
            problem.oracle.spot_check(game, streams.checks, SPOT_CHECK_COUNT)
        except CertificationError as e:
            _logger.error(f"Run {setup.scenario_id!r} seed={seed}: spot check failed: {e}")
            raise RunAborted(e, [], 0) from e

    _logger.info(
        f"Run {setup.scenario_id!r} seed={seed}: {setup.algorithm} vs "
        f"{opponent.kind}, {setup.n_steps} steps, rho={approacher.rho:.6g}"
    )
    records: List[StepRecord] = []
    audit_failures: List[int] = []
    bound_violations: List[int] = []
    start = time.perf_counter()
    for n in range(1, setup.n_steps + 1):
        try:
            plan = approacher.plan()
            z_n = opponent.act(OpponentView(n=n, plan=plan, game=game), streams.opponent)
            a_n = sample_action(plan.p, streams.agent)
            outcome = approacher.commit(plan, a_n, z_n)
        except ApproachabilityError as e:
            _logger.error(f"Run {setup.scenario_id!r} seed={seed} failed at step {n}: {e}")
            raise RunAborted(e, records, n) from e
        opponent.observe(a_n, z_n)

        records.append(
            StepRecord(
                n=n,
                p_n=plan.p.probs,
                a_n=a_n,
                z_n=z_n,
                q_star=None if plan.q_star is None else plan.q_star.probs,
                p_star=None if plan.p_star is None else plan.p_star.probs,
                r_n=outcome.r_n,
                R_n=outcome.realized,
                r_star=plan.r_star,
                lambda_norm=outcome.steering_norm,
                dist_to_S=outcome.dist_to_S,
                game_value=plan.game_value,
                recursion_audit_pass=outcome.audit_pass,
                bound_ratio=outcome.bound_ratio,
                bound_ok=outcome.bound_ok,
            )
        )
        if not outcome.audit_pass:
            audit_failures.append(n)
        if not outcome.bound_ok:
            bound_violations.append(n)
        if fail_fast and not (outcome.audit_pass and outcome.bound_ok):
            failed = "audit" if not outcome.audit_pass else "bound"
            error = AuditError(f"{failed} check failed at step {n}", step=n)
            _logger.error(f"Run {setup.scenario_id!r} seed={seed}: {error}")
            raise RunAborted(error, records, n)
        _logger.debug(
            f"step {n}: a={a_n} z={z_n} value={plan.game_value:.6g} "
            f"norm={outcome.steering_norm} dist={outcome.dist_to_S}"
        )
    wall_time = time.perf_counter() - start

    flags = approacher.variant_flags()
    ratios = [r.bound_ratio for r in records if r.bound_ratio is not None]
    summary: Dict[str, float] = {}
    if records and problem.summarize is not None:
        summary = problem.summarize(average_reward(records, realized=flags.get("realized", False)))
    report = RunReport(
        scenario_id=setup.scenario_id,
        seed=seed,
        algorithm=setup.algorithm,
        n_steps=len(records),
        max_bound_ratio=float(max(ratios)) if ratios else 0.0,
        final_dist=records[-1].dist_to_S if records else None,
        flags=flags,
        wall_time=wall_time,
        audit_failures=audit_failures,
        bound_violations=bound_violations,
        summary=summary,
    )
    _logger.info(
        f"Run {setup.scenario_id!r} seed={seed} finished in {wall_time:.2f}s: "
        f"max ratio {report.max_bound_ratio:.4f}, "
        f"{len(audit_failures)} audit failures, {len(bound_violations)} bound violations"
    )
    return records, report


def steering_norms(records: List[StepRecord]) -> np.ndarray:
    """lambda_norm column as an array (NaN where a baseline has none)."""
    return np.array([np.nan if r.lambda_norm is None else r.lambda_norm for r in records])
