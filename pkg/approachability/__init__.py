"""
approachability - Response-based Blackwell approachability.

Learners that drive the average vector payoff of a repeated game into a
target set using only a response map q -> p (one zero-sum game per step),
the regret-minimization problems that reduce to it, and a deterministic
harness for running and auditing them from scenario files.
"""

from .algorithms.base import Approacher, PlannedStep, ResponseOracle, Variant
from .algorithms.response_based import audit_recursion, commit_step, idle_update, plan_step
from .core.errors import (
    ApproachabilityError,
    AuditError,
    CertificationError,
    RunAborted,
    ScenarioError,
    SolverError,
    UnsupportedQueryError,
)
from .core.games import MixedAction, VectorGame, expected_reward, solve_zero_sum, span
from .core.registry import get_class, list_registered
from .core.sets import (
    Ball,
    Box,
    HPolyhedron,
    NonpositiveOrthant,
    Singleton,
    TargetSet,
    steer_unbounded,
)
from .harness.runner import run
from .harness.sweep import sweep
from .problems.base import Problem, build_generalized

__version__ = "0.1.0"

__all__ = [
    # Core
    "MixedAction",
    "VectorGame",
    "expected_reward",
    "solve_zero_sum",
    "span",
    "get_class",
    "list_registered",
    # Target sets
    "TargetSet",
    "Singleton",
    "NonpositiveOrthant",
    "Box",
    "HPolyhedron",
    "Ball",
    "steer_unbounded",
    # Algorithms
    "Approacher",
    "ResponseOracle",
    "PlannedStep",
    "Variant",
    "plan_step",
    "commit_step",
    "idle_update",
    "audit_recursion",
    # Problems
    "Problem",
    "build_generalized",
    # Harness
    "run",
    "sweep",
    # Errors
    "ApproachabilityError",
    "ScenarioError",
    "CertificationError",
    "AuditError",
    "SolverError",
    "UnsupportedQueryError",
    "RunAborted",
]
