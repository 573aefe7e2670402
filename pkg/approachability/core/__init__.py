"""Core infrastructure: errors, registries, LP/QP kernels, games and target sets."""

from .errors import (
    ApproachabilityError,
    AuditError,
    CertificationError,
    InfeasibleError,
    RunAborted,
    ScenarioError,
    SolverError,
    UnboundedError,
    UnsupportedQueryError,
)
from .games import (
    MixedAction,
    SaddlePoint,
    VectorGame,
    expected_reward,
    project_game,
    sample_action,
    solve_zero_sum,
    span,
)
from .registry import (
    get_class,
    list_registered,
    register_algorithm,
    register_opponent,
    register_problem,
    register_target,
)
from .sets import (
    Ball,
    Box,
    HPolyhedron,
    NonpositiveOrthant,
    Singleton,
    SupportValue,
    TargetSet,
    steer_unbounded,
    support_distance,
)

__all__ = [
    "ApproachabilityError",
    "ScenarioError",
    "CertificationError",
    "AuditError",
    "SolverError",
    "InfeasibleError",
    "UnboundedError",
    "UnsupportedQueryError",
    "RunAborted",
    "MixedAction",
    "VectorGame",
    "SaddlePoint",
    "expected_reward",
    "project_game",
    "solve_zero_sum",
    "sample_action",
    "span",
    "register_problem",
    "register_algorithm",
    "register_target",
    "register_opponent",
    "get_class",
    "list_registered",
    "TargetSet",
    "SupportValue",
    "Singleton",
    "NonpositiveOrthant",
    "Box",
    "HPolyhedron",
    "Ball",
    "steer_unbounded",
    "support_distance",
]
