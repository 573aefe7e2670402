"""Approaching algorithms: the response-based learner and the baselines."""

from .base import (
    Approacher,
    LearnerState,
    PlannedStep,
    ResponseOracle,
    StepOutcome,
    Variant,
)
from .ogd import OGDSupport, ogd_support_plan
from .primal import PrimalBlackwell, primal_plan
from .regret_matching import RegretMatching, regret_matching_policy
from .response_based import (
    RecursionAudit,
    ResponseBasedApproacher,
    audit_recursion,
    check_saddle_chain,
    commit_step,
    idle_update,
    plan_step,
)

__all__ = [
    "Approacher",
    "LearnerState",
    "PlannedStep",
    "ResponseOracle",
    "StepOutcome",
    "Variant",
    "ResponseBasedApproacher",
    "RecursionAudit",
    "plan_step",
    "commit_step",
    "idle_update",
    "audit_recursion",
    "check_saddle_chain",
    "PrimalBlackwell",
    "primal_plan",
    "OGDSupport",
    "ogd_support_plan",
    "RegretMatching",
    "regret_matching_policy",
]
