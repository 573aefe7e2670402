"""Regret problems reduced to vector games with certified response oracles."""

from .base import (
    GraphTarget,
    Problem,
    ProblemFactory,
    SatisficingProblem,
    build_generalized,
)
from .blackwell import build_blackwell_embedding
from .constrained import constrained_response
from .external import build_external_game, external_regret
from .generic import GenericVectorGame
from .global_cost import (
    AbsoluteValue,
    DNorm,
    InfNorm,
    best_cost_in_hindsight,
    concave_envelope,
    global_cost_response,
    security_level_grid,
)
from .internal import build_internal_game, internal_regret
from .ratio import ratio_response, rho1_at_pure, rho_star

__all__ = [
    "Problem",
    "ProblemFactory",
    "SatisficingProblem",
    "GraphTarget",
    "build_generalized",
    "build_external_game",
    "external_regret",
    "build_internal_game",
    "internal_regret",
    "build_blackwell_embedding",
    "AbsoluteValue",
    "DNorm",
    "InfNorm",
    "global_cost_response",
    "best_cost_in_hindsight",
    "concave_envelope",
    "security_level_grid",
    "ratio_response",
    "rho_star",
    "rho1_at_pure",
    "constrained_response",
    "GenericVectorGame",
]
