"""Simulation harness: random streams, opponents, records, runs and sweeps."""

from .opponents import (
    AdversarialOmniscient,
    BestResponseToEmpirical,
    FixedMixed,
    Opponent,
    OpponentView,
    PeriodicPure,
    make_opponent,
)
from .records import (
    IncrementCheck,
    RunReport,
    StepRecord,
    average_reward,
    realized_increment_check,
    records_frame,
)
from .rng import RunStreams, make_streams
from .runner import RunSetup, build_approacher, run
from .sweep import SweepResult, high_probability_bound, sweep, sweep_scenario

__all__ = [
    "make_streams",
    "RunStreams",
    "Opponent",
    "OpponentView",
    "FixedMixed",
    "PeriodicPure",
    "AdversarialOmniscient",
    "BestResponseToEmpirical",
    "make_opponent",
    "StepRecord",
    "RunReport",
    "IncrementCheck",
    "records_frame",
    "average_reward",
    "realized_increment_check",
    "RunSetup",
    "build_approacher",
    "run",
    "SweepResult",
    "sweep",
    "sweep_scenario",
    "high_probability_bound",
]
