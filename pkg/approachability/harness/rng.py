"""Seeded random streams for a run.

A run seed is expanded with numpy's SeedSequence into independent child
streams, one per consumer:

- agent: sampling a_n from p_n
- opponent: the opponent's own randomization
- checks: pre-run oracle spot checks

Each consumer draws only from its own stream, so adding a consumer (or a
diagnostic that needs randomness) never shifts the others.
"""

from dataclasses import dataclass

import numpy as np

STREAM_NAMES = ("agent", "opponent", "checks")


@dataclass(frozen=True, eq=False)
class RunStreams:
    """Independent generators spawned from one run seed."""

    seed: int
    agent: np.random.Generator
    opponent: np.random.Generator
    checks: np.random.Generator


def make_streams(seed: int) -> RunStreams:
    """
    Spawn the agent, opponent and check streams of a run.

    Args:
        seed: Nonnegative run seed

    Returns:
        RunStreams whose generators are a pure function of `seed`
    """
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
    agent, opponent, checks = (np.random.default_rng(child) for child in children)
    return RunStreams(seed=seed, agent=agent, opponent=opponent, checks=checks)
