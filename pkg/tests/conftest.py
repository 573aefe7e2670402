"""Pytest configuration and shared fixtures for approachability tests."""

import textwrap
from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict

import numpy as np
import pytest

from approachability.algorithms.base import StepOutcome
from approachability.algorithms.response_based import ResponseBasedApproacher
from approachability.core.games import VectorGame

ScenarioWriter = Callable[[str, str], Path]


@pytest.fixture
def rps_utility() -> np.ndarray:
    """Rock-paper-scissors utility for the row player."""
    return np.array(
        [
            [0.0, -1.0, 1.0],
            [1.0, 0.0, -1.0],
            [-1.0, 1.0, 0.0],
        ]
    )


@pytest.fixture
def small_utility() -> np.ndarray:
    """The 2x2 utility [[0, 1], [2, 3]] (action a2 dominates)."""
    return np.array([[0.0, 1.0], [2.0, 3.0]])


@pytest.fixture
def pennies_utility() -> np.ndarray:
    """Matching pennies."""
    return np.array([[1.0, -1.0], [-1.0, 1.0]])


@pytest.fixture
def scalar_game() -> VectorGame:
    """Scalar game [[3, 0], [1, 2]] with value 1.5."""
    return VectorGame(np.array([[3.0, 0.0], [1.0, 2.0]]))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def write_scenario(tmp_path: Path) -> ScenarioWriter:
    """
    Write a scenario document into tmp_path.

    Returns a function (name, text) -> path; the text is dedented.
    """

    def write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(textwrap.dedent(text).lstrip(), encoding="utf-8")
        return path

    return write


EXTERNAL_SCENARIO = """
id: external-small
problem:
  kind: external
  utility:
    - [0.0, -1.0, 1.0]
    - [1.0, 0.0, -1.0]
    - [-1.0, 1.0, 0.0]
algorithm:
  kind: response-based
opponent:
  kind: fixed-mixed
  q: [0.5, 0.3, 0.2]
n_steps: 200
seeds: [7, 8]
"""


@pytest.fixture
def external_scenario_text() -> str:
    """A small valid external-regret scenario."""
    return EXTERNAL_SCENARIO


@pytest.fixture
def external_scenario_path(write_scenario: ScenarioWriter) -> Path:
    return write_scenario("external.yaml", EXTERNAL_SCENARIO)


@pytest.fixture
def third_audit_fails(monkeypatch: pytest.MonkeyPatch) -> None:
    """Make the third committed step of every response-based run fail its audit."""
    original = ResponseBasedApproacher.commit
    steps: Dict[int, int] = {}

    def commit(self, plan, a_n: int, z_n: int) -> StepOutcome:
        outcome = original(self, plan, a_n, z_n)
        steps[id(self)] = steps.get(id(self), 0) + 1
        if steps[id(self)] == 3:
            return replace(outcome, audit_pass=False)
        return outcome

    monkeypatch.setattr(ResponseBasedApproacher, "commit", commit)
