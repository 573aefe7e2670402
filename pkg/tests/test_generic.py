"""Tests for inline vector games and their response rules."""

from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from approachability.cli.scenario import load_scenario
from approachability.core.errors import CertificationError, ScenarioError
from approachability.core.games import MixedAction, VectorGame
from approachability.core.sets import Ball, Box, NonpositiveOrthant, Singleton
from approachability.harness.runner import RunSetup, run
from approachability.problems.base import GraphTarget
from approachability.problems.blackwell import classical_problem
from approachability.problems.generic import (
    GenericVectorGame,
    auto_response,
    least_violation_response,
    rewards_matrix,
)

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"

# r(a, z) = e_{a xor z}
SWAP_PAYOFF = np.array(
    [
        [[1.0, 0.0], [0.0, 1.0]],
        [[0.0, 1.0], [1.0, 0.0]],
    ]
)


class TestRewardsMatrix:
    """Tests for rewards_matrix."""

    def test_columns_are_pure_rewards(self):
        """Test column a of R_q equals r(delta_a, q)."""
        game = VectorGame(SWAP_PAYOFF)
        R = rewards_matrix(game, MixedAction(np.array([0.7, 0.3])))
        np.testing.assert_allclose(R, [[0.7, 0.3], [0.3, 0.7]])


class TestAutoResponse:
    """Tests for the numerical response rule."""

    @pytest.mark.parametrize(
        "target",
        [
            Singleton(np.array([0.5, 0.5])),
            Ball(np.array([0.5, 0.5]), 0.1),
            Box(lower=[0.4, 0.4], upper=[0.6, 0.6]),
        ],
    )
    def test_lands_in_target(self, target, rng: np.random.Generator):
        """Test that auto responses are certified against every q sampled."""
        game = VectorGame(SWAP_PAYOFF)
        respond = auto_response(game, target)
        for _ in range(20):
            q = MixedAction.normalized(rng.dirichlet(np.ones(2)))
            reward = np.einsum("a,z,azk->k", respond(q).probs, q.probs, game.payoff)
            assert target.residual(reward) <= 1e-6

    def test_least_violation_when_unreachable(self):
        """Test that an unreachable orthant gets the least-violating mixture."""
        game = VectorGame(SWAP_PAYOFF)
        p = least_violation_response(game, NonpositiveOrthant(2), MixedAction.pure(2, 0))
        # Every mixture has coordinates summing to 1; the best worst coordinate is 1/2
        np.testing.assert_allclose(p.probs, [0.5, 0.5], atol=1e-9)

    def test_rejects_graph_target(self, small_utility: np.ndarray):
        """Test that auto needs a polyhedral or ball target."""
        target = GraphTarget(classical_problem(small_utility))
        game = VectorGame(np.zeros((2, 2, target.dim)))
        with pytest.raises(ScenarioError, match="polyhedral or ball"):
            auto_response(game, target)


class TestGenericVectorGame:
    """Tests for the registered generic-vector factory."""

    def test_auto_problem(self, rng: np.random.Generator):
        """Test an auto problem passes the oracle spot check."""
        problem = GenericVectorGame.build(
            payoff=SWAP_PAYOFF, target=Singleton(np.array([0.5, 0.5]))
        )
        assert problem.oracle.name == "generic/auto"
        problem.oracle.spot_check(problem.game, rng)

    def test_constant_miscertified(self, rng: np.random.Generator):
        """Test a constant response that misses the target fails the spot check."""
        problem = GenericVectorGame.build(
            payoff=SWAP_PAYOFF,
            target=Singleton(np.array([0.5, 0.5])),
            rule="constant",
            action=[1.0, 0.0],
        )
        with pytest.raises(CertificationError):
            problem.oracle.spot_check(problem.game, rng)

    def test_constant_wrong_size(self):
        """Test that a constant action must match the agent's action count."""
        with pytest.raises(ScenarioError, match="3 entries"):
            GenericVectorGame.build(
                payoff=SWAP_PAYOFF,
                target=Singleton(np.array([0.5, 0.5])),
                rule="constant",
                action=[0.2, 0.3, 0.5],
            )

    def test_constant_needs_action(self):
        """Test that rule 'constant' without an action is rejected."""
        with pytest.raises(ScenarioError, match="needs an action"):
            GenericVectorGame.build(
                payoff=SWAP_PAYOFF, target=Singleton(np.array([0.5, 0.5])), rule="constant"
            )

    def test_unknown_rule(self):
        """Test that unknown response rules are rejected."""
        with pytest.raises(ScenarioError, match="unknown response rule"):
            GenericVectorGame.build(
                payoff=SWAP_PAYOFF, target=Singleton(np.array([0.5, 0.5])), rule="greedy"
            )

    def test_missing_target(self):
        """Test that a target set is required."""
        with pytest.raises(ScenarioError, match="need a target set"):
            GenericVectorGame.build(payoff=SWAP_PAYOFF)


class TestBundledScenarios:
    """Tests for the bundled generic-vector scenarios."""

    @pytest.fixture
    def singleton_setup(self) -> RunSetup:
        setup = load_scenario(SCENARIO_DIR / "generic-singleton.yaml").setup()
        return replace(setup, n_steps=300)

    def test_no_fixed_action_reaches_target(self, singleton_setup: RunSetup):
        """Test every mixed action pays differently against the two opponent actions."""
        payoff = singleton_setup.problem.game.payoff
        offsets = payoff[:, 0, :] - payoff[:, 1, :]
        np.testing.assert_allclose(offsets, np.tile([0.3, -0.1], (3, 1)), atol=1e-12)

    def test_learner_closes_distance(self, singleton_setup: RunSetup):
        """Test the response-based learner moves from a far start to within rho/sqrt(n)."""
        records, report = run(singleton_setup, 1)
        rho = singleton_setup.problem.rho
        assert report.passed
        assert records[0].dist_to_S > 0.4
        assert records[-1].dist_to_S <= rho / np.sqrt(300) + 1e-6

    def test_gradient_baseline_runs(self):
        """Test the ball scenario passes its per-step audits under the gradient baseline."""
        setup = load_scenario(SCENARIO_DIR / "generic-ball-ogd.yaml").setup()
        records, report = run(replace(setup, n_steps=200), 1)
        assert report.audit_failures == []
        assert records[0].dist_to_S > 0.3
