"""Tests for global-cost regret: closed-form responses and the envelope check."""

import numpy as np
import pytest

from approachability.core.games import MixedAction
from approachability.core.registry import get_class
from approachability.problems.global_cost import (
    AbsoluteValue,
    DNorm,
    InfNorm,
    best_cost_in_hindsight,
    concave_envelope,
    global_cost_problem,
    global_cost_response,
    security_level_grid,
)

PURE = MixedAction.pure(1, 0)


def single_column(values) -> np.ndarray:
    return np.asarray(values, dtype=float)[:, None]


class TestLoadBalancing:
    """Tests for the d-norm and makespan responses."""

    def test_makespan_response(self):
        """Test losses (1, 2) with G = max: p* = (2/3, 1/3)."""
        G = InfNorm()
        v = G.payoff_tensor(single_column([1.0, 2.0]))
        p = global_cost_response(G, v, PURE)
        np.testing.assert_allclose(p.probs, [2 / 3, 1 / 3])
        assert best_cost_in_hindsight(G, v, PURE) == pytest.approx(2 / 3)

    def test_dnorm_response(self):
        """Test losses (1, 2) with the 2-norm: p* = (0.8, 0.2)."""
        G = DNorm(2.0)
        v = G.payoff_tensor(single_column([1.0, 2.0]))
        p = global_cost_response(G, v, PURE)
        np.testing.assert_allclose(p.probs, [0.8, 0.2])

    @pytest.mark.parametrize("order", [1.5, 2.0, 3.0])
    def test_dnorm_beats_random_mixtures(self, order: float, rng: np.random.Generator):
        """Test that no sampled mixed action has a lower d-norm cost than the response."""
        G = DNorm(order)
        v = G.payoff_tensor(rng.uniform(0.5, 3.0, size=(3, 2)))
        q = MixedAction.normalized(rng.dirichlet(np.ones(2)))
        best = best_cost_in_hindsight(G, v, q)
        for _ in range(200):
            p = rng.dirichlet(np.ones(3))
            assert G.cost(np.einsum("a,z,azk->k", p, q.probs, v)) >= best - 1e-12

    def test_zero_loss_actions(self):
        """Test that zero-loss actions share the probability and the cost is 0."""
        G = InfNorm()
        v = G.payoff_tensor(single_column([0.0, 1.0, 0.0]))
        np.testing.assert_allclose(global_cost_response(G, v, PURE).probs, [0.5, 0.0, 0.5])
        assert best_cost_in_hindsight(G, v, PURE) == 0.0

    @pytest.mark.parametrize("order", [1.0, 0.5, np.inf])
    def test_norm_order_range(self, order: float):
        """Test that norm orders outside (1, inf) are rejected."""
        with pytest.raises(ValueError, match="norm order"):
            DNorm(order)

    def test_negative_losses(self):
        """Test that negative losses are rejected."""
        with pytest.raises(ValueError, match="nonnegative"):
            InfNorm().payoff_tensor(single_column([1.0, -0.5]))


class TestAbsoluteValue:
    """Tests for G(v) = |v|."""

    def test_opposite_signs_mix_to_zero(self):
        """Test v = (2, -1): p* = (1/3, 2/3) and G* = 0."""
        G = AbsoluteValue()
        v = G.payoff_tensor(single_column([2.0, -1.0]))
        np.testing.assert_allclose(global_cost_response(G, v, PURE).probs, [1 / 3, 2 / 3])
        assert best_cost_in_hindsight(G, v, PURE) == pytest.approx(0.0, abs=1e-12)

    def test_same_sign_picks_smallest(self):
        """Test v = (2, 3): p* = delta_a1 and G* = 2."""
        G = AbsoluteValue()
        v = G.payoff_tensor(single_column([2.0, 3.0]))
        np.testing.assert_array_equal(global_cost_response(G, v, PURE).probs, [1.0, 0.0])
        assert best_cost_in_hindsight(G, v, PURE) == 2.0

    def test_zero_value_is_pure(self):
        """Test that an action with value exactly 0 is played pure."""
        G = AbsoluteValue()
        v = G.payoff_tensor(single_column([-1.0, 0.0, 4.0]))
        np.testing.assert_array_equal(global_cost_response(G, v, PURE).probs, [0.0, 1.0, 0.0])

    def test_goal_residual(self):
        """Test the satisficing residual G(v) - G*(q) on a point above the best cost."""
        G = AbsoluteValue()
        problem = global_cost_problem(G, G.payoff_tensor(single_column([2.0, 3.0])))
        assert problem.goal_residual(np.array([2.5]), PURE) == pytest.approx(0.5)
        assert problem.goal_residual(np.array([-1.5]), PURE) == 0.0


class TestEnvelope:
    """Tests for concave_envelope and the security comparison."""

    def test_fills_dip(self):
        """Test that a dip between two points is filled by the chord."""
        np.testing.assert_allclose(concave_envelope([0, 1, 2], [0, -1, 0]), [0, 0, 0])

    def test_concave_input_unchanged(self):
        """Test that a concave function is its own envelope."""
        xs = np.linspace(0, 1, 11)
        ys = -((xs - 0.3) ** 2)
        np.testing.assert_allclose(concave_envelope(xs, ys), ys)

    def test_envelope_dominates_and_is_concave(self, rng: np.random.Generator):
        """Test the envelope is above the data with nonpositive second differences."""
        xs = np.linspace(0, 1, 41)
        ys = rng.normal(size=41)
        envelope = concave_envelope(xs, ys)
        assert np.all(envelope >= ys - 1e-12)
        assert np.all(np.diff(envelope, 2) <= 1e-12)

    @pytest.mark.parametrize(
        "G, data",
        [
            (AbsoluteValue(), [[1.0, -2.0], [-1.0, 0.5]]),
            (InfNorm(), [[1.0, 2.0], [2.0, 0.5]]),
            (DNorm(2.0), [[1.0, 3.0], [2.0, 1.0]]),
        ],
    )
    def test_attainable_below_security(self, G, data):
        """Test max conc(G*) never exceeds the security level min_p max_q G."""
        attainable, security = security_level_grid(G, G.payoff_tensor(np.array(data)), 51)
        assert attainable <= security + 1e-12

    def test_security_needs_two_by_two(self):
        """Test that the grid comparison rejects games larger than 2x2."""
        G = AbsoluteValue()
        with pytest.raises(ValueError, match="2x2"):
            security_level_grid(G, G.payoff_tensor(np.ones((3, 2))))


class TestRegisteredProblems:
    """Tests for the registered global-cost factories."""

    @pytest.mark.parametrize(
        "kind, fields",
        [
            ("global-abs", {"values": [[1.0, -2.0], [-1.0, 0.5]]}),
            ("global-dnorm", {"losses": [[1.0, 3.0], [2.0, 1.0]], "norm_order": 3.0}),
            ("global-infnorm", {"losses": [[1.0, 2.0], [2.0, 0.5], [1.5, 1.5]]}),
        ],
    )
    def test_responses_certified(self, kind: str, fields: dict, rng: np.random.Generator):
        """Test that the built oracle lands in the graph target at random q."""
        problem = get_class("problem", kind).build(**fields)
        assert problem.target.dim == problem.game.dim
        problem.oracle.spot_check(problem.game, rng, count=30)
