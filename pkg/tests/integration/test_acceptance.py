"""
Acceptance Runs.

Full-length runs of the bundled scenarios checking the convergence bounds,
audits and problem-level guarantees. Deselected by default; run with
``pytest -m slow``.
"""

from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict

import numpy as np
import pytest

from approachability.cli.main import main
from approachability.cli.scenario import load_scenario
from approachability.core.games import certificate_gap, solve_zero_sum
from approachability.harness.opponents import (
    AdversarialOmniscient,
    FixedMixed,
    Opponent,
    PeriodicPure,
)
from approachability.harness.runner import RunSetup, run
from approachability.harness.sweep import sweep
from approachability.problems.constrained import as_cost_tensor
from approachability.problems.ratio import rho1_at_pure

pytestmark = pytest.mark.slow

SCENARIO_DIR = Path(__file__).resolve().parents[2] / "scenarios"
SEEDS = [1, 2, 3, 4, 5]
TOL = 1e-7

SMOOTHED_SCENARIOS = [
    "generic-singleton",
    "generic-ball-ogd",
    "external-rps",
    "internal-shapley",
    "blackwell-embedding",
    "global-abs",
    "global-infnorm",
    "global-dnorm",
    "ratio",
    "constrained",
]

OPPONENTS: Dict[str, Callable[[int], Opponent]] = {
    "fixed-mixed": lambda n_opp: FixedMixed(np.full(n_opp, 1.0 / n_opp)),
    "periodic-pure": lambda n_opp: PeriodicPure(list(range(n_opp))),
    "adversarial": lambda n_opp: AdversarialOmniscient(),
}


def load_setup(name: str, algorithm: str = "response-based") -> RunSetup:
    setup = load_scenario(SCENARIO_DIR / f"{name}.yaml").setup()
    return replace(setup, algorithm=algorithm)


def with_opponent(setup: RunSetup, make: Callable[[int], Opponent]) -> RunSetup:
    n_opp = setup.problem.game.n_opp
    return replace(setup, make_opponent=lambda: make(n_opp))


def running_mean(rows: np.ndarray) -> np.ndarray:
    return np.cumsum(rows, axis=0) / np.arange(1, rows.shape[0] + 1)[:, None]


def simplex_grid(steps: int) -> np.ndarray:
    return np.array(
        [
            (i / steps, j / steps, (steps - i - j) / steps)
            for i in range(steps + 1)
            for j in range(steps + 1 - i)
        ]
    )


class TestSaddleCertificates:
    """Zero-sum solutions on random games."""

    @pytest.mark.parametrize("size", [2, 5, 20])
    def test_certificate_gap(self, size: int):
        """Test the certificate gap stays below 1e-8 on 100 random games."""
        rng = np.random.default_rng(size)
        for _ in range(100):
            M = rng.uniform(-1.0, 1.0, size=(size, size))
            assert certificate_gap(M, solve_zero_sum(M)) <= 1e-8

    def test_value_against_grid(self):
        """Test 3x3 values lie between the grid maximin and minimax."""
        rng = np.random.default_rng(3)
        grid = simplex_grid(60)
        for _ in range(100):
            M = rng.uniform(-1.0, 1.0, size=(3, 3))
            value = solve_zero_sum(M).value
            lower = (grid @ M).min(axis=1).max()
            upper = (M @ grid.T).max(axis=0).min()
            assert lower - 1e-9 <= value <= upper + 1e-9
            assert value - lower <= 2e-2


class TestSmoothedBound:
    """||lambda_n|| <= rho/sqrt(n) and every audit, across problems and opponents."""

    @pytest.mark.parametrize("opponent", sorted(OPPONENTS))
    @pytest.mark.parametrize("name", SMOOTHED_SCENARIOS)
    def test_bound_and_audits(self, name: str, opponent: str):
        """Test every step of five seeds passes its audits and the gated bound."""
        setup = with_opponent(load_setup(name), OPPONENTS[opponent])
        for seed in SEEDS:
            _, report = run(setup, seed)
            assert report.n_steps == 10000
            assert report.audit_failures == []
            assert report.bound_violations == []


class TestIdling:
    """Idling on the external-regret scenario."""

    @pytest.mark.parametrize("opponent", sorted(OPPONENTS))
    def test_distance_bound(self, opponent: str):
        """Test d(r_bar_n, S) <= rho/sqrt(n) at every step."""
        setup = with_opponent(
            load_setup("external-idling", "response-based+idling"), OPPONENTS[opponent]
        )
        rho = setup.problem.rho
        for seed in SEEDS:
            records, report = run(setup, seed)
            assert report.passed
            dist = np.array([r.dist_to_S for r in records])
            n = np.arange(1, dist.size + 1)
            assert np.all(dist <= rho / np.sqrt(n) + 2 * TOL)


class TestRealizedSweep:
    """High-probability bound of realized-reward runs."""

    def test_violation_fraction(self):
        """Test at most a delta fraction of 200 seeds exceed the bound at n = 2000."""
        setup = load_setup("external-realized-sweep", "response-based-realized")
        result = sweep(setup, list(range(200)), checkpoints=[2000], delta=0.1)
        assert result.table["violation_fraction"].to_list()[0] <= 0.1

    def test_smoothed_realized_gap(self):
        """Test ||R_bar_n - r_bar_n|| <= 10 rho/sqrt(n) at n = 10^4 for 95% of 200 seeds."""
        setup = load_setup("external-rps", "response-based-realized")
        rho = setup.problem.rho
        gaps = []
        for seed in range(200):
            records, _ = run(setup, seed)
            smoothed = np.mean([r.r_n for r in records], axis=0)
            realized = np.mean([r.R_n for r in records], axis=0)
            gaps.append(np.linalg.norm(realized - smoothed))
        assert np.mean(np.array(gaps) <= 10 * rho / np.sqrt(10000)) >= 0.95


class TestNoRegret:
    """Regret vectors of smoothed runs."""

    @pytest.mark.parametrize("name", ["external-rps", "internal-shapley"])
    def test_max_regret(self, name: str):
        """Test the largest regret coordinate stays below rho/sqrt(n) at every step."""
        setup = load_setup(name)
        rho = setup.problem.rho
        for seed in SEEDS:
            records, _ = run(setup, seed)
            worst = running_mean(np.stack([r.r_n for r in records])).max(axis=1)
            n = np.arange(1, worst.size + 1)
            assert np.all(worst <= rho / np.sqrt(n) + TOL)


class TestRatio:
    """Reward-to-cost ratio against constant opponents."""

    @pytest.mark.parametrize("z", [0, 1, 2])
    def test_ratio_reaches_best(self, z: int):
        """Test U_bar/C_bar >= rho*(delta_z) - 0.02 after 10^4 steps."""
        setup = replace(load_setup("ratio"), make_opponent=lambda: PeriodicPure([z]))
        scenario = load_scenario(SCENARIO_DIR / "ratio.yaml")
        u = np.array(scenario.problem.utility)
        c = np.array(scenario.problem.cost)
        _, report = run(setup, 1)
        assert report.summary["ratio"] >= rho1_at_pure(u, c, z) - 0.02


class TestConstrained:
    """Average-cost constraint and constrained reward."""

    @pytest.mark.parametrize("opponent", sorted(OPPONENTS))
    def test_cost_and_reward(self, opponent: str):
        """Test d(c_bar_n, Gamma) and the reward shortfall stay below rho/sqrt(n)."""
        scenario = load_scenario(SCENARIO_DIR / "constrained.yaml")
        setup = with_opponent(scenario.setup(), OPPONENTS[opponent])
        rho = setup.problem.rho
        cap = scenario.problem.constraint.upper[0]
        s = as_cost_tensor(scenario.problem.cost, (3, 2)).shape[2]
        for seed in SEEDS:
            records, report = run(setup, seed)
            assert report.passed
            averages = running_mean(np.stack([r.r_n for r in records]))
            targets = running_mean(np.stack([r.r_star for r in records]))
            n = np.arange(1, averages.shape[0] + 1)
            excess = np.maximum(averages[:, 1 : 1 + s] - cap, 0.0)
            assert np.all(np.linalg.norm(excess, axis=1) <= rho / np.sqrt(n) + TOL)
            # r_star[0] is the constrained best reward at the auxiliary action
            assert np.all(averages[:, 0] >= targets[:, 0] - rho / np.sqrt(n) - TOL)


class TestGradientBaseline:
    """Online-gradient baseline on compact targets."""

    @pytest.mark.parametrize("opponent", sorted(OPPONENTS))
    @pytest.mark.parametrize("name", ["generic-ball-ogd", "generic-singleton"])
    def test_distance(self, name: str, opponent: str):
        """Test d(r_bar_n, S) <= 5 rho/sqrt(n) at n = 10^3 and 10^4."""
        setup = with_opponent(load_setup(name, "ogd-support"), OPPONENTS[opponent])
        rho = setup.problem.rho
        records, report = run(setup, 1)
        assert report.audit_failures == []
        assert records[0].dist_to_S > 0.3
        for n in (1000, 10000):
            assert records[n - 1].dist_to_S <= 5 * rho / np.sqrt(n)


class TestDeterminism:
    """Byte-identical outputs."""

    def test_sweep_csv(self, tmp_path: Path):
        """Test two sweeps of the same scenario write identical CSVs."""
        scenario = SCENARIO_DIR / "external-realized-sweep.yaml"
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", str(scenario), "--out", str(first)]) == 0
        assert main(["sweep", str(scenario), "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_workers_do_not_change_results(self):
        """Test a sweep over worker processes matches the in-process sweep."""
        scenario = load_scenario(SCENARIO_DIR / "external-realized-sweep.yaml")
        serial = sweep(scenario, scenario.seeds, checkpoints=[10, 2000], workers=1)
        parallel = sweep(scenario, scenario.seeds, checkpoints=[10, 2000], workers=3)
        assert serial.table.equals(parallel.table)

    def test_periodic_smoothed_seed_invariance(self):
        """Test smoothed steering against a periodic opponent ignores the seed."""
        setup = replace(
            load_setup("external-rps"), make_opponent=lambda: PeriodicPure([0, 1, 2, 2])
        )
        first, _ = run(setup, 1)
        second, _ = run(setup, 2)
        np.testing.assert_array_equal(
            [r.lambda_norm for r in first], [r.lambda_norm for r in second]
        )
