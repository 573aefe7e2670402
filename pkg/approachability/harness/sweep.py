"""Multi-seed sweeps of the steering norm.

At each checkpoint n the sweep reports the median, 95% quantile and maximum
of ||lambda_n|| across seeds. A seed violates the high-probability bound
sqrt(6 rho^2 / (delta n)) of realized-reward runs at n when its suffix
maximum max_{k >= n} ||lambda_k|| exceeds it.

Runs can be spread over worker processes. Results are merged by seed order,
so the output does not depend on the number of workers.
"""

import logging
import multiprocessing
import traceback
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import polars as pl

from ..core.errors import (
    ApproachabilityError,
    CertificationError,
    RunAborted,
    ScenarioError,
    SolverError,
)
from .records import RunReport
from .runner import RunSetup, ScenarioLike, run, steering_norms

_logger = logging.getLogger(__name__)

DEFAULT_CHECKPOINTS = (10, 100, 1000, 10000)

DEFAULT_DELTA = 0.1

# Errors re-raised in the parent under their own type
_WORKER_ERRORS = {
    cls.__name__: cls
    for cls in (ScenarioError, CertificationError, SolverError, ApproachabilityError)
}


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Sweep table plus the per-seed run reports (in seed order).

    Attributes:
        table: One row per checkpoint with columns n_checkpoint, quantile_50,
            quantile_95, max, theorem3_bound, violation_fraction
        reports: RunReport of every seed
        rho: Span of the game
        delta: Confidence parameter of the bound
    """

    table: pl.DataFrame
    reports: List[RunReport]
    rho: float
    delta: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def high_probability_bound(rho: float, delta: float, n: int) -> float:
    """sqrt(6 rho^2 / (delta n)), exceeded with probability at most delta."""
    return float(np.sqrt(6.0 * rho * rho / (delta * n)))


def suffix_max(norms: np.ndarray, checkpoints: Sequence[int]) -> np.ndarray:
    """max_{k >= n} norms[k - 1] for each checkpoint n."""
    tail = np.maximum.accumulate(norms[::-1])[::-1]
    return np.array([tail[n - 1] for n in checkpoints])


def resolve_checkpoints(checkpoints: Optional[Sequence[int]], n_steps: int) -> List[int]:
    """Sorted checkpoints within 1..n_steps (the default grid if none given)."""
    grid = DEFAULT_CHECKPOINTS if checkpoints is None else checkpoints
    kept = sorted({int(n) for n in grid if 1 <= n <= n_steps})
    if not kept:
        raise ScenarioError(f"no sweep checkpoint within 1..{n_steps}")
    return kept


def _run_seed(scenario: Any, seed: int) -> Tuple[np.ndarray, RunReport]:
    records, report = run(scenario, seed)
    norms = steering_norms(records)
    if np.any(np.isnan(norms)):
        raise ScenarioError(
            f"algorithm {report.algorithm!r} has no steering vector to sweep over"
        )
    return norms, report


def _sweep_worker(
    scenario: Any,
    seeds: List[int],
    queue: multiprocessing.Queue,
) -> None:
    """Run a chunk of seeds in a subprocess and send the results back."""
    try:
        for seed in seeds:
            norms, report = _run_seed(scenario, seed)
            queue.put(("ok", seed, norms, report))
    except Exception as e:
        cause = e.cause if isinstance(e, RunAborted) else e
        queue.put(("error", type(cause).__name__, str(e), traceback.format_exc()))
    queue.put(("done",))


def _run_parallel(
    scenario: Any, seeds: List[int], workers: int
) -> Dict[int, Tuple[np.ndarray, RunReport]]:
    # Spawn for a fresh interpreter per worker; seeds are dealt round-robin
    ctx = multiprocessing.get_context("spawn")
    queue = ctx.Queue()
    chunks = [seeds[i::workers] for i in range(workers)]
    processes = [
        ctx.Process(target=_sweep_worker, args=(scenario, chunk, queue))
        for chunk in chunks
        if chunk
    ]
    for process in processes:
        process.start()

    results: Dict[int, Tuple[np.ndarray, RunReport]] = {}
    error: Optional[Tuple[str, str, str]] = None
    pending = len(processes)
    while pending:
        message = queue.get()
        if message[0] == "done":
            pending -= 1
        elif message[0] == "ok":
            _, seed, norms, report = message
            results[seed] = (norms, report)
            _logger.debug(f"Seed {seed} finished in a worker ({len(results)}/{len(seeds)})")
        elif error is None:
            error = message[1:]
    for process in processes:
        process.join()

    if error is not None:
        exc_type, exc_msg, exc_tb = error
        cls = _WORKER_ERRORS.get(exc_type)
        if cls is not None:
            raise cls(exc_msg)
        raise RuntimeError(
            f"Sweep worker failed with {exc_type}: {exc_msg}\n"
            f"Worker traceback:\n{exc_tb}"
        )
    return results


def sweep(
    scenario: Any,
    seeds: Sequence[int],
    checkpoints: Optional[Sequence[int]] = None,
    delta: float = DEFAULT_DELTA,
    workers: int = 1,
) -> SweepResult:
    """
    Run every seed and aggregate the steering norms at the checkpoints.

    Args:
        scenario: Validated scenario, or a RunSetup (always run in-process)
        seeds: Seeds to run; at least one
        checkpoints: Checkpoint grid, default 10, 100, 1000, 10000
        delta: Confidence parameter of the bound, in (0, 1)
        workers: Number of worker processes

    Returns:
        SweepResult with the aggregated table and the run reports

    Raises:
        ScenarioError: If there are no seeds or no usable checkpoints
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ScenarioError("a sweep needs at least one seed")
    if len(set(seeds)) != len(seeds):
        raise ScenarioError(f"sweep seeds must be distinct, got {seeds}")
    if not 0 < delta < 1:
        raise ScenarioError(f"delta must lie in (0, 1), got {delta}")

    setup = scenario if isinstance(scenario, RunSetup) else None
    if workers > 1 and setup is not None:
        _logger.warning("RunSetup objects cannot be sent to workers; sweeping in-process")
        workers = 1
    if setup is None:
        setup = scenario.setup()
    marks = resolve_checkpoints(checkpoints, setup.n_steps)
    rho = setup.problem.rho

    _logger.info(f"Sweep {setup.scenario_id!r}: {len(seeds)} seeds, {workers} workers")
    if workers > 1:
        results = _run_parallel(scenario, seeds, min(workers, len(seeds)))
    else:
        results = {seed: _run_seed(setup, seed) for seed in seeds}

    rows = []
    for seed in seeds:
        norms, _ = results[seed]
        for n, tail in zip(marks, suffix_max(norms, marks)):
            rows.append(
                {
                    "seed": seed,
                    "n_checkpoint": n,
                    "norm": float(norms[n - 1]),
                    "suffix_max": float(tail),
                }
            )
    long = pl.DataFrame(
        rows,
        schema={
            "seed": pl.Int64,
            "n_checkpoint": pl.Int64,
            "norm": pl.Float64,
            "suffix_max": pl.Float64,
        },
    )
    bounds = pl.DataFrame(
        {
            "n_checkpoint": marks,
            "theorem3_bound": [high_probability_bound(rho, delta, n) for n in marks],
        },
        schema={"n_checkpoint": pl.Int64, "theorem3_bound": pl.Float64},
    )
    table = (
        long.join(bounds, on="n_checkpoint")
        .group_by("n_checkpoint")
        .agg(
            pl.col("norm").quantile(0.5, interpolation="linear").alias("quantile_50"),
            pl.col("norm").quantile(0.95, interpolation="linear").alias("quantile_95"),
            pl.col("norm").max().alias("max"),
            pl.col("theorem3_bound").first(),
            (pl.col("suffix_max") > pl.col("theorem3_bound"))
            .cast(pl.Float64)
            .mean()
            .alias("violation_fraction"),
        )
        .sort("n_checkpoint")
    )
    reports = [results[seed][1] for seed in seeds]
    return SweepResult(table=table, reports=reports, rho=rho, delta=delta)


def sweep_scenario(scenario: ScenarioLike, workers: Optional[int] = None) -> SweepResult:
    """Sweep with the seeds, checkpoints, delta and workers the scenario declares."""
    settings = scenario.sweep_settings()
    return sweep(
        scenario,
        seeds=settings["seeds"],
        checkpoints=settings.get("checkpoints"),
        delta=settings.get("delta", DEFAULT_DELTA),
        workers=settings.get("workers", 1) if workers is None else workers,
    )
