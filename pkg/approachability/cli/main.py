"""Command-line entry point.

    approachability run SCENARIO [--seed N] [--out FILE] [--fail-fast]
    approachability sweep SCENARIO [--out FILE] [--workers N]
    approachability report CSV [CSV ...]
    approachability validate SCENARIO

Exit codes: 0 when every audit and bound passed, 2 for invalid scenarios or
malformed inputs, 3 for certification, audit or bound failures, 4 for
internal solver failures.
"""

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

from ..core.errors import (
    ApproachabilityError,
    AuditError,
    CertificationError,
    RunAborted,
    ScenarioError,
)
from ..harness.runner import run
from ..harness.sweep import sweep_scenario
from .output import (
    read_run_csv,
    run_verdicts,
    summary_path,
    write_run_csv,
    write_summary,
    write_sweep_csv,
)
from .scenario import Scenario, load_scenario

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_VIOLATION = 3
EXIT_SOLVER = 4


def exit_code(error: BaseException) -> int:
    """Exit code for an error raised by a command."""
    if isinstance(error, RunAborted):
        return exit_code(error.cause)
    if isinstance(error, ScenarioError):
        return EXIT_SCENARIO
    if isinstance(error, (CertificationError, AuditError)):
        return EXIT_VIOLATION
    # SolverError and anything else unexpected is an internal failure
    return EXIT_SOLVER


def _now() -> datetime:
    return datetime.now(timezone.utc)


def cmd_run(
    scenario_path: Path, seed: Optional[int], out: Optional[Path], fail_fast: bool = False
) -> int:
    """Run one seed and write its CSV and summary (partial ones if the run aborts)."""
    started = _now()
    scenario = load_scenario(scenario_path)
    seed = scenario.seeds[0] if seed is None else seed
    out = out or Path(f"{scenario.id}-seed{seed}.csv")
    try:
        records, report = run(scenario, seed, fail_fast=fail_fast)
    except RunAborted as e:
        write_run_csv(out, scenario.id, seed, e.records)
        write_summary(
            summary_path(out),
            scenario.id,
            scenario.config_hash(),
            started,
            [],
            extra={"seed": seed, "error": str(e), "failed_step": e.step, "passed": False},
        )
        raise
    write_run_csv(out, scenario.id, seed, records)
    write_summary(summary_path(out), scenario.id, scenario.config_hash(), started, [report])

    if not report.passed:
        _logger.error(
            f"{scenario.id} seed={seed}: {len(report.audit_failures)} audit failures "
            f"(first at {report.audit_failures[:1]}), {len(report.bound_violations)} "
            f"bound violations (first at {report.bound_violations[:1]})"
        )
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_sweep(scenario_path: Path, out: Optional[Path], workers: Optional[int]) -> int:
    """Sweep every declared seed and write the checkpoint table."""
    started = _now()
    scenario = load_scenario(scenario_path)
    out = out or Path(f"{scenario.id}-sweep.csv")
    result = sweep_scenario(scenario, workers=workers)
    write_sweep_csv(out, scenario.id, result)
    write_summary(
        summary_path(out),
        scenario.id,
        scenario.config_hash(),
        started,
        result.reports,
        extra={"delta": result.delta, "rho": result.rho},
    )
    if not result.passed:
        failed = [r.seed for r in result.reports if not r.passed]
        _logger.error(f"{scenario.id}: audits or bounds failed for seeds {failed}")
        return EXIT_VIOLATION
    return EXIT_OK


def _is_gated(csv_path: Path) -> bool:
    """Realized-reward runs do not gate the bound; read that from the summary."""
    manifest = summary_path(csv_path)
    if not manifest.exists():
        return True
    try:
        runs = json.loads(manifest.read_text(encoding="utf-8")).get("runs", [])
    except (OSError, ValueError):
        return True
    return not any(r.get("flags", {}).get("realized", False) for r in runs)


def cmd_report(csv_paths: List[Path]) -> int:
    """Print one PASS/FAIL line per run; nonzero exit if any run failed."""
    all_passed = True
    for path in csv_paths:
        verdicts = run_verdicts(read_run_csv(path), gated=_is_gated(path))
        for row in verdicts.iter_rows(named=True):
            status = "PASS" if row["passed"] else "FAIL"
            all_passed = all_passed and row["passed"]
            ratio = "n/a" if row["max_ratio"] is None else f"{row['max_ratio']:.6f}"
            dist = "n/a" if row["final_dist"] is None else f"{row['final_dist']:.6g}"
            print(
                f"{status} {row['scenario_id']} seed={row['seed']} steps={row['steps']} "
                f"max_ratio={ratio} final_dist={dist} "
                f"audits={row['audits_passed']}/{row['steps']}"
            )
    return EXIT_OK if all_passed else EXIT_VIOLATION


def cmd_validate(scenario_path: Path) -> int:
    """Validate a scenario and print its normalized form."""
    scenario: Scenario = load_scenario(scenario_path)
    print(scenario.to_yaml(), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="approachability",
        description="Run response-based approachability experiments from scenario files.",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Log per-step details (DEBUG)."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="Run one seed of a scenario.")
    p_run.add_argument("scenario", type=Path)
    p_run.add_argument("--seed", type=int, default=None, help="Seed (default: first declared).")
    p_run.add_argument("--out", type=Path, default=None, help="Run CSV path.")
    p_run.add_argument(
        "--fail-fast", action="store_true", help="Stop at the first failed audit or bound."
    )

    p_sweep = sub.add_parser("sweep", help="Run all declared seeds and aggregate.")
    p_sweep.add_argument("scenario", type=Path)
    p_sweep.add_argument("--out", type=Path, default=None, help="Sweep CSV path.")
    p_sweep.add_argument(
        "--workers", type=int, default=None, help="Worker processes (overrides the scenario)."
    )

    p_report = sub.add_parser("report", help="Summarize run CSVs.")
    p_report.add_argument("csv", type=Path, nargs="+")

    p_validate = sub.add_parser("validate", help="Validate and echo a scenario.")
    p_validate.add_argument("scenario", type=Path)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "run":
            return cmd_run(args.scenario, args.seed, args.out, args.fail_fast)
        if args.command == "sweep":
            if args.workers is not None and args.workers < 1:
                parser.error("--workers must be at least 1")
            return cmd_sweep(args.scenario, args.out, args.workers)
        if args.command == "report":
            return cmd_report(args.csv)
        return cmd_validate(args.scenario)
    except ApproachabilityError as e:
        print(f"error: {e}", file=sys.stderr)
        return exit_code(e)


if __name__ == "__main__":
    sys.exit(main())
