"""CSV and JSON writers for runs and sweeps.

Every CSV starts with a schema_version column. Floats are written with
Python's shortest round-trip representation, missing values as empty
fields and booleans as true/false, so identical runs give identical bytes.
"""

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import polars as pl

from ..algorithms.base import BOUND_TOL
from ..core.errors import ScenarioError
from ..harness.records import RunReport, StepRecord, records_frame
from ..harness.sweep import SweepResult

_logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

RUN_COLUMNS = [
    "schema_version",
    "scenario_id",
    "seed",
    "n",
    "a_n",
    "z_n",
    "lambda_norm",
    "dist_to_S",
    "game_value",
    "recursion_audit_pass",
    "bound_ratio",
]

SWEEP_COLUMNS = [
    "schema_version",
    "scenario_id",
    "n_checkpoint",
    "quantile_50",
    "quantile_95",
    "max",
    "theorem3_bound",
    "violation_fraction",
]

def format_value(value: Any) -> Optional[str]:
    """Text of one CSV cell; None stays None (written as an empty field)."""
    if value is None:
        return None
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _text_frame(columns: Dict[str, List[Any]], order: Sequence[str]) -> pl.DataFrame:
    data = {name: [format_value(v) for v in columns[name]] for name in order}
    return pl.DataFrame(data, schema={name: pl.Utf8 for name in order})


def write_run_csv(
    path: Union[str, Path], scenario_id: str, seed: int, records: Sequence[StepRecord]
) -> Path:
    """Write a trajectory as a run CSV (header plus one row per step)."""
    path = Path(path)
    frame = records_frame(records)
    count = frame.height
    columns: Dict[str, List[Any]] = {
        "schema_version": [SCHEMA_VERSION] * count,
        "scenario_id": [scenario_id] * count,
        "seed": [seed] * count,
    }
    for name in RUN_COLUMNS[3:]:
        columns[name] = frame[name].to_list()
    text = _text_frame(columns, RUN_COLUMNS)
    path.parent.mkdir(parents=True, exist_ok=True)
    text.write_csv(path)
    _logger.info(f"Wrote {count} steps to {path}")
    return path


def write_sweep_csv(path: Union[str, Path], scenario_id: str, result: SweepResult) -> Path:
    """Write the per-checkpoint sweep table."""
    path = Path(path)
    table = result.table
    count = table.height
    columns: Dict[str, List[Any]] = {
        "schema_version": [SCHEMA_VERSION] * count,
        "scenario_id": [scenario_id] * count,
    }
    for name in SWEEP_COLUMNS[2:]:
        columns[name] = table[name].to_list()
    text = _text_frame(columns, SWEEP_COLUMNS)
    path.parent.mkdir(parents=True, exist_ok=True)
    text.write_csv(path)
    _logger.info(f"Wrote sweep table ({count} checkpoints) to {path}")
    return path


def summary_path(csv_path: Union[str, Path]) -> Path:
    """Summary JSON written next to a CSV: results.csv -> results.summary.json."""
    csv_path = Path(csv_path)
    return csv_path.with_name(f"{csv_path.stem}.summary.json")


def write_summary(
    path: Union[str, Path],
    scenario_id: str,
    scenario_hash: str,
    started_at: datetime,
    reports: Sequence[RunReport],
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """
    Write a JSON manifest describing one run or one sweep.

    Args:
        path: Output file
        scenario_id: Scenario identifier
        scenario_hash: SHA-256 of the normalized scenario
        started_at: When the command started (UTC)
        reports: Run reports (one per seed)
        extra: Additional top-level fields (for example an error)
    """
    path = Path(path)
    manifest: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "scenario_id": scenario_id,
        "scenario_hash": scenario_hash,
        "seeds": [r.seed for r in reports],
        "started_at": started_at.isoformat(),
        "finished_at": datetime.now(timezone.utc).isoformat(),
        "passed": all(r.passed for r in reports),
        "runs": [r.to_dict() for r in reports],
    }
    if extra:
        manifest.update(extra)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, default=str), encoding="utf-8")
    _logger.info(f"Wrote summary to {path}")
    return path


# =============================================================================
# Reading runs back
# =============================================================================


def read_run_csv(path: Union[str, Path]) -> pl.DataFrame:
    """
    Read a run CSV written by write_run_csv.

    Returns:
        Typed DataFrame with the run columns

    Raises:
        ScenarioError: If the file is unreadable or not a run CSV of a
            supported schema version
    """
    path = Path(path)
    try:
        raw = pl.read_csv(path, infer_schema_length=0)
    except Exception as e:
        raise ScenarioError(f"{path}: cannot read run CSV: {e}") from e
    if raw.columns != RUN_COLUMNS:
        raise ScenarioError(f"{path}: expected columns {RUN_COLUMNS}, got {raw.columns}")
    versions = set(raw["schema_version"].to_list())
    if versions - {str(SCHEMA_VERSION)}:
        raise ScenarioError(f"{path}: unsupported schema_version {sorted(versions)}")
    try:
        return raw.with_columns(
            pl.col("seed", "n", "a_n", "z_n").cast(pl.Int64),
            pl.col("lambda_norm", "dist_to_S", "game_value", "bound_ratio").cast(pl.Float64),
            (pl.col("recursion_audit_pass") == "true").alias("recursion_audit_pass"),
        )
    except pl.exceptions.PolarsError as e:
        raise ScenarioError(f"{path}: malformed values: {e}") from e


def run_verdicts(frame: pl.DataFrame, gated: bool = True) -> pl.DataFrame:
    """
    One row per (scenario_id, seed) with the pass/fail criteria of a run.

    A run passes when every step's audits passed and, for runs whose bound
    is gated (all but realized-reward runs), no step's steering norm exceeded
    rho/sqrt(n) by more than BOUND_TOL. The bound at step n is recovered from
    the row as lambda_norm / bound_ratio, so the slack is the runner's.
    """
    ratio = pl.col("bound_ratio")
    excess = (
        pl.when(ratio > 0.0)
        .then(pl.col("lambda_norm") * (1.0 - 1.0 / ratio))
        .otherwise(0.0)
        .fill_null(0.0)
    )
    bound_ok = pl.col("bound_excess").max() <= BOUND_TOL
    if not gated:
        bound_ok = pl.lit(True)
    return (
        frame.with_columns(excess.alias("bound_excess"))
        .group_by("scenario_id", "seed", maintain_order=True)
        .agg(
            pl.len().alias("steps"),
            pl.col("bound_ratio").max().alias("max_ratio"),
            pl.col("dist_to_S").last().alias("final_dist"),
            pl.col("recursion_audit_pass").sum().alias("audits_passed"),
            bound_ok.alias("bound_ok"),
        )
        .with_columns(
            ((pl.col("audits_passed") == pl.col("steps")) & pl.col("bound_ok")).alias("passed")
        )
        .drop("bound_ok")
    )
