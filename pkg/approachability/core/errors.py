"""Exception hierarchy for approachability runs.

- ApproachabilityError: common base class
- ScenarioError: scenario content rejected before a run starts
- CertificationError: a response oracle missed its certified set
- AuditError: a per-step audit or bound check failed during a run
- SolverError: LP/QP/saddle-point failure on finite data
- UnsupportedQueryError: a set cannot answer the requested query
- RunAborted: carries the partial trajectory of an aborted run
"""

from typing import TYPE_CHECKING, List, Optional

if TYPE_CHECKING:
    from ..harness.records import StepRecord


class ApproachabilityError(Exception):
    """Base class for all errors raised by this package."""

    pass


class ScenarioError(ApproachabilityError):
    """Raised when a scenario (or a problem built from it) is invalid.

    This error is raised when:
    1. The scenario file has unknown keys, wrong shapes or bad values
    2. A constrained problem is infeasible at some opponent mixed action
    3. The algorithm cannot be combined with the target set (for example
       a projection-based baseline on a graph target)

    To resolve, fix the scenario file at the reported line.
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(message)


class CertificationError(ApproachabilityError):
    """Raised when a response oracle's point is farther than 1e-6 from S.

    The response-based algorithm needs r(respond(q), q) in S for every q.
    A failure means the oracle does not certify the set it claims, i.e. the
    scenario's response rule is wrong for its target.
    """

    def __init__(self, message: str, residual: float = float("nan")):
        self.residual = residual
        super().__init__(message)


class AuditError(ApproachabilityError):
    """Raised when a per-step audit or gated bound fails in a fail-fast run.

    Ordinary runs record such steps in the RunReport and keep going; the
    fail-fast mode stops at the first one instead.
    """

    def __init__(self, message: str, step: Optional[int] = None):
        self.step = step
        super().__init__(message)


class SolverError(ApproachabilityError):
    """Raised when the LP/QP kernels or the saddle certificate fail.

    On finite inputs this indicates a numerical problem in the solver and is
    reported as an internal failure together with the offending data.
    """

    pass


class InfeasibleError(SolverError):
    """Raised by the LP kernel when the constraints admit no point."""

    pass


class UnboundedError(SolverError):
    """Raised by the LP kernel when the objective is unbounded."""

    pass


class UnsupportedQueryError(ApproachabilityError):
    """Raised when a target set cannot answer a query.

    Graph targets built by the regret constructions support membership but
    not distance, projection or support queries; sets whose recession cone is
    not a quadrant cannot be used with unbounded steering.
    """

    pass


class RunAborted(ApproachabilityError):
    """Raised when a run stops early; keeps the records produced so far.

    Attributes:
        cause: The underlying error
        records: StepRecords of the steps completed before the failure
        step: Index of the step that failed (0 for the pre-run spot check)
    """

    def __init__(self, cause: Exception, records: "List[StepRecord]", step: int):
        self.cause = cause
        self.records = records
        self.step = step
        super().__init__(f"run aborted at step {step}: {cause}")
