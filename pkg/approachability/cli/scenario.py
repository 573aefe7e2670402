"""Scenario files.

A scenario is a YAML document describing one experiment:

    id: external-rps
    problem:
      kind: external
      utility: [[0, -1, 1], [1, 0, -1], [-1, 1, 0]]
    algorithm:
      kind: response-based
    opponent:
      kind: fixed-mixed
      q: [0.5, 0.3, 0.2]
    n_steps: 1000
    seeds: [1, 2, 3]
    sweep:
      checkpoints: [10, 100, 1000]
      delta: 0.1

The document is validated by the pydantic models below. Unknown keys are
rejected, and every error is reported with the line of the offending key.
"""

import hashlib
import json
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.errors import ScenarioError
from ..core.registry import get_class
from ..core.sets import TargetSet
from ..harness.opponents import Opponent, make_opponent
from ..harness.runner import RunSetup, build_approacher
from ..problems.base import Problem

Matrix = List[List[float]]
Tensor3 = List[List[List[float]]]

# (key path) -> 1-based line of the key in the source document
LineMap = Dict[Tuple[Union[str, int], ...], int]


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# =============================================================================
# Target sets
# =============================================================================


class SingletonSpec(_Spec):
    kind: Literal["singleton"]
    point: List[float]


class OrthantSpec(_Spec):
    kind: Literal["nonpositive-orthant"]
    dim: int = Field(ge=1)


class BoxSpec(_Spec):
    """Bounds may be .inf / -.inf for unbounded coordinates."""

    kind: Literal["box"]
    lower: List[float]
    upper: List[float]


class HPolyhedronSpec(_Spec):
    kind: Literal["hpolyhedron"]
    A: Matrix
    b: List[float]


class BallSpec(_Spec):
    kind: Literal["ball"]
    center: List[float]
    radius: float = Field(ge=0)


TargetSpec = Annotated[
    Union[SingletonSpec, OrthantSpec, BoxSpec, HPolyhedronSpec, BallSpec],
    Field(discriminator="kind"),
]


def build_target(spec: Any) -> TargetSet:
    """Instantiate the registered target set a spec describes."""
    fields = spec.model_dump(exclude={"kind"})
    if spec.kind == "nonpositive-orthant":
        fields = {"size": fields["dim"]}
    return get_class("target", spec.kind)(**fields)


# =============================================================================
# Problems
# =============================================================================


class UtilityProblemSpec(_Spec):
    kind: Literal["external", "internal", "blackwell"]
    utility: Matrix


class GlobalAbsSpec(_Spec):
    kind: Literal["global-abs"]
    values: Matrix


class GlobalDNormSpec(_Spec):
    kind: Literal["global-dnorm"]
    losses: Matrix
    norm_order: float = 2.0


class GlobalInfNormSpec(_Spec):
    kind: Literal["global-infnorm"]
    losses: Matrix


class RatioSpec(_Spec):
    kind: Literal["ratio"]
    utility: Matrix
    cost: Matrix


class ConstrainedSpec(_Spec):
    """Costs are a matrix (s = 1) or an (a, z, s) tensor; no constraint means R^s."""

    kind: Literal["constrained"]
    utility: Matrix
    cost: Union[Matrix, Tensor3]
    constraint: Optional[TargetSpec] = None


class ResponseSpec(_Spec):
    rule: Literal["auto", "constant"] = "auto"
    action: Optional[List[float]] = None

    @model_validator(mode="after")
    def _constant_needs_action(self) -> "ResponseSpec":
        if self.rule == "constant" and self.action is None:
            raise ValueError("response rule 'constant' needs an action")
        return self


class GenericVectorSpec(_Spec):
    kind: Literal["generic-vector"]
    payoff: Tensor3
    target: TargetSpec
    response: ResponseSpec = ResponseSpec()


ProblemSpec = Annotated[
    Union[
        UtilityProblemSpec,
        GlobalAbsSpec,
        GlobalDNormSpec,
        GlobalInfNormSpec,
        RatioSpec,
        ConstrainedSpec,
        GenericVectorSpec,
    ],
    Field(discriminator="kind"),
]


def build_problem(spec: Any) -> Problem:
    """Build the registered problem a spec describes."""
    fields = spec.model_dump(exclude={"kind", "constraint", "target", "response"})
    if isinstance(spec, ConstrainedSpec):
        fields["constraint"] = None if spec.constraint is None else build_target(spec.constraint)
    if isinstance(spec, GenericVectorSpec):
        fields["target"] = build_target(spec.target)
        fields["rule"] = spec.response.rule
        fields["action"] = spec.response.action
    return get_class("problem", spec.kind).build(**fields)


# =============================================================================
# Algorithm, opponent, sweep
# =============================================================================


class AlgorithmSpec(_Spec):
    kind: Literal[
        "response-based",
        "response-based+idling",
        "response-based+unbounded",
        "response-based-realized",
        "primal-blackwell",
        "ogd-support",
        "regret-matching",
    ]
    idle_action: Optional[int] = Field(default=None, ge=0)


class FixedMixedSpec(_Spec):
    kind: Literal["fixed-mixed"]
    q: List[float]


class PeriodicPureSpec(_Spec):
    kind: Literal["periodic-pure"]
    sequence: List[int] = Field(min_length=1)


class AdversarialSpec(_Spec):
    kind: Literal["adversarial"]


class BestResponseEmpiricalSpec(_Spec):
    kind: Literal["best-response-empirical"]


OpponentSpec = Annotated[
    Union[FixedMixedSpec, PeriodicPureSpec, AdversarialSpec, BestResponseEmpiricalSpec],
    Field(discriminator="kind"),
]


class SweepSpec(_Spec):
    checkpoints: Optional[List[int]] = None
    delta: float = Field(default=0.1, gt=0, lt=1)
    workers: int = Field(default=1, ge=1)


# =============================================================================
# Scenario
# =============================================================================


class Scenario(_Spec):
    """A validated experiment description."""

    id: str = Field(min_length=1)
    problem: ProblemSpec
    algorithm: AlgorithmSpec
    opponent: OpponentSpec
    n_steps: int = Field(ge=0)
    seeds: List[int] = Field(min_length=1)
    sweep: SweepSpec = SweepSpec()

    @model_validator(mode="after")
    def _check_seeds(self) -> "Scenario":
        if any(s < 0 for s in self.seeds):
            raise ValueError(f"seeds must be nonnegative, got {self.seeds}")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError(f"seeds must be distinct, got {self.seeds}")
        return self

    @property
    def scenario_id(self) -> str:
        return self.id

    def setup(self) -> RunSetup:
        """
        Build the problem and the opponent factory.

        Raises:
            ScenarioError: If the problem data is inconsistent (shapes,
                signs, infeasible constraints)
        """
        try:
            problem = build_problem(self.problem)
        except ScenarioError:
            raise
        except (ValueError, KeyError) as e:
            raise ScenarioError(str(e)) from e

        opponent_spec = self.opponent
        fields = opponent_spec.model_dump(exclude={"kind"})

        def new_opponent() -> Opponent:
            return make_opponent(opponent_spec.kind, **fields)

        return RunSetup(
            scenario_id=self.id,
            problem=problem,
            algorithm=self.algorithm.kind,
            make_opponent=new_opponent,
            n_steps=self.n_steps,
            idle_action=self.algorithm.idle_action,
        )

    def sweep_settings(self) -> Dict[str, Any]:
        return {
            "seeds": list(self.seeds),
            "checkpoints": self.sweep.checkpoints,
            "delta": self.sweep.delta,
            "workers": self.sweep.workers,
        }

    def normalized(self) -> Dict[str, Any]:
        """Canonical plain-data form (defaults filled in, unset options dropped)."""
        return self.model_dump(mode="python", exclude_none=True)

    def to_yaml(self) -> str:
        """Normalized echo that parses back to an equal Scenario."""
        return yaml.safe_dump(self.normalized(), sort_keys=False, default_flow_style=None)

    def config_hash(self) -> str:
        """SHA-256 of the normalized scenario."""
        payload = json.dumps(self.normalized(), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


# =============================================================================
# Loading
# =============================================================================


def line_map(text: str) -> LineMap:
    """Map every key path of a YAML document to its 1-based source line."""
    lines: LineMap = {}
    root = yaml.compose(text)

    def walk(node: Any, path: Tuple[Union[str, int], ...]) -> None:
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                key = key_node.value
                lines[path + (key,)] = key_node.start_mark.line + 1
                walk(value_node, path + (key,))
        elif isinstance(node, yaml.SequenceNode):
            for i, item in enumerate(node.value):
                lines[path + (i,)] = item.start_mark.line + 1
                walk(item, path + (i,))

    if root is not None:
        walk(root, ())
    return lines


def _anchor(loc: Tuple[Union[str, int], ...], lines: LineMap) -> int:
    """Line of the longest source path along an error location."""
    path: Tuple[Union[str, int], ...] = ()
    # Discriminated unions insert their tag into the location; skip parts
    # that do not exist in the document
    for part in loc:
        if path + (part,) in lines:
            path = path + (part,)
    return lines.get(path, 1)


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """
    Parse and validate a scenario document.

    Args:
        text: YAML document
        source: Name used in error messages

    Returns:
        Validated Scenario

    Raises:
        ScenarioError: With a `<source>:<line>: <location>: <message>` text
    """
    try:
        lines = line_map(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 1
        raise ScenarioError(f"{source}:{line}: invalid YAML: {e}", line) from e
    if not isinstance(data, dict):
        raise ScenarioError(f"{source}:1: a scenario must be a mapping", 1)

    try:
        scenario = Scenario.model_validate(data)
    except ValidationError as e:
        messages = []
        for err in e.errors():
            loc = tuple(err["loc"])
            dotted = ".".join(str(p) for p in loc) or "<root>"
            messages.append(f"{source}:{_anchor(loc, lines)}: {dotted}: {err['msg']}")
        first_line = _anchor(tuple(e.errors()[0]["loc"]), lines)
        raise ScenarioError("\n".join(messages), first_line) from e
    check_content(scenario, lines, source)
    return scenario


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"{path}: cannot read scenario: {e}") from e
    return parse_scenario(text, source=str(path))


def check_content(scenario: Scenario, lines: LineMap, source: str = "<string>") -> None:
    """
    Build the scenario once so content errors surface before any run.

    Checks the problem data, the algorithm/target combination and the
    opponent against the game, in that order.

    Raises:
        ScenarioError: Anchored at the section that failed
    """
    section = "problem"
    try:
        setup = scenario.setup()
        section = "algorithm"
        build_approacher(setup)
        section = "opponent"
        setup.make_opponent().bind(setup.problem)
    except (ScenarioError, ValueError) as e:
        line = lines.get((section,), 1)
        raise ScenarioError(f"{source}:{line}: {section}: {e}", line) from e
