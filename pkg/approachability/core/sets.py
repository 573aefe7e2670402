"""Closed convex target sets.

Every set answers membership, distance, projection, support-function and
recession-direction queries. Recession cones are restricted to quadrants:
a list of signed coordinate directions (j, +1) or (j, -1) meaning the set
is unbounded along +e_j or -e_j.

Example:
    >>> S = Box(lower=[0.0, -np.inf], upper=[1.0, 0.0])
    >>> S.recession_directions()
    [(1, -1)]
    >>> steer_unbounded(np.array([0.5, 0.2]), S)
    array([0.5, 0. ])
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .errors import InfeasibleError, UnboundedError, UnsupportedQueryError
from .lp import find_feasible_point, solve_lp
from .qp import project_polyhedron
from .registry import register_target

# Membership tolerance used wherever no tolerance is given
MEMBERSHIP_TOL = 1e-9

RecessionDirection = Tuple[int, int]


@dataclass(frozen=True)
class SupportValue:
    """Value of a support function: a finite number or +infinity.

    Attributes:
        value: The supremum, or None when it is +infinity
    """

    value: Optional[float]

    @classmethod
    def unbounded(cls) -> "SupportValue":
        return cls(None)

    @property
    def bounded(self) -> bool:
        return self.value is not None

    def require(self) -> float:
        """Return the finite value or raise if the support is +infinity."""
        if self.value is None:
            raise UnsupportedQueryError("support function is +infinity here")
        return self.value

    def __repr__(self) -> str:
        return "SupportValue(+inf)" if self.value is None else f"SupportValue({self.value!r})"


def _vector(x: Iterable[float], dim: int, what: str = "point") -> np.ndarray:
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.shape[0] != dim:
        raise ValueError(f"{what} has dimension {arr.shape[0]}, set has dimension {dim}")
    return arr


class TargetSet(ABC):
    """Abstract closed convex set in R^dim."""

    kind: str = ""

    @property
    @abstractmethod
    def dim(self) -> int:
        pass

    #: Whether distance/project/support queries are available
    has_distance: bool = True

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        """True iff distance(x) <= tol."""
        return self.distance(x) <= tol

    def distance(self, x: np.ndarray) -> float:
        x = _vector(x, self.dim)
        return float(np.linalg.norm(x - self.project(x)))

    def residual(self, x: np.ndarray) -> float:
        """Nonnegative violation measure, zero iff x is in the set."""
        return self.distance(x)

    @abstractmethod
    def project(self, x: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def support(self, theta: np.ndarray) -> SupportValue:
        pass

    @abstractmethod
    def support_argmax(self, theta: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def recession_directions(self) -> List[RecessionDirection]:
        pass

    @property
    def is_compact(self) -> bool:
        return not self.recession_directions()

    def diameter(self) -> float:
        """Diameter (or an upper bound on it); inf for unbounded sets."""
        return float("inf")

    def halfspaces(self) -> Tuple[np.ndarray, np.ndarray]:
        """(A, b) with the set equal to {x : A x <= b}, for polyhedral kinds."""
        raise UnsupportedQueryError(f"{type(self).__name__} is not polyhedral")


@register_target("singleton")
@dataclass(frozen=True, eq=False)
class Singleton(TargetSet):
    """The set {point}."""

    point: np.ndarray

    def __post_init__(self) -> None:
        point = np.array(self.point, dtype=float).reshape(-1)
        if point.size == 0 or not np.all(np.isfinite(point)):
            raise ValueError("Singleton point must be a finite nonempty vector")
        object.__setattr__(self, "point", point)

    @property
    def dim(self) -> int:
        return int(self.point.shape[0])

    def project(self, x: np.ndarray) -> np.ndarray:
        _vector(x, self.dim)
        return self.point.copy()

    def support(self, theta: np.ndarray) -> SupportValue:
        return SupportValue(float(_vector(theta, self.dim, "theta") @ self.point))

    def support_argmax(self, theta: np.ndarray) -> np.ndarray:
        _vector(theta, self.dim, "theta")
        return self.point.copy()

    def recession_directions(self) -> List[RecessionDirection]:
        return []

    def diameter(self) -> float:
        return 0.0

    def halfspaces(self) -> Tuple[np.ndarray, np.ndarray]:
        eye = np.eye(self.dim)
        return np.vstack([eye, -eye]), np.concatenate([self.point, -self.point])


@register_target("nonpositive-orthant")
@dataclass(frozen=True, eq=False)
class NonpositiveOrthant(TargetSet):
    """The set {x : x <= 0 componentwise}."""

    size: int

    def __post_init__(self) -> None:
        if int(self.size) < 1:
            raise ValueError(f"Orthant dimension must be >= 1, got {self.size}")
        object.__setattr__(self, "size", int(self.size))

    @property
    def dim(self) -> int:
        return self.size

    def distance(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(np.maximum(_vector(x, self.dim), 0.0)))

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.minimum(_vector(x, self.dim), 0.0)

    def support(self, theta: np.ndarray) -> SupportValue:
        theta = _vector(theta, self.dim, "theta")
        if np.any(theta < 0):
            return SupportValue.unbounded()
        return SupportValue(0.0)

    def support_argmax(self, theta: np.ndarray) -> np.ndarray:
        self.support(theta).require()
        return np.zeros(self.dim)

    def recession_directions(self) -> List[RecessionDirection]:
        return [(j, -1) for j in range(self.dim)]

    def halfspaces(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.eye(self.dim), np.zeros(self.dim)


@register_target("box")
@dataclass(frozen=True, eq=False)
class Box(TargetSet):
    """Axis-aligned box lower <= x <= upper; infinite bounds allowed."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.array(self.lower, dtype=float).reshape(-1)
        upper = np.array(self.upper, dtype=float).reshape(-1)
        if lower.shape != upper.shape or lower.size == 0:
            raise ValueError(
                f"Box bounds must be nonempty and equally sized, got "
                f"{lower.shape} and {upper.shape}"
            )
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValueError("Box bounds must not be NaN")
        if np.any(lower > upper) or np.any(lower == np.inf) or np.any(upper == -np.inf):
            raise ValueError(f"Box is empty: lower={lower}, upper={upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return int(self.lower.shape[0])

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.clip(_vector(x, self.dim), self.lower, self.upper)

    def support(self, theta: np.ndarray) -> SupportValue:
        theta = _vector(theta, self.dim, "theta")
        corner = np.where(theta > 0, self.upper, self.lower)
        active = theta != 0
        if not np.all(np.isfinite(corner[active])):
            return SupportValue.unbounded()
        return SupportValue(float(theta[active] @ corner[active]))

    def support_argmax(self, theta: np.ndarray) -> np.ndarray:
        theta = _vector(theta, self.dim, "theta")
        self.support(theta).require()
        # Coordinates with theta_j = 0 take the point of [lower_j, upper_j]
        # closest to zero
        point = np.clip(np.zeros(self.dim), self.lower, self.upper)
        point = np.where(theta > 0, self.upper, point)
        return np.where(theta < 0, self.lower, point)

    def recession_directions(self) -> List[RecessionDirection]:
        directions: List[RecessionDirection] = []
        for j in range(self.dim):
            if self.upper[j] == np.inf:
                directions.append((j, 1))
            if self.lower[j] == -np.inf:
                directions.append((j, -1))
        return directions

    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def halfspaces(self) -> Tuple[np.ndarray, np.ndarray]:
        eye = np.eye(self.dim)
        up = np.isfinite(self.upper)
        lo = np.isfinite(self.lower)
        A = np.vstack([eye[up], -eye[lo]])
        b = np.concatenate([self.upper[up], -self.lower[lo]])
        return A.reshape(-1, self.dim), b


@register_target("hpolyhedron")
@dataclass(frozen=True, eq=False)
class HPolyhedron(TargetSet):
    """Polyhedron {x : A x <= b}, checked nonempty at construction."""

    A: np.ndarray
    b: np.ndarray
    _interior_hint: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.array(self.A, dtype=float))
        b = np.array(self.b, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise ValueError(f"HPolyhedron has {A.shape[0]} rows in A, {b.shape[0]} in b")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("HPolyhedron data must be finite")
        try:
            hint = find_feasible_point(A, b, A.shape[1])
        except InfeasibleError as e:
            raise ValueError(f"HPolyhedron is empty: {e}") from e
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "_interior_hint", hint)

    @property
    def dim(self) -> int:
        return int(self.A.shape[1])

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        x = _vector(x, self.dim)
        if np.all(self.A @ x <= self.b):
            return True
        return self.distance(x) <= tol

    def project(self, x: np.ndarray) -> np.ndarray:
        return project_polyhedron(_vector(x, self.dim), self.A, self.b, self._interior_hint)

    def support(self, theta: np.ndarray) -> SupportValue:
        theta = _vector(theta, self.dim, "theta")
        try:
            sol = solve_lp(theta, self.A, self.b, maximize=True, free=True)
        except UnboundedError:
            return SupportValue.unbounded()
        return SupportValue(sol.objective)

    def support_argmax(self, theta: np.ndarray) -> np.ndarray:
        theta = _vector(theta, self.dim, "theta")
        try:
            return solve_lp(theta, self.A, self.b, maximize=True, free=True).x
        except UnboundedError as e:
            raise UnsupportedQueryError(f"support of {theta} is +infinity") from e

    @cached_property
    def _recession(self) -> Tuple[List[RecessionDirection], bool]:
        # Recession cone is {d : A d <= 0}. Signed unit directions inside it
        # generate a quadrant; the cone equals that quadrant iff no direction
        # of the cone moves a coordinate the quadrant keeps fixed.
        directions: List[RecessionDirection] = []
        for j in range(self.dim):
            if np.all(self.A[:, j] <= 0):
                directions.append((j, 1))
            if np.all(self.A[:, j] >= 0):
                directions.append((j, -1))
        allowed = set(directions)
        box = np.vstack([np.eye(self.dim), -np.eye(self.dim)])
        A_cone = np.vstack([self.A, box])
        b_cone = np.concatenate([np.zeros(self.A.shape[0]), np.ones(2 * self.dim)])
        is_quadrant = True
        for j in range(self.dim):
            for sign in (1, -1):
                if (j, sign) in allowed:
                    continue
                e = np.zeros(self.dim)
                e[j] = sign
                reach = solve_lp(e, A_cone, b_cone, maximize=True, free=True).objective
                if reach > 1e-9:
                    is_quadrant = False
        return directions, is_quadrant

    def recession_directions(self) -> List[RecessionDirection]:
        directions, is_quadrant = self._recession
        if not is_quadrant:
            raise UnsupportedQueryError(
                "HPolyhedron recession cone is not a quadrant; unbounded "
                "steering is only available for quadrant cones"
            )
        return list(directions)

    @property
    def is_compact(self) -> bool:
        directions, is_quadrant = self._recession
        return is_quadrant and not directions

    def diameter(self) -> float:
        lo = np.empty(self.dim)
        hi = np.empty(self.dim)
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = 1.0
            top, bottom = self.support(e), self.support(-e)
            if not (top.bounded and bottom.bounded):
                return float("inf")
            hi[j], lo[j] = top.require(), -bottom.require()
        return float(np.linalg.norm(hi - lo))

    def halfspaces(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.A.copy(), self.b.copy()


@register_target("ball")
@dataclass(frozen=True, eq=False)
class Ball(TargetSet):
    """Closed Euclidean ball {x : ||x - center|| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        center = np.array(self.center, dtype=float).reshape(-1)
        if center.size == 0 or not np.all(np.isfinite(center)):
            raise ValueError("Ball center must be a finite nonempty vector")
        if not (np.isfinite(self.radius) and self.radius >= 0):
            raise ValueError(f"Ball radius must be finite and >= 0, got {self.radius}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return int(self.center.shape[0])

    def distance(self, x: np.ndarray) -> float:
        gap = np.linalg.norm(_vector(x, self.dim) - self.center) - self.radius
        return float(max(gap, 0.0))

    def project(self, x: np.ndarray) -> np.ndarray:
        x = _vector(x, self.dim)
        offset = x - self.center
        norm = np.linalg.norm(offset)
        if norm <= self.radius:
            return x.copy()
        return self.center + offset * (self.radius / norm)

    def support(self, theta: np.ndarray) -> SupportValue:
        theta = _vector(theta, self.dim, "theta")
        return SupportValue(float(theta @ self.center + self.radius * np.linalg.norm(theta)))

    def support_argmax(self, theta: np.ndarray) -> np.ndarray:
        theta = _vector(theta, self.dim, "theta")
        norm = np.linalg.norm(theta)
        if norm == 0:
            return self.center.copy()
        return self.center + theta * (self.radius / norm)

    def recession_directions(self) -> List[RecessionDirection]:
        return []

    def diameter(self) -> float:
        return 2.0 * self.radius


def steer_unbounded(direction: np.ndarray, target: TargetSet) -> np.ndarray:
    """
    Remove the part of a steering direction that lies in -D_S.

    For a quadrant recession cone generated by signed unit vectors s*u_j,
    -D_S is generated by -s*u_j and the projection onto it is coordinatewise:
    coordinate j is zeroed whenever s * direction[j] < 0. The result's norm
    is the distance from the direction to -D_S.

    Raises:
        UnsupportedQueryError: If the recession cone is not a quadrant
    """
    direction = _vector(direction, target.dim, "direction")
    steered = direction.copy()
    for j, sign in target.recession_directions():
        if sign * steered[j] < 0:
            steered[j] = 0.0
    return steered


def support_distance(target: TargetSet, x: np.ndarray, thetas: np.ndarray) -> float:
    """
    Lower bound on d(x, S) from the support-function identity.

    d(x, S) = max over ||theta|| <= 1 of theta.x - h_S(theta); the maximum is
    taken over the supplied directions (rows of `thetas`) and 0.
    """
    x = _vector(x, target.dim)
    best = 0.0
    for theta in np.atleast_2d(thetas):
        h = target.support(theta)
        if h.bounded:
            best = max(best, float(theta @ x) - h.require())
    return best


def sample_points(target: TargetSet, rng: np.random.Generator, count: int) -> np.ndarray:
    """Points of the set obtained by projecting Gaussian samples (for checks)."""
    raw = rng.normal(scale=3.0, size=(count, target.dim))
    return np.array([target.project(x) for x in raw])
