"""Convex set variants with batch membership, distance and Euclidean projection."""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
import numpy.typing as npt

from sqc_lab.errors import InvalidArgumentError, UnsupportedCombinationError
from sqc_lab.geometry.sampling import ball_points, box_points, unit_directions
from sqc_lab.geometry.vectors import L2, NormSpec, Vector, as_vector, check_same_dim, norms
from sqc_lab.sets.dykstra import dykstra_balls

DEFAULT_TOL = 1e-9

Points = npt.NDArray[np.float64]


def as_points(points: npt.ArrayLike, dim: int) -> Points:
    """View input as an (m, dim) float array; a single vector becomes one row."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise InvalidArgumentError(f"Dimension mismatch: expected points of dimension {dim}, got shape {arr.shape}")
    return arr


class ConvexSet(ABC):
    """A closed convex subset of ℝⁿ."""

    kind: ClassVar[str]
    bounded: ClassVar[bool] = True

    @property
    @abstractmethod
    def dim(self) -> int: ...

    @abstractmethod
    def contains_many(self, points: npt.ArrayLike, tol: float = DEFAULT_TOL) -> npt.NDArray[np.bool_]:
        """Membership of every row, up to tol in the defining inequalities."""

    def contains(self, z: npt.ArrayLike, tol: float = DEFAULT_TOL) -> bool:
        return bool(self.contains_many(as_vector(z, "z"), tol)[0])

    @abstractmethod
    def project_many(self, points: npt.ArrayLike) -> Points:
        """Euclidean projection of every row onto the set."""

    def bounding_ball(self) -> tuple[Vector, float]:
        """A Euclidean ball (center, radius) containing the set."""
        raise InvalidArgumentError(f"{self.kind} is unbounded")

    def sample_points(self, rng: np.random.Generator, count: int) -> Points:
        """Points of the set, half on the boundary and half on chords between boundary points.

        Boundary points are projections of points drawn on a sphere twice as
        large as the bounding ball.
        """
        center, radius = self.bounding_ball()
        far = center + 2.0 * max(radius, 1e-12) * unit_directions(rng, 2 * count, self.dim, L2)
        boundary = self.project_many(far)
        mix = rng.uniform(0.0, 1.0, size=count)[:, None]
        chords = mix * boundary[:count] + (1.0 - mix) * boundary[count:]
        take_boundary = rng.uniform(size=count) < 0.5
        return np.where(take_boundary[:, None], boundary[:count], chords)

    @abstractmethod
    def to_json(self) -> dict[str, Any]: ...


@dataclass(frozen=True, eq=False)
class NormBall(ConvexSet):
    """Closed ball {z : ‖z − center‖_n ≤ radius}."""

    norm: NormSpec
    center: Vector
    radius: float

    kind: ClassVar[str] = "NormBall"

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", as_vector(self.center, "center"))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidArgumentError(f"radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.center.size

    def contains_many(self, points: npt.ArrayLike, tol: float = DEFAULT_TOL) -> npt.NDArray[np.bool_]:
        pts = as_points(points, self.dim)
        return norms(pts - self.center, self.norm) <= self.radius + tol

    def own_distance_many(self, points: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """max{‖z − c‖_n − r, 0}, the distance measured in the ball's own norm."""
        pts = as_points(points, self.dim)
        return np.maximum(norms(pts - self.center, self.norm) - self.radius, 0.0)

    @property
    def supports_projection(self) -> bool:
        return self.norm.p in (1.0, 2.0) or self.norm.is_infinity

    def project_many(self, points: npt.ArrayLike) -> Points:
        pts = as_points(points, self.dim)
        offset = pts - self.center
        if self.norm.is_euclidean:
            lengths = norms(offset, L2)
            outside = lengths > self.radius
            scale = np.ones_like(lengths)
            scale[outside] = self.radius / lengths[outside]
            return self.center + offset * scale[:, None]
        if self.norm.is_infinity:
            return self.center + np.clip(offset, -self.radius, self.radius)
        if self.norm.p == 1.0:
            return self.center + project_l1_ball(offset, self.radius)
        raise UnsupportedCombinationError(f"No Euclidean projection onto an {self.norm.label} ball")

    def bounding_ball(self) -> tuple[Vector, float]:
        # ‖z‖₂ ≤ ‖z‖_p for p ≤ 2 and ‖z‖₂ ≤ n^(1/2 − 1/p)·‖z‖_p above
        if self.norm.p <= 2.0:
            return self.center, self.radius
        exponent = 0.5 if self.norm.is_infinity else 0.5 - 1.0 / self.norm.p
        return self.center, self.radius * self.dim**exponent

    def sample_points(self, rng: np.random.Generator, count: int) -> Points:
        if self.norm.is_euclidean or not self.supports_projection:
            return ball_points(rng, self.center, self.radius, self.norm, count)
        return super().sample_points(rng, count)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "norm": {"p": self.norm.to_json()},
            "center": self.center.tolist(),
            "radius": self.radius,
        }


def project_l1_ball(offsets: Points, radius: float) -> Points:
    """Euclidean projection of every row onto {w : ‖w‖₁ ≤ radius} (sort and threshold)."""
    result = offsets.copy()
    absval = np.abs(offsets)
    outside = absval.sum(axis=1) > radius
    if not np.any(outside):
        return result
    v = absval[outside]
    u = -np.sort(-v, axis=1)
    cssv = np.cumsum(u, axis=1) - radius
    index = np.arange(1, v.shape[1] + 1)
    positive = u - cssv / index > 0
    last = v.shape[1] - 1 - np.argmax(positive[:, ::-1], axis=1)
    theta = cssv[np.arange(v.shape[0]), last] / (last + 1)
    result[outside] = np.sign(offsets[outside]) * np.maximum(v - theta[:, None], 0.0)
    return result


@dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """Closed half-space {z : ⟨a, z⟩ ≤ b}."""

    a: Vector
    b: float

    kind: ClassVar[str] = "Halfspace"
    bounded: ClassVar[bool] = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_vector(self.a, "a"))
        if not np.any(self.a != 0):
            raise InvalidArgumentError("Halfspace normal a must be nonzero")
        if not math.isfinite(self.b):
            raise InvalidArgumentError(f"Halfspace offset b must be finite, got {self.b}")

    @property
    def dim(self) -> int:
        return self.a.size

    def contains_many(self, points: npt.ArrayLike, tol: float = DEFAULT_TOL) -> npt.NDArray[np.bool_]:
        return as_points(points, self.dim) @ self.a <= self.b + tol

    def project_many(self, points: npt.ArrayLike) -> Points:
        pts = as_points(points, self.dim)
        excess = np.maximum(pts @ self.a - self.b, 0.0)
        return pts - (excess / float(self.a @ self.a))[:, None] * self.a

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "a": self.a.tolist(), "b": self.b}


@dataclass(frozen=True, eq=False)
class Segment(ConvexSet):
    """Closed segment [x1, x2]."""

    x1: Vector
    x2: Vector

    kind: ClassVar[str] = "Segment"

    def __post_init__(self) -> None:
        object.__setattr__(self, "x1", as_vector(self.x1, "x1"))
        object.__setattr__(self, "x2", as_vector(self.x2, "x2"))
        check_same_dim(self.x1, self.x2)

    @property
    def dim(self) -> int:
        return self.x1.size

    def contains_many(self, points: npt.ArrayLike, tol: float = DEFAULT_TOL) -> npt.NDArray[np.bool_]:
        pts = as_points(points, self.dim)
        return norms(pts - self.project_many(pts), L2) <= tol

    def project_many(self, points: npt.ArrayLike) -> Points:
        pts = as_points(points, self.dim)
        d = self.x2 - self.x1
        length2 = float(d @ d)
        if length2 == 0.0:
            return np.broadcast_to(self.x1, pts.shape).copy()
        t = np.clip(((pts - self.x1) @ d) / length2, 0.0, 1.0)
        return self.x1 + t[:, None] * d

    def bounding_ball(self) -> tuple[Vector, float]:
        return (self.x1 + self.x2) / 2.0, float(norms(self.x2 - self.x1, L2)) / 2.0

    def sample_points(self, rng: np.random.Generator, count: int) -> Points:
        t = rng.uniform(0.0, 1.0, size=count)
        return self.x1 + t[:, None] * (self.x2 - self.x1)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "x1": self.x1.tolist(), "x2": self.x2.tolist()}


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    """Axis-aligned box [lo, hi]."""

    lo: Vector
    hi: Vector

    kind: ClassVar[str] = "Box"

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", as_vector(self.lo, "lo"))
        object.__setattr__(self, "hi", as_vector(self.hi, "hi"))
        check_same_dim(self.lo, self.hi)
        if np.any(self.lo > self.hi):
            raise InvalidArgumentError(f"Box needs lo <= hi componentwise, got lo={self.lo.tolist()} hi={self.hi.tolist()}")

    @property
    def dim(self) -> int:
        return self.lo.size

    def contains_many(self, points: npt.ArrayLike, tol: float = DEFAULT_TOL) -> npt.NDArray[np.bool_]:
        pts = as_points(points, self.dim)
        return np.all((pts >= self.lo - tol) & (pts <= self.hi + tol), axis=1)

    def project_many(self, points: npt.ArrayLike) -> Points:
        return np.clip(as_points(points, self.dim), self.lo, self.hi)

    def bounding_ball(self) -> tuple[Vector, float]:
        return (self.lo + self.hi) / 2.0, float(norms(self.hi - self.lo, L2)) / 2.0

    def sample_points(self, rng: np.random.Generator, count: int) -> Points:
        inner = box_points(rng, self.lo, self.hi, count)
        # snap a third of the points onto a random face so flat parts get exercised
        on_face = rng.uniform(size=count) < 1.0 / 3.0
        axis = rng.integers(0, self.dim, size=count)
        upper = rng.uniform(size=count) < 0.5
        rows = np.flatnonzero(on_face)
        inner[rows, axis[rows]] = np.where(upper[rows], self.hi[axis[rows]], self.lo[axis[rows]])
        return inner

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False)
class EuclideanBall:
    """One Euclidean ball of a BallIntersection."""

    center: Vector
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", as_vector(self.center, "center"))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidArgumentError(f"radius must be positive, got {self.radius}")


@dataclass(frozen=True, eq=False)
class BallIntersection(ConvexSet):
    """Intersection of Euclidean balls, certified nonempty by interior_point."""

    balls: tuple[EuclideanBall, ...]
    interior_point: Vector

    kind: ClassVar[str] = "BallIntersection"

    def __post_init__(self) -> None:
        if not self.balls:
            raise InvalidArgumentError("BallIntersection needs at least one ball")
        object.__setattr__(self, "balls", tuple(self.balls))
        object.__setattr__(self, "interior_point", as_vector(self.interior_point, "interior_point"))
        check_same_dim(self.interior_point, *(ball.center for ball in self.balls))
        if not self.contains(self.interior_point):
            raise InvalidArgumentError(
                f"interior_point {self.interior_point.tolist()} is not in every ball of the intersection"
            )

    @property
    def dim(self) -> int:
        return self.interior_point.size

    @property
    def centers(self) -> Points:
        return np.stack([ball.center for ball in self.balls])

    @property
    def radii(self) -> npt.NDArray[np.float64]:
        return np.array([ball.radius for ball in self.balls])

    def contains_many(self, points: npt.ArrayLike, tol: float = DEFAULT_TOL) -> npt.NDArray[np.bool_]:
        pts = as_points(points, self.dim)
        inside = np.ones(pts.shape[0], dtype=bool)
        for ball in self.balls:
            inside &= norms(pts - ball.center, L2) <= ball.radius + tol
        return inside

    def project_many(self, points: npt.ArrayLike) -> Points:
        return dykstra_balls(as_points(points, self.dim), self.centers, self.radii)

    def bounding_ball(self) -> tuple[Vector, float]:
        smallest = min(self.balls, key=lambda ball: ball.radius)
        return smallest.center, smallest.radius

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "balls": [{"center": ball.center.tolist(), "radius": ball.radius} for ball in self.balls],
            "interior_point": self.interior_point.tolist(),
        }


def member(s: ConvexSet, z: npt.ArrayLike, tol: float = DEFAULT_TOL) -> bool:
    """Return True iff z lies in s up to tol.

    Raises:
        InvalidArgumentError: On dimension mismatch or negative tol.
    """
    if tol < 0:
        raise InvalidArgumentError(f"tol must be nonnegative, got {tol}")
    zv = as_vector(z, "z")
    if zv.size != s.dim:
        raise InvalidArgumentError(f"Dimension mismatch: set has dimension {s.dim}, point has {zv.size}")
    return s.contains(zv, tol)


def supports_distance(s: ConvexSet, n: NormSpec) -> bool:
    """Whether distance(s, ·, n) has a closed form or a Euclidean projection behind it."""
    if isinstance(s, NormBall) and s.norm == n:
        return True
    if not n.is_euclidean:
        return False
    return s.supports_projection if isinstance(s, NormBall) else True


def distance_many(s: ConvexSet, points: npt.ArrayLike, n: NormSpec) -> npt.NDArray[np.float64]:
    """Batch form of distance.

    Raises:
        UnsupportedCombinationError: If the (set, norm) pair has no supported distance.
    """
    if isinstance(s, NormBall) and s.norm == n:
        return s.own_distance_many(points)
    if not supports_distance(s, n):
        raise UnsupportedCombinationError(
            f"Distance to {s.kind}"
            + (f" ({s.norm.label})" if isinstance(s, NormBall) else "")
            + f" measured in {n.label} is not supported"
        )
    pts = as_points(points, s.dim)
    return norms(pts - s.project_many(pts), L2)


def distance(s: ConvexSet, z: npt.ArrayLike, n: NormSpec) -> float:
    """Return inf{‖z − w‖_n : w ∈ s}.

    NormBall measured in its own norm uses max{‖z − c‖_n − r, 0}; every other
    supported pair is measured in L2 through the Euclidean projection.

    Raises:
        UnsupportedCombinationError: If the (set, norm) pair has no supported distance.
        InvalidArgumentError: On dimension mismatch.
    """
    zv = as_vector(z, "z")
    return float(distance_many(s, zv, n)[0])


def project_euclidean(s: ConvexSet, z: npt.ArrayLike) -> Vector:
    """Return the nearest point of s to z in ‖·‖₂.

    Raises:
        UnsupportedCombinationError: For ℓp balls with p outside {1, 2, ∞}.
        NumericFailureError: If an iterative projection does not converge.
    """
    zv = as_vector(z, "z")
    return s.project_many(zv)[0]
