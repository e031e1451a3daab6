"""Regions on which strong quasiconvexity is estimated, with their pair samplers."""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
import numpy.typing as npt

from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.sampling import ball_points, box_points, unit_directions
from sqc_lab.geometry.vectors import L2, NormSpec, Vector, as_vector, check_same_dim, norms

Points = npt.NDArray[np.float64]

ENDPOINT_SHARE = 0.1


class RegionSpec(ABC):
    """A set of point pairs (x, y) whose chords are tested."""

    kind: ClassVar[str]
    convex: ClassVar[bool] = True
    refinable: ClassVar[bool] = True

    @property
    @abstractmethod
    def dim(self) -> int: ...

    def pair_count(self, requested: int) -> int:
        """Pairs a sweep draws when asked for `requested`."""
        return requested

    @abstractmethod
    def sample_pairs(self, rng: np.random.Generator, count: int) -> tuple[Points, Points]:
        """count pairs of region points."""

    @abstractmethod
    def retract(self, points: Points) -> Points:
        """Map points back into the region; identity on region points."""

    @abstractmethod
    def to_json(self) -> dict[str, Any]: ...


@dataclass(frozen=True, eq=False)
class SegmentRegion(RegionSpec):
    """The segment [x1, x2]."""

    x1: Vector
    x2: Vector

    kind: ClassVar[str] = "SegmentRegion"

    def __post_init__(self) -> None:
        object.__setattr__(self, "x1", as_vector(self.x1, "x1"))
        object.__setattr__(self, "x2", as_vector(self.x2, "x2"))
        check_same_dim(self.x1, self.x2)
        if np.array_equal(self.x1, self.x2):
            raise InvalidArgumentError("SegmentRegion is degenerate: x1 == x2")

    @property
    def dim(self) -> int:
        return self.x1.size

    def _at(self, t: npt.NDArray[np.float64]) -> Points:
        return self.x1 + t[:, None] * (self.x2 - self.x1)

    def _parameters(self, rng: np.random.Generator, count: int) -> npt.NDArray[np.float64]:
        t = rng.uniform(0.0, 1.0, size=count)
        snap = rng.uniform(size=count) < ENDPOINT_SHARE
        t[snap] = rng.integers(0, 2, size=int(snap.sum())).astype(np.float64)
        return t

    def sample_pairs(self, rng: np.random.Generator, count: int) -> tuple[Points, Points]:
        return self._at(self._parameters(rng, count)), self._at(self._parameters(rng, count))

    def retract(self, points: Points) -> Points:
        d = self.x2 - self.x1
        t = np.clip(((points - self.x1) @ d) / float(d @ d), 0.0, 1.0)
        return self._at(t)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "x1": self.x1.tolist(), "x2": self.x2.tolist()}


@dataclass(frozen=True, eq=False)
class SphereChords(RegionSpec):
    """Chords between pairs of points of the n-sphere around center."""

    center: Vector
    r: float
    n: NormSpec = L2

    kind: ClassVar[str] = "SphereChords"
    convex: ClassVar[bool] = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", as_vector(self.center, "center"))
        if not (math.isfinite(self.r) and self.r > 0):
            raise InvalidArgumentError(f"r must be positive, got {self.r}")
        if self.center.size < 2:
            raise InvalidArgumentError("SphereChords needs dimension >= 2")

    @property
    def dim(self) -> int:
        return self.center.size

    def sample_pairs(self, rng: np.random.Generator, count: int) -> tuple[Points, Points]:
        xs = self.center + self.r * unit_directions(rng, count, self.dim, self.n)
        ys = self.center + self.r * unit_directions(rng, count, self.dim, self.n)
        return xs, ys

    def retract(self, points: Points) -> Points:
        offset = points - self.center
        lengths = norms(offset, self.n)
        lengths[lengths == 0] = 1.0
        return self.center + self.r * offset / lengths[:, None]

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "center": self.center.tolist(), "r": self.r, "n": {"p": self.n.to_json()}}


@dataclass(frozen=True, eq=False)
class BallRegion(RegionSpec):
    """The closed n-ball B(center, radius)."""

    center: Vector
    radius: float
    n: NormSpec = L2

    kind: ClassVar[str] = "BallRegion"

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", as_vector(self.center, "center"))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidArgumentError(f"radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.center.size

    def sample_pairs(self, rng: np.random.Generator, count: int) -> tuple[Points, Points]:
        return (
            ball_points(rng, self.center, self.radius, self.n, count),
            ball_points(rng, self.center, self.radius, self.n, count),
        )

    def retract(self, points: Points) -> Points:
        offset = points - self.center
        lengths = norms(offset, self.n)
        scale = np.ones_like(lengths)
        outside = lengths > self.radius
        scale[outside] = self.radius / lengths[outside]
        return self.center + offset * scale[:, None]

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "center": self.center.tolist(),
            "radius": self.radius,
            "n": {"p": self.n.to_json()},
        }


@dataclass(frozen=True, eq=False)
class BoxRegion(RegionSpec):
    """The box [lo, hi]."""

    lo: Vector
    hi: Vector

    kind: ClassVar[str] = "BoxRegion"

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", as_vector(self.lo, "lo"))
        object.__setattr__(self, "hi", as_vector(self.hi, "hi"))
        check_same_dim(self.lo, self.hi)
        if np.any(self.lo > self.hi):
            raise InvalidArgumentError("BoxRegion needs lo <= hi componentwise")
        if np.array_equal(self.lo, self.hi):
            raise InvalidArgumentError("BoxRegion is degenerate: lo == hi")

    @property
    def dim(self) -> int:
        return self.lo.size

    def sample_pairs(self, rng: np.random.Generator, count: int) -> tuple[Points, Points]:
        return box_points(rng, self.lo, self.hi, count), box_points(rng, self.lo, self.hi, count)

    def retract(self, points: Points) -> Points:
        return np.clip(points, self.lo, self.hi)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False)
class PairRegion(RegionSpec):
    """The single pair (x1, x2), for replaying a witness."""

    x1: Vector
    x2: Vector

    kind: ClassVar[str] = "PairRegion"
    refinable: ClassVar[bool] = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "x1", as_vector(self.x1, "x1"))
        object.__setattr__(self, "x2", as_vector(self.x2, "x2"))
        check_same_dim(self.x1, self.x2)
        if np.array_equal(self.x1, self.x2):
            raise InvalidArgumentError("PairRegion is degenerate: x1 == x2")

    @property
    def dim(self) -> int:
        return self.x1.size

    def pair_count(self, requested: int) -> int:
        return 1

    def sample_pairs(self, rng: np.random.Generator, count: int) -> tuple[Points, Points]:
        return np.repeat(self.x1[None, :], count, axis=0), np.repeat(self.x2[None, :], count, axis=0)

    def retract(self, points: Points) -> Points:
        return points

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "x1": self.x1.tolist(), "x2": self.x2.tolist()}


def sphere_chord_factor(x1: npt.ArrayLike, x2: npt.ArrayLike, lam: float, r: float) -> float:
    """A = 1 − 2λ + 2λ² + 2λ(1 − λ)cos θ with cos θ = ⟨x1, x2⟩/r².

    For x1, x2 on the Euclidean sphere of radius r around the origin,
    ‖(1 − λ)x1 + λx2‖₂ = r√A.
    """
    x1v, x2v = as_vector(x1, "x1"), as_vector(x2, "x2")
    cos_theta = float(x1v @ x2v) / (r * r)
    return 1.0 - 2.0 * lam + 2.0 * lam * lam + 2.0 * lam * (1.0 - lam) * cos_theta
