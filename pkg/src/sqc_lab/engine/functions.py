"""Scalar functions under test: norms, distance functions and their segment restrictions."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
import numpy.typing as npt

from sqc_lab.errors import InvalidArgumentError, UnsupportedCombinationError
from sqc_lab.geometry.vectors import NormSpec, Vector, as_vector, check_same_dim, norms
from sqc_lab.sets.specs import ConvexSet, distance_many, supports_distance


class FunctionSpec(ABC):
    """A real function on ℝⁿ, evaluated row-wise on batches of points."""

    kind: ClassVar[str]

    @abstractmethod
    def evaluate(self, points: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Values at every row of an (m, dim) array."""

    def __call__(self, x: npt.ArrayLike) -> float:
        return float(self.evaluate(as_vector(x, "x")[None, :])[0])

    @property
    def dim(self) -> int | None:
        """Required input dimension, or None if any dimension works."""
        return None

    @abstractmethod
    def to_json(self) -> dict[str, Any]: ...


@dataclass(frozen=True, eq=False)
class Norm(FunctionSpec):
    """z ↦ ‖z − center‖_n; center defaults to the origin."""

    n: NormSpec
    center: Vector | None = None

    kind: ClassVar[str] = "Norm"

    def __post_init__(self) -> None:
        if self.center is not None:
            object.__setattr__(self, "center", as_vector(self.center, "center"))

    @property
    def dim(self) -> int | None:
        return None if self.center is None else self.center.size

    def evaluate(self, points: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        if self.center is None:
            return norms(points, self.n)
        return norms(points - self.center, self.n)

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind, "n": {"p": self.n.to_json()}}
        if self.center is not None:
            data["center"] = self.center.tolist()
        return data


@dataclass(frozen=True, eq=False)
class DistanceTo(FunctionSpec):
    """z ↦ d_s(z) measured in the norm n."""

    s: ConvexSet
    n: NormSpec

    kind: ClassVar[str] = "DistanceTo"

    def __post_init__(self) -> None:
        if not supports_distance(self.s, self.n):
            raise UnsupportedCombinationError(f"Distance to {self.s.kind} measured in {self.n.label} is not supported")

    @property
    def dim(self) -> int | None:
        return self.s.dim

    def evaluate(self, points: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return distance_many(self.s, points, self.n)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "set": self.s.to_json(), "n": {"p": self.n.to_json()}}


@dataclass(frozen=True, eq=False)
class Restriction(FunctionSpec):
    """t ↦ f(origin + t·direction), a function on ℝ¹."""

    f: FunctionSpec
    origin: Vector
    direction: Vector

    kind: ClassVar[str] = "Restriction"

    def __post_init__(self) -> None:
        object.__setattr__(self, "origin", as_vector(self.origin, "origin"))
        object.__setattr__(self, "direction", as_vector(self.direction, "direction"))
        check_same_dim(self.origin, self.direction)
        if self.f.dim is not None and self.f.dim != self.origin.size:
            raise InvalidArgumentError(f"Dimension mismatch: function needs {self.f.dim}, segment has {self.origin.size}")

    @property
    def dim(self) -> int:
        return 1

    def evaluate(self, points: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        t = np.asarray(points, dtype=np.float64)[:, 0]
        return self.f.evaluate(self.origin + t[:, None] * self.direction)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "f": self.f.to_json(),
            "origin": self.origin.tolist(),
            "direction": self.direction.tolist(),
        }
