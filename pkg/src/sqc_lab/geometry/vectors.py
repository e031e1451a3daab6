"""Vectors, ℓp norms and segment interpolation."""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from sqc_lab.errors import InvalidArgumentError

Vector = npt.NDArray[np.float64]


def as_vector(values: Any, name: str = "vector") -> Vector:
    """Convert input to a finite, one-dimensional float64 array.

    Args:
        values: Sequence of reals or an array.
        name: Argument name used in error messages.

    Returns:
        A read-only float64 array with at least one coordinate.

    Raises:
        InvalidArgumentError: If the input is empty, not one-dimensional, or not finite.
    """
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidArgumentError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidArgumentError(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} has non-finite coordinates: {arr.tolist()}")
    arr.setflags(write=False)
    return arr


def check_same_dim(*vectors: Vector) -> int:
    """Return the common dimension of the given vectors.

    Raises:
        InvalidArgumentError: If the dimensions differ.
    """
    dims = {v.shape[-1] for v in vectors}
    if len(dims) != 1:
        raise InvalidArgumentError(f"Dimension mismatch: {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True)
class NormSpec:
    """Which ℓp norm measures lengths; p = inf is the max-norm."""

    p: float = 2.0

    def __post_init__(self) -> None:
        if math.isnan(self.p) or self.p < 1:
            raise InvalidArgumentError(f"Norm exponent must satisfy p >= 1, got {self.p}")

    @classmethod
    def lp(cls, p: float) -> "NormSpec":
        return cls(p=float(p))

    @classmethod
    def l1(cls) -> "NormSpec":
        return cls(p=1.0)

    @classmethod
    def l2(cls) -> "NormSpec":
        return cls(p=2.0)

    @classmethod
    def linf(cls) -> "NormSpec":
        return cls(p=math.inf)

    @property
    def is_infinity(self) -> bool:
        return math.isinf(self.p)

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2.0

    @property
    def label(self) -> str:
        """Short name such as 'L2', 'L1.5' or 'Linf'."""
        if self.is_infinity:
            return "Linf"
        return f"L{self.p:g}"

    def to_json(self) -> float | str:
        return "inf" if self.is_infinity else self.p

    def __str__(self) -> str:
        return self.label


L2 = NormSpec.l2()


def norms(points: npt.ArrayLike, n: NormSpec) -> npt.NDArray[np.float64]:
    """Norm of every row (last axis) of an array.

    Finite p other than 1 and 2 uses max-factoring, ‖x‖_p = m·‖x/m‖_p with
    m = max|xᵢ|, so large exponents do not overflow.
    """
    a = np.asarray(points, dtype=np.float64)
    absval = np.abs(a)
    if n.is_infinity:
        return absval.max(axis=-1)
    if n.p == 1.0:
        return absval.sum(axis=-1)
    if n.p == 2.0:
        return np.sqrt((a * a).sum(axis=-1))
    m = absval.max(axis=-1, keepdims=True)
    scale = np.where(m > 0, m, 1.0)
    return m[..., 0] * ((absval / scale) ** n.p).sum(axis=-1) ** (1.0 / n.p)


def norm(x: npt.ArrayLike, n: NormSpec = L2) -> float:
    """Return ‖x‖ under the norm n.

    Raises:
        InvalidArgumentError: If x is empty or not finite.
    """
    return float(norms(as_vector(x, "x"), n))


def segment_weights(lam: npt.ArrayLike) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Weights (w_x, w_y) of λx + (1−λ)y.

    Both weights are derived from the larger one, whose complement is exact in
    binary floating point, so swapping (x, λ) with (y, 1−λ) is bitwise symmetric.
    """
    lam = np.asarray(lam, dtype=np.float64)
    upper = lam >= 0.5
    w_y_low = 1.0 - lam
    w_x = np.where(upper, lam, 1.0 - w_y_low)
    w_y = np.where(upper, 1.0 - lam, w_y_low)
    return w_x, w_y


def interpolate(x: npt.ArrayLike, y: npt.ArrayLike, lam: float) -> Vector:
    """Return λx + (1−λ)y.

    Raises:
        InvalidArgumentError: On dimension mismatch or λ outside [0, 1].
    """
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    check_same_dim(xv, yv)
    if not 0.0 <= lam <= 1.0:
        raise InvalidArgumentError(f"lambda must lie in [0, 1], got {lam}")
    w_x, w_y = segment_weights(lam)
    return w_x * xv + w_y * yv


def interpolate_rows(
    x: npt.NDArray[np.float64], y: npt.NDArray[np.float64], lam: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """Batch form of interpolate; λ broadcasts against the leading axes."""
    w_x, w_y = segment_weights(lam)
    return w_x[..., None] * x + w_y[..., None] * y
