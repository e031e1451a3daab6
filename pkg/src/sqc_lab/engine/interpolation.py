"""One-dimensional midpoint strengthening: from a midpoint modulus α to the λ-inequality."""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from sqc_lab.engine.functions import FunctionSpec, Restriction
from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.vectors import as_vector, check_same_dim

logger = logging.getLogger(__name__)


class InterpolationStatus(Enum):
    """Outcome of the λ-interpolation check."""

    PASS = "pass"
    HYPOTHESIS_FAILURE = "hypothesis-failure"
    CONCLUSION_FAILURE = "conclusion-failure"


@dataclass(frozen=True)
class InterpolationCheck:
    status: InterpolationStatus
    worst_gap: float  # largest violation found (≤ tol on pass)
    worst_at: tuple[float, ...]  # (s, t) for the hypothesis, (λ,) for the conclusion

    @property
    def passed(self) -> bool:
        return self.status is InterpolationStatus.PASS

    def __bool__(self) -> bool:
        return self.passed


def restrict_to_segment(f: FunctionSpec, x_start: npt.ArrayLike, x_end: npt.ArrayLike) -> Restriction:
    """The function t ↦ f(x_start + t·(x_end − x_start)) on [0, 1]."""
    start, end = as_vector(x_start, "x_start"), as_vector(x_end, "x_end")
    check_same_dim(start, end)
    return Restriction(f=f, origin=start, direction=end - start)


def grid_values(f_1d: FunctionSpec, grid: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    if grid < 2:
        raise InvalidArgumentError(f"grid must be at least 2, got {grid}")
    if f_1d.dim not in (None, 1):
        raise InvalidArgumentError(f"Expected a function on ℝ¹, got dimension {f_1d.dim}")
    t = np.arange(grid + 1) / grid
    return t, f_1d.evaluate(t[:, None])


def midpoint_gaps(
    f_1d: FunctionSpec, grid: int
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """(s, t, (f(s) + f(t))/2 − f((s + t)/2)) for grid pairs whose midpoint is a grid node."""
    t, values = grid_values(f_1d, grid)
    i, j = np.triu_indices(grid + 1, k=1)
    even = (i + j) % 2 == 0
    i, j = i[even], j[even]
    gaps = (values[i] + values[j]) / 2.0 - values[(i + j) // 2]
    return t[i], t[j], gaps


def grid_midpoint_modulus(f_1d: FunctionSpec, grid: int) -> float:
    """Largest α with f((s + t)/2) ≤ (f(s) + f(t))/2 − α(t − s)² on all grid pairs."""
    s, t, gaps = midpoint_gaps(f_1d, grid)
    return float((gaps / (t - s) ** 2).min())


def lambda_interpolation_check(
    f_1d: FunctionSpec, alpha: float, grid: int, tol: float = 1e-9
) -> InterpolationCheck:
    """Check f(λ) ≤ (1 − λ)f(0) + λf(1) − 4αλ(1 − λ) on the grid λ = k/grid.

    The midpoint hypothesis with modulus alpha is checked first on all grid
    pairs with a grid midpoint; if it fails the conclusion is not tested.

    Raises:
        InvalidArgumentError: If alpha < 0, grid < 2, or f_1d is not one-dimensional.
    """
    if alpha < 0:
        raise InvalidArgumentError(f"alpha must be nonnegative, got {alpha}")
    s, t, gaps = midpoint_gaps(f_1d, grid)
    hypothesis = alpha * (t - s) ** 2 - gaps
    k = int(np.argmax(hypothesis))
    if hypothesis[k] > tol:
        logger.warning(f"Midpoint hypothesis with alpha={alpha:.6g} fails at s={s[k]:.6g}, t={t[k]:.6g}")
        return InterpolationCheck(InterpolationStatus.HYPOTHESIS_FAILURE, float(hypothesis[k]), (float(s[k]), float(t[k])))

    lam, values = grid_values(f_1d, grid)
    bound = (1.0 - lam) * values[0] + lam * values[-1] - 4.0 * alpha * lam * (1.0 - lam)
    excess = values - bound
    k = int(np.argmax(excess))
    status = InterpolationStatus.PASS if excess[k] <= tol else InterpolationStatus.CONCLUSION_FAILURE
    return InterpolationCheck(status, float(excess[k]), (float(lam[k]),))
