"""Recession-ray probe: does x0 + t·v stay in the set for all t ≥ 0?"""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.vectors import as_vector, check_same_dim
from sqc_lab.sets.specs import DEFAULT_TOL, ConvexSet, member

logger = logging.getLogger(__name__)

BISECTION_STEPS = 60


@dataclass(frozen=True)
class RayProbeResult:
    """Outcome of a recession-ray probe."""

    direction_in_cone: bool
    t_checked: float
    first_exit_t: float | None = None

    def __post_init__(self) -> None:
        if self.direction_in_cone and self.first_exit_t is not None:
            raise InvalidArgumentError("A direction in the recession cone has no exit point")


def recession_ray_probe(
    omega: ConvexSet,
    x0: npt.ArrayLike,
    v: npt.ArrayLike,
    t_max: float,
    steps: int,
    tol: float = DEFAULT_TOL,
) -> RayProbeResult:
    """Probe the ray x0 + t·v on a doubling ladder of t up to t_max.

    The ladder starts at t_max / 2^(steps − 1). On the first failing rung the
    exit parameter is bisected against the last passing one.

    Args:
        omega: The set under test.
        x0: Start point, a member of omega.
        v: Nonzero direction.
        t_max: Largest t checked.
        steps: Number of rungs on the ladder.
        tol: Membership tolerance.

    Returns:
        RayProbeResult with the exit parameter when the ray leaves omega.

    Raises:
        InvalidArgumentError: If x0 is not in omega, v = 0, t_max <= 0 or steps < 1.
    """
    x0v, vv = as_vector(x0, "x0"), as_vector(v, "v")
    check_same_dim(x0v, vv)
    if not np.any(vv != 0):
        raise InvalidArgumentError("Ray direction v must be nonzero")
    if not t_max > 0:
        raise InvalidArgumentError(f"t_max must be positive, got {t_max}")
    if steps < 1:
        raise InvalidArgumentError(f"steps must be positive, got {steps}")
    if not member(omega, x0v, tol):
        raise InvalidArgumentError(f"x0 = {x0v.tolist()} is not in the set")

    ladder = t_max / 2.0 ** np.arange(steps - 1, -1, -1)
    passed = 0.0
    for t in ladder:
        if omega.contains(x0v + t * vv, tol):
            passed = float(t)
            continue
        lo, hi = passed, float(t)
        for _ in range(BISECTION_STEPS):
            mid = (lo + hi) / 2.0
            if omega.contains(x0v + mid * vv, tol):
                lo = mid
            else:
                hi = mid
        logger.debug(f"Ray leaves {omega.kind} near t={hi:.6g}")
        return RayProbeResult(direction_in_cone=False, t_checked=float(t), first_exit_t=hi)
    return RayProbeResult(direction_in_cone=True, t_checked=float(t_max))
