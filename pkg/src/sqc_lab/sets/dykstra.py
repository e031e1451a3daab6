"""Dykstra's cyclic projection onto intersections of Euclidean balls."""

import logging

import numpy as np
import numpy.typing as npt

from sqc_lab.errors import NumericFailureError

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 10_000
RESIDUAL = 1e-10


def project_ball_rows(
    points: npt.NDArray[np.float64], center: npt.NDArray[np.float64], radius: float
) -> npt.NDArray[np.float64]:
    """Radial projection of every row onto the closed ball B(center, radius)."""
    offset = points - center
    lengths = np.sqrt((offset * offset).sum(axis=-1))
    outside = lengths > radius
    scale = np.ones_like(lengths)
    scale[outside] = radius / lengths[outside]
    return center + offset * scale[:, None]


def dykstra_balls(
    points: npt.NDArray[np.float64],
    centers: npt.NDArray[np.float64],
    radii: npt.NDArray[np.float64],
    max_iterations: int = MAX_ITERATIONS,
    residual: float = RESIDUAL,
) -> npt.NDArray[np.float64]:
    """Project every row onto the intersection of the balls B(centers[i], radii[i]).

    Rows already inside every ball are returned unchanged. The remaining rows
    run Dykstra's scheme (cyclic projections with correction terms) until one
    sweep moves no row by more than residual.

    Raises:
        NumericFailureError: If max_iterations sweeps do not reach the residual.
    """
    points = np.asarray(points, dtype=np.float64)
    result = points.copy()
    offsets = points[None, :, :] - centers[:, None, :]
    inside = np.all(np.sqrt((offsets * offsets).sum(axis=-1)) <= radii[:, None], axis=0)
    active = np.flatnonzero(~inside)
    if active.size == 0:
        return result

    x = points[active].copy()
    corrections = np.zeros((len(radii),) + x.shape)
    change = np.inf
    for iteration in range(1, max_iterations + 1):
        previous = x
        for i, (center, radius) in enumerate(zip(centers, radii)):
            shifted = x + corrections[i]
            x = project_ball_rows(shifted, center, radius)
            corrections[i] = shifted - x
        change = float(np.sqrt(((x - previous) ** 2).sum(axis=-1)).max())
        if change <= residual:
            logger.debug(f"Dykstra converged for {active.size} points in {iteration} sweeps")
            result[active] = x
            return result
    raise NumericFailureError("Dykstra projection did not converge", residual=change, iterations=max_iterations)
