"""Sampling probes for strongly convex sets: spindle inclusion and Vial balls."""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.sampling import (
    SamplerConfig,
    block_rng,
    circle_directions,
    map_blocks,
    scaled_boundary_count,
    unit_directions,
)
from sqc_lab.geometry.vectors import L2, Vector, as_vector, check_same_dim, interpolate, norms
from sqc_lab.sets.specs import DEFAULT_TOL, ConvexSet, member
from sqc_lab.sets.spindle import SPAN_SLACK, spindle_boundary_points

logger = logging.getLogger(__name__)

MAX_ESCAPE_DOUBLINGS = 200


def vial_radius(p1: Vector, p2: Vector, lam: float, R: float) -> float:
    """r_λ = λ(1 − λ)‖p1 − p2‖₂² / 2R."""
    gap = float(norms(p2 - p1, L2))
    return lam * (1.0 - lam) * gap * gap / (2.0 * R)


def vial_inclusion_check(
    omega: ConvexSet,
    p1: npt.ArrayLike,
    p2: npt.ArrayLike,
    lam: float,
    R: float,
    n_boundary_samples: int | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> bool:
    """Check that the Euclidean ball B[p_λ; r_λ] lies in omega on sampled boundary points.

    p_λ = (1 − λ)p1 + λp2. In the plane the boundary directions are evenly
    spaced; otherwise they are seeded uniform directions. The default count is
    4096 up to dimension 4 and doubles with each further dimension.

    Args:
        omega: The set under test.
        p1: First member point.
        p2: Second member point.
        lam: λ in (0, 1).
        R: Strong convexity radius.
        n_boundary_samples: Boundary directions to test.
        tol: Membership tolerance.
        seed: Seed for the boundary directions outside the plane.

    Returns:
        True iff every sampled boundary point is a member of omega.

    Raises:
        InvalidArgumentError: If p1 or p2 is not in omega, or λ, R are out of range.
    """
    p1v, p2v = as_vector(p1, "p1"), as_vector(p2, "p2")
    check_same_dim(p1v, p2v)
    if not 0.0 < lam < 1.0:
        raise InvalidArgumentError(f"lambda must lie in (0, 1), got {lam}")
    if not R > 0:
        raise InvalidArgumentError(f"R must be positive, got {R}")
    for name, point in (("p1", p1v), ("p2", p2v)):
        if not member(omega, point, tol):
            raise InvalidArgumentError(f"{name} = {point.tolist()} is not in the set")

    center = interpolate(p2v, p1v, lam)
    radius = vial_radius(p1v, p2v, lam, R)
    if radius == 0.0:
        return member(omega, center, tol)

    dim = center.size
    count = n_boundary_samples or scaled_boundary_count(dim)
    if dim == 2:
        directions = circle_directions(count)
    else:
        directions = unit_directions(block_rng(seed, "vial", 0), count, dim, L2)
    inside = omega.contains_many(center + radius * directions, tol)
    if not np.all(inside):
        logger.debug(f"Vial ball B[{center.tolist()}; {radius:.3g}] leaves the set at {int((~inside).sum())} of {count} points")
    return bool(np.all(inside))


@dataclass(frozen=True)
class ConvexityProbeResult:
    """Outcome of a strong convexity probe."""

    strongly_convex: bool
    n_pairs: int
    witness: tuple[Vector, Vector, Vector] | None = None  # (x, y, z ∈ D_R(x, y) outside the set)

    def __bool__(self) -> bool:
        return self.strongly_convex


def escape_point(omega: ConvexSet, x: Vector, y: Vector, tol: float) -> Vector:
    """A point of the line through x and y outside the bounded set omega."""
    step = y - x
    z = y + step
    for _ in range(MAX_ESCAPE_DOUBLINGS):
        if not omega.contains(z, tol):
            return z
        step = 2.0 * step
        z = y + step
    raise InvalidArgumentError(f"{omega.kind} does not look bounded along {step.tolist()}")


def strong_convexity_probe(
    omega: ConvexSet,
    R: float,
    cfg: SamplerConfig,
    n_directions: int = 2,
    n_angles: int = 16,
    tol: float = DEFAULT_TOL,
) -> ConvexityProbeResult:
    """Search for x, y in omega and z in D_R(x, y) with z outside omega.

    Pairs come from omega.sample_points, block by block. Pairs farther apart
    than 2R lie in no common radius-R ball, so D_R(x, y) is the whole space and
    any outside point along their line is a witness.

    Raises:
        InvalidArgumentError: If omega is unbounded or R <= 0.
    """
    if not omega.bounded:
        raise InvalidArgumentError(f"{omega.kind} is unbounded; the probe needs a bounded set")
    if not R > 0:
        raise InvalidArgumentError(f"R must be positive, got {R}")

    def probe_block(block: int, start: int, stop: int) -> tuple[Vector, Vector, Vector] | None:
        rng = block_rng(cfg.seed, "strong-convexity", block)
        count = stop - start
        xs = omega.sample_points(rng, count)
        ys = omega.sample_points(rng, count)
        far = norms(ys - xs, L2) > 2.0 * R * (1.0 + SPAN_SLACK)
        near = np.flatnonzero(~far)
        outside = np.zeros(count, dtype=bool)
        first_z: dict[int, Vector] = {}
        if near.size:
            candidates = spindle_boundary_points(xs[near], ys[near], R, rng, n_directions, n_angles)
            flat = candidates.reshape(-1, omega.dim)
            inside = omega.contains_many(flat, tol).reshape(candidates.shape[:2])
            for row in np.flatnonzero(~inside.all(axis=1)):
                outside[near[row]] = True
                first_z[int(near[row])] = candidates[row, int(np.argmin(inside[row]))]
        outside |= far
        if not np.any(outside):
            return None
        i = int(np.argmax(outside))
        z = first_z[i] if i in first_z else escape_point(omega, xs[i], ys[i], tol)
        return xs[i], ys[i], z

    results = map_blocks(probe_block, cfg.n_pairs)
    for witness in results:
        if witness is not None:
            logger.info(f"{omega.kind} is not strongly convex for R={R}: z={witness[2].tolist()}")
            return ConvexityProbeResult(strongly_convex=False, n_pairs=cfg.n_pairs, witness=witness)
    logger.debug(f"No spindle escapes {omega.kind} for R={R} over {cfg.n_pairs} pairs")
    return ConvexityProbeResult(strongly_convex=True, n_pairs=cfg.n_pairs)
