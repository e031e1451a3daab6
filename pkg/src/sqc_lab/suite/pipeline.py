"""From a strongly convex set to a strong quasiconvexity modulus of its distance function.

For Ω strongly convex with respect to R and a sphere of radius r around the
origin missing Ω, the distance to Ω is σ-strongly quasiconvex on the sphere's
chords with σ = c²/R, where c = min{c₀, √(2Rδ/r²)}, δ is the gap between the
sphere and Ω, and c₀ bounds ‖P(x₁) − P(x₂)‖₂ ≥ c₀‖x₁ − x₂‖₂ on the sphere.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from sqc_lab.engine.estimators import Certification, SqcEstimate, certify, sigma_hat
from sqc_lab.engine.functions import DistanceTo
from sqc_lab.engine.regions import SphereChords
from sqc_lab.errors import InvalidArgumentError, PreconditionFailure
from sqc_lab.geometry.sampling import SamplerConfig, block_rng, sphere_points, unit_directions
from sqc_lab.geometry.vectors import L2, Vector, norms
from sqc_lab.sets.probes import ConvexityProbeResult, strong_convexity_probe, vial_inclusion_check
from sqc_lab.sets.specs import ConvexSet, distance_many

logger = logging.getLogger(__name__)

DESCENT_STEPS = 10
C0_FLOOR = 1e-9
VIAL_TRIPLES = 1000
EMPIRICAL_SHARE = 0.5

Points = npt.NDArray[np.float64]


@dataclass(frozen=True)
class StronglyConvexPipeline:
    """Constants of the strongly convex set theorem for one (Ω, R, r)."""

    omega: ConvexSet
    R: float
    r: float
    delta: float
    c0_hat: float
    c: float
    sigma: float

    @property
    def regularity_holds(self) -> bool:
        return self.c0_hat > C0_FLOOR


@dataclass(frozen=True)
class PipelineRun:
    """A pipeline with its certification and spot checks.

    When the projection bound fails empirically (c₀ ≈ 0), certification runs
    at a share of the empirical modulus instead of the theorem's σ.
    """

    pipeline: StronglyConvexPipeline
    probe: ConvexityProbeResult
    certification: Certification
    empirical: SqcEstimate
    vial_checked: int
    vial_failures: int
    c0_spread: float
    vial_witness: tuple[Vector, Vector, float] | None = None  # first failing (p₁, p₂, λ)

    @property
    def hypothesis_failure(self) -> bool:
        return not (self.probe.strongly_convex and self.pipeline.regularity_holds)

    @property
    def passed(self) -> bool:
        return self.certification.passed and self.vial_failures == 0


def descend_on_sphere(
    objective: Callable[[Points], npt.NDArray[np.float64]], start: Points, r: float, steps: int = DESCENT_STEPS
) -> tuple[Points, float]:
    """Backtracking descent of objective over tuples of points on the sphere of radius r.

    objective maps an array (m, k, dim) of k-tuples to m values.
    """
    current = start.copy()
    value = float(objective(current[None])[0])
    step = 0.1 * r
    h = 1e-7 * r
    k, dim = current.shape
    basis = np.eye(k * dim).reshape(k * dim, k, dim) * h
    for _ in range(steps):
        probes = np.concatenate((current[None] + basis, current[None] - basis))
        values = objective(probes)
        with np.errstate(invalid="ignore"):
            grad = ((values[: k * dim] - values[k * dim :]) / (2.0 * h)).reshape(k, dim)
        if not np.all(np.isfinite(grad)):
            break
        grad -= np.sum(grad * current, axis=1, keepdims=True) * current / (r * r)
        length = float(np.sqrt((grad * grad).sum()))
        if length == 0.0:
            break
        improved = False
        while step > 1e-12 * r:
            moved = current - step * grad / length
            moved = r * moved / norms(moved, L2)[:, None]
            candidate = float(objective(moved[None])[0])
            if candidate < value:
                current, value, improved = moved, candidate, True
                break
            step /= 2.0
        if not improved:
            break
    return current, value


def estimate_delta(omega: ConvexSet, r: float, cfg: SamplerConfig) -> float:
    """Smallest sampled distance from the sphere of radius r to omega, refined by descent."""
    origin = np.zeros(omega.dim)
    points = sphere_points(origin, r, L2, cfg.n_pairs, cfg.seed, stream="pipeline-delta")
    distances = distance_many(omega, points, L2)
    best = int(np.argmin(distances))

    def objective(tuples: Points) -> npt.NDArray[np.float64]:
        return distance_many(omega, tuples[:, 0, :], L2)

    _, refined = descend_on_sphere(objective, points[best][None, :], r)
    return min(float(distances[best]), refined)


def projection_ratios(omega: ConvexSet, xs: Points, ys: Points) -> npt.NDArray[np.float64]:
    gaps = norms(xs - ys, L2)
    moved = norms(omega.project_many(xs) - omega.project_many(ys), L2)
    return np.where(gaps > 0, moved / np.where(gaps > 0, gaps, 1.0), np.inf)


def estimate_c0(omega: ConvexSet, r: float, cfg: SamplerConfig) -> tuple[float, float]:
    """(min, max − min) of ‖P(x₁) − P(x₂)‖₂/‖x₁ − x₂‖₂ over sampled sphere pairs, min refined by descent."""
    origin = np.zeros(omega.dim)
    xs = sphere_points(origin, r, L2, cfg.n_pairs, cfg.seed, stream="pipeline-c0-x")
    ys = sphere_points(origin, r, L2, cfg.n_pairs, cfg.seed, stream="pipeline-c0-y")
    ratios = projection_ratios(omega, xs, ys)
    finite = ratios[np.isfinite(ratios)]
    if finite.size == 0:
        raise InvalidArgumentError("No distinct sphere pairs sampled")
    best = int(np.argmin(ratios))

    def objective(tuples: Points) -> npt.NDArray[np.float64]:
        values = projection_ratios(omega, tuples[:, 0, :], tuples[:, 1, :])
        gaps = norms(tuples[:, 0, :] - tuples[:, 1, :], L2)
        return np.where(gaps > 1e-3 * r, values, np.inf)

    _, refined = descend_on_sphere(objective, np.stack((xs[best], ys[best])), r)
    c0 = min(float(ratios[best]), refined)
    return c0, float(finite.max() - finite.min())


def sample_vial_triples(
    omega: ConvexSet, r: float, count: int, seed: int
) -> list[tuple[Vector, Vector, float]]:
    """Boundary pairs (projections of sphere points) with a λ in (0, 1)."""
    rng = block_rng(seed, "pipeline-vial", 0)
    xs = r * unit_directions(rng, count, omega.dim, L2)
    ys = r * unit_directions(rng, count, omega.dim, L2)
    lams = rng.uniform(0.0, 1.0, size=count)
    lams = np.clip(lams, 1e-6, 1.0 - 1e-6)
    p1, p2 = omega.project_many(xs), omega.project_many(ys)
    return [(p1[i], p2[i], float(lams[i])) for i in range(count)]


def run_strongly_convex_pipeline(
    omega: ConvexSet,
    R: float,
    r: float,
    cfg: SamplerConfig,
    tol: float = 1e-9,
    vial_triples: int | None = None,
    vial_directions: int | None = None,
) -> PipelineRun:
    """Estimate δ and c₀ for omega, form c and σ = c²/R, and certify the sphere chords.

    Args:
        omega: A bounded set, expected strongly convex with respect to R.
        R: Strong convexity radius.
        r: Radius of the sphere around the origin.
        cfg: Sampling budget and seed.
        tol: Certification tolerance.
        vial_triples: Number of (p₁, p₂, λ) Vial checks; defaults to min(1000, cfg.n_pairs).
        vial_directions: Boundary directions per Vial check.

    Returns:
        The pipeline constants with certification, empirical modulus and Vial spot checks.

    Raises:
        InvalidArgumentError: If R, r are not positive or the dimension is below 2.
        PreconditionFailure: If the sphere meets omega (δ̂ ≤ 0).
    """
    if not (R > 0 and r > 0):
        raise InvalidArgumentError(f"R and r must be positive, got R={R}, r={r}")
    if omega.dim < 2:
        raise InvalidArgumentError("The sphere pipeline needs dimension >= 2")

    delta = estimate_delta(omega, r, cfg)
    if delta <= 0.0:
        raise PreconditionFailure(f"The sphere of radius {r} meets the {omega.kind} (delta_hat={delta:.3g})")
    probe = strong_convexity_probe(omega, R, SamplerConfig(seed=cfg.seed, n_pairs=min(cfg.n_pairs, 1000)))
    c0_hat, c0_spread = estimate_c0(omega, r, cfg)
    c = min(c0_hat, math.sqrt(2.0 * R * delta / (r * r)))
    pipeline = StronglyConvexPipeline(omega=omega, R=R, r=r, delta=delta, c0_hat=c0_hat, c=c, sigma=c * c / R)
    logger.info(f"Pipeline on {omega.kind}: delta={delta:.6g}, c0_hat={c0_hat:.6g}, c={c:.6g}, sigma={pipeline.sigma:.6g}")

    f = DistanceTo(omega, L2)
    chords = SphereChords(np.zeros(omega.dim), r)
    empirical = sigma_hat(f, chords, cfg)
    if probe.strongly_convex and pipeline.regularity_holds:
        certification = certify(f, chords, pipeline.sigma, cfg, tol)
    else:
        logger.warning(
            f"Hypothesis fails for {omega.kind}: strongly convex={probe.strongly_convex}, c0_hat={c0_hat:.3g}; "
            f"certifying {EMPIRICAL_SHARE} of the empirical modulus {empirical.sigma_hat:.6g}"
        )
        certification = certify(f, chords, max(EMPIRICAL_SHARE * empirical.sigma_hat, 0.0), cfg, tol)

    count = min(VIAL_TRIPLES, cfg.n_pairs) if vial_triples is None else vial_triples
    failed = [
        (p1, p2, lam)
        for p1, p2, lam in sample_vial_triples(omega, r, count, cfg.seed)
        if not vial_inclusion_check(omega, p1, p2, lam, R, vial_directions, seed=cfg.seed)
    ]
    failures = len(failed)
    if failures:
        logger.warning(f"Vial inclusion failed at {failures} of {count} sampled triples")
    return PipelineRun(
        pipeline=pipeline,
        probe=probe,
        certification=certification,
        empirical=empirical,
        vial_checked=count,
        vial_failures=failures,
        c0_spread=c0_spread,
        vial_witness=failed[0] if failed else None,
    )
