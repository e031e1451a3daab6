"""One executable check per result: constants, counterexamples and moduli.

Counterexample checks pass when the violation is found: a check confirms the
result, it does not grade the function.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
import numpy.typing as npt

from sqc_lab.engine.boundedness import boundedness_probe
from sqc_lab.engine.estimators import (
    Certification,
    SqcEstimate,
    Witness,
    certify,
    defect,
    midpoint_conversion_check,
    sigma_hat,
    witness_at,
)
from sqc_lab.engine.functions import DistanceTo, FunctionSpec, Norm
from sqc_lab.engine.interpolation import (
    InterpolationCheck,
    InterpolationStatus,
    grid_midpoint_modulus,
    lambda_interpolation_check,
    restrict_to_segment,
)
from sqc_lab.engine.regions import BallRegion, BoxRegion, PairRegion, RegionSpec, SegmentRegion, SphereChords
from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.sampling import SamplerConfig, block_rng, unit_directions
from sqc_lab.geometry.vectors import L2, NormSpec, interpolate, interpolate_rows, norm, norms
from sqc_lab.sets.specs import Halfspace, NormBall, project_euclidean
from sqc_lab.sets.spindle import Spindle
from sqc_lab.suite.pipeline import run_strongly_convex_pipeline

logger = logging.getLogger(__name__)

DEFAULT_DIMS = (2, 3, 5)
ZERO_MODULUS = 1e-9
EXACT = 1e-12


class CheckStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    HYPOTHESIS_FAILURE = "hypothesis-failure"


@dataclass
class CheckOutcome:
    """Result of one check before it is stamped with name, seed and runtime."""

    status: CheckStatus
    sigma: float | None = None
    witness: Witness | None = None
    n_samples: int = 0
    details: dict[str, Any] = field(default_factory=dict)


def status_of(ok: bool) -> CheckStatus:
    return CheckStatus.PASS if ok else CheckStatus.FAIL


def basis_vector(dim: int, i: int, scale: float = 1.0) -> npt.NDArray[np.float64]:
    v = np.zeros(dim)
    v[i] = scale
    return v


def sigma_zero(R: float, r: float) -> float:
    """σ₀ = 2·min{1/(2r), (r − R)/r²}."""
    return 2.0 * min(1.0 / (2.0 * r), (r - R) / (r * r))


def chord_identity_samples(
    r: float, dim: int, cfg: SamplerConfig
) -> tuple[npt.NDArray[np.float64], ...]:
    """Sampled chords (x, y, λ) with |‖x_λ‖₂ − r√A| and (1 − √A) − (1 − A)/2 for each, x_λ = λy + (1 − λ)x."""
    rng = block_rng(cfg.seed, "chord-identity", 0)
    count = cfg.n_pairs
    xs = r * unit_directions(rng, count, dim, L2)
    ys = r * unit_directions(rng, count, dim, L2)
    lams = rng.uniform(0.0, 1.0, size=count)
    cos_theta = np.clip(np.einsum("md,md->m", xs, ys) / (r * r), -1.0, 1.0)
    A = 1.0 - 2.0 * lams + 2.0 * lams**2 + 2.0 * lams * (1.0 - lams) * cos_theta
    points = interpolate_rows(ys, xs, lams)
    identity = np.abs(norms(points, L2) - r * np.sqrt(A))
    concavity = (1.0 - np.sqrt(A)) - (1.0 - A) / 2.0
    return xs, ys, lams, identity, concavity


def chord_identity_errors(r: float, dim: int, cfg: SamplerConfig) -> tuple[float, float]:
    """(max |‖x_λ‖₂ − r√A|, min (1 − √A) − (1 − A)/2) over sampled sphere chords."""
    *_, identity, concavity = chord_identity_samples(r, dim, cfg)
    return float(identity.max()), float(concavity.min())


def disjoint_chords(
    R: float, r: float, dim: int, cfg: SamplerConfig, wanted: int = 3
) -> list[tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]]:
    """Sampled chords of the r-sphere whose segment misses the ball of radius R."""
    rng = block_rng(cfg.seed, "disjoint-chords", 0)
    xs = r * unit_directions(rng, 1024, dim, L2)
    ys = r * unit_directions(rng, 1024, dim, L2)
    d = ys - xs
    lengths2 = np.einsum("md,md->m", d, d)
    t = np.clip(-np.einsum("md,md->m", xs, d) / np.where(lengths2 > 0, lengths2, 1.0), 0.0, 1.0)
    closest = norms(xs + t[:, None] * d, L2)
    picked = np.flatnonzero((closest > R) & (lengths2 > 1e-6 * r * r))[:wanted]
    return [(xs[i], ys[i]) for i in picked]


def check_ball_spheres(
    R: float, r: float, cfg: SamplerConfig, dims: Sequence[int] = DEFAULT_DIMS, tol: float = 1e-9
) -> CheckOutcome:
    """Certify σ₀ on the r-sphere chords for the distance to the Euclidean ball of radius R.

    Also confirms a strictly positive modulus on chords missing the ball, the
    chord identity ‖x_λ‖₂ = r√A with its concavity bound, and that an interior
    pair refutes any positive modulus.

    Raises:
        InvalidArgumentError: If r <= R or R <= 0 or a dimension is below 2.
    """
    if not 0 < R < r:
        raise InvalidArgumentError(f"Need 0 < R < r, got R={R}, r={r}")
    if any(dim < 2 for dim in dims):
        raise InvalidArgumentError(f"Dimensions must be >= 2, got {list(dims)}")
    sigma0 = sigma_zero(R, r)
    details: dict[str, Any] = {"sigma0": sigma0}
    ok = True
    witness: Witness | None = None
    n_samples = 0
    for dim in dims:
        f = DistanceTo(NormBall(L2, np.zeros(dim), R), L2)
        cert = certify(f, SphereChords(np.zeros(dim), r), sigma0, cfg, tol)
        n_samples += cert.n_triples
        if not cert.passed and witness is None:
            witness = cert.witness

        disjoint = [
            sigma_hat(f, SegmentRegion(x1, x2), SamplerConfig(seed=cfg.seed, n_pairs=256))
            for x1, x2 in disjoint_chords(R, r, dim, cfg)
        ]
        sigma1 = [estimate.sigma_hat for estimate in disjoint]
        xs, ys, lams, identity, concavity = chord_identity_samples(r, dim, cfg)
        identity_ok = float(identity.max()) <= EXACT * max(1.0, r)
        concavity_ok = float(concavity.min()) >= -EXACT

        inside = PairRegion(basis_vector(dim, 0, R / 2.0), basis_vector(dim, 1, R / 2.0))
        in_ball = certify(f, inside, 1e-6, SamplerConfig(seed=cfg.seed, n_pairs=1), 0.0)

        flat = [estimate for estimate in disjoint if estimate.sigma_hat <= 0]
        dim_ok = cert.passed and not flat and identity_ok and concavity_ok and not in_ball.passed
        ok = ok and dim_ok
        if not dim_ok and witness is None:
            if flat:
                witness = flat[0].witness
            elif in_ball.passed:
                witness = witness_at(f, inside.x1, inside.x2, 0.5, 1e-6)
            else:
                i = int(np.argmax(identity)) if not identity_ok else int(np.argmin(concavity))
                witness = witness_at(f, ys[i], xs[i], float(lams[i]), sigma0)
        details[f"dim{dim}"] = {
            "max_defect": cert.max_defect,
            "sigma1": sigma1,
            "chord_identity_error": float(identity.max()),
            "concavity_margin": float(concavity.min()),
            "in_ball_refuted": not in_ball.passed,
        }
    return CheckOutcome(status_of(ok), sigma=sigma0, witness=witness, n_samples=n_samples, details=details)


def confirm_counterexample(
    f: FunctionSpec,
    region: RegionSpec,
    anchor: tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]],
    sigma: float,
    cfg: SamplerConfig,
) -> tuple[bool, SqcEstimate, Certification, dict[str, Any]]:
    """σ̂ ≈ 0 on the region and a certify failure at sigma with the full-strength witness."""
    estimate = sigma_hat(f, region, cfg, anchors=[anchor])
    cert = certify(f, region, sigma, cfg, tol=0.0, anchors=[anchor])
    w = cert.witness
    strength = w is not None and w.defect >= sigma / 8.0 * w.gap2 * (1.0 - 1e-6)
    ok = abs(estimate.sigma_hat) <= ZERO_MODULUS and not cert.passed and strength
    details = {
        "sigma_hat": estimate.sigma_hat,
        "witness_defect": None if w is None else w.defect,
        "witness_bound": None if w is None else sigma / 8.0 * w.gap2,
    }
    return ok, estimate, cert, details


def check_halfspace_counterexample(cfg: SamplerConfig, sigma: float = 1e-3, radius: float = 0.4) -> CheckOutcome:
    """The distance to {u ≤ 0} is not strongly quasiconvex on a ball around (1, 0)."""
    if not 0 < radius < 0.5:
        raise InvalidArgumentError(f"radius must lie in (0, 0.5) to stay in u > 1/2, got {radius}")
    f = DistanceTo(Halfspace([1.0, 0.0], 0.0), L2)
    region = BallRegion(np.array([1.0, 0.0]), radius)
    anchor = (np.array([1.0, -radius]), np.array([1.0, radius]))
    ok, estimate, cert, details = confirm_counterexample(f, region, anchor, sigma, cfg)
    literal = defect(f, [1.0, 0.0], [1.0, 1.0], 0.5, sigma)
    details["literal_defect"] = literal
    ok = ok and abs(literal - sigma / 8.0) <= EXACT
    return CheckOutcome(
        status_of(ok),
        sigma=estimate.sigma_hat,
        witness=cert.witness or estimate.witness,
        n_samples=cert.n_triples,
        details=details,
    )


def check_maxnorm_counterexample(cfg: SamplerConfig, sigma: float = 1e-3) -> CheckOutcome:
    """Distance to the ℓ∞ ball of radius 1/2, in ℓ∞: constant 3/2 along (2, 0)–(2, 1)."""
    f = DistanceTo(NormBall(NormSpec.linf(), np.zeros(2), 0.5), NormSpec.linf())
    x1, x2 = np.array([2.0, 0.0]), np.array([2.0, 1.0])
    values = [f(x1), f(x2), f(interpolate(x1, x2, 0.5))]
    ok, estimate, cert, details = confirm_counterexample(f, SegmentRegion(x1, x2), (x1, x2), sigma, cfg)
    midpoint_defect = defect(f, x1, x2, 0.5, sigma)
    details.update({"distances": values, "midpoint_defect": midpoint_defect})
    ok = ok and all(abs(v - 1.5) <= EXACT for v in values) and abs(midpoint_defect - sigma / 8.0) <= EXACT
    return CheckOutcome(
        status_of(ok),
        sigma=estimate.sigma_hat,
        witness=cert.witness or estimate.witness,
        n_samples=cert.n_triples,
        details=details,
    )


def check_l1_counterexample(cfg: SamplerConfig, sigma: float = 1e-3, epsilon: float = 0.1) -> CheckOutcome:
    """Distance to the ℓ1 unit ball, in ℓ1: constant 1 along (2, 0)–(2 − ε/2, ε/2)."""
    if not 0 < epsilon < 0.2:
        raise InvalidArgumentError(f"epsilon must lie in (0, 0.2), got {epsilon}")
    f = DistanceTo(NormBall(NormSpec.l1(), np.zeros(2), 1.0), NormSpec.l1())
    x1, x2 = np.array([2.0, 0.0]), np.array([2.0 - epsilon / 2.0, epsilon / 2.0])
    values = [f(x1), f(x2), f(interpolate(x1, x2, 0.5))]
    gap2 = float(norms(x1 - x2, L2) ** 2)
    ok, estimate, cert, details = confirm_counterexample(f, SegmentRegion(x1, x2), (x1, x2), sigma, cfg)
    small = certify(f, PairRegion(x1, x2), 1e-6, SamplerConfig(seed=cfg.seed, n_pairs=1), tol=0.0)
    details.update(
        {
            "distances": values,
            "gap2": gap2,
            "midpoint_defect": defect(f, x1, x2, 0.5, sigma),
            "refutes_sigma_1e-6": not small.passed,
        }
    )
    ok = (
        ok
        and all(abs(v - 1.0) <= EXACT for v in values)
        and abs(gap2 - epsilon**2 / 2.0) <= 1e-15
        and not small.passed
    )
    return CheckOutcome(
        status_of(ok),
        sigma=estimate.sigma_hat,
        witness=cert.witness or estimate.witness,
        n_samples=cert.n_triples,
        details=details,
    )


def check_lp_local(p: float, x0: npt.ArrayLike, R: float, cfg: SamplerConfig) -> CheckOutcome:
    """σ̂ > 0 for the ℓp distance to the ℓp ball of radius R near x0, p in (1, 2].

    p = 1 is the contrast case, where σ̂ must vanish.

    Raises:
        InvalidArgumentError: If x0 is inside the ball or p is outside [1, 2].
    """
    n = NormSpec.lp(p)
    if not 1.0 <= p <= 2.0:
        raise InvalidArgumentError(f"p must lie in [1, 2], got {p}")
    center = np.asarray(x0, dtype=np.float64)
    outside = norm(center, n)
    if outside <= R:
        raise InvalidArgumentError(f"x0 must lie outside the ball: ‖x0‖_{p:g} = {outside:.6g} <= R = {R}")
    epsilon = (outside - R) / 2.0
    f = DistanceTo(NormBall(n, np.zeros(center.size), R), n)
    region = BallRegion(center, epsilon, n)
    anchors = []
    if p == 1.0:
        # two points on one ℓ1 level line inside U
        h = epsilon / 4.0
        anchors.append((center + basis_vector(center.size, 1, h), center + basis_vector(center.size, 1, 2 * h) - basis_vector(center.size, 0, h)))
    estimate = sigma_hat(f, region, cfg, anchors=anchors)
    ok = estimate.sigma_hat <= ZERO_MODULUS if p == 1.0 else estimate.sigma_hat > 0
    return CheckOutcome(
        status_of(ok),
        sigma=estimate.sigma_hat,
        witness=None if ok else estimate.witness,
        n_samples=estimate.n_triples,
        details={"epsilon": epsilon, "sigma_hat": estimate.sigma_hat, "contrast": p == 1.0},
    )


def check_strongly_convex(R: float, r: float, a: float, dim: int, cfg: SamplerConfig, tol: float = 1e-9) -> CheckOutcome:
    """Run the strongly convex set pipeline on the Euclidean ball of radius R (a = 0) or a spindle.

    The spindle D_R((−a, 0, …), (a, 0, …)) projects whole cones onto its tips,
    so its projection bound is reported as a hypothesis failure and the
    certification falls back to the empirical modulus.
    """
    if a == 0:
        omega = NormBall(L2, np.zeros(dim), R)
    else:
        omega = Spindle(basis_vector(dim, 0, -a), basis_vector(dim, 0, a), R)
    run = run_strongly_convex_pipeline(omega, R, r, cfg, tol=tol)
    pipe = run.pipeline
    if run.hypothesis_failure:
        status = CheckStatus.HYPOTHESIS_FAILURE if run.passed else CheckStatus.FAIL
        sigma = run.certification.sigma
    else:
        status = status_of(run.passed)
        sigma = pipe.sigma
    witness = run.certification.witness
    if witness is None and run.vial_witness is not None:
        p1, p2, lam = run.vial_witness
        witness = witness_at(DistanceTo(omega, L2), p1, p2, lam, run.certification.sigma)
    return CheckOutcome(
        status,
        sigma=sigma,
        witness=witness,
        n_samples=run.certification.n_triples,
        details={
            "set": omega.kind,
            "delta": pipe.delta,
            "c0_hat": pipe.c0_hat,
            "c0_spread": run.c0_spread,
            "c": pipe.c,
            "theorem_sigma": pipe.sigma,
            "empirical_sigma_hat": run.empirical.sigma_hat,
            "certified_sigma": run.certification.sigma,
            "strongly_convex_probe": run.probe.strongly_convex,
            "vial_checked": run.vial_checked,
            "vial_failures": run.vial_failures,
        },
    )


def check_projection_collapse(R: float, x0: npt.ArrayLike, epsilon: float, r: float) -> CheckOutcome:
    """Collinear points beyond the ball share one projection, so no c₀ > 0 holds near x0.

    Raises:
        InvalidArgumentError: If ‖x0‖₂ <= R, or epsilon does not keep both points outside the ball.
    """
    center = np.asarray(x0, dtype=np.float64)
    length = norm(center, L2)
    if length <= R:
        raise InvalidArgumentError(f"x0 must lie outside the ball of radius {R}")
    if not 0 < epsilon < length - R:
        raise InvalidArgumentError(f"epsilon must lie in (0, {length - R:.6g}), got {epsilon}")
    if not r > R:
        raise InvalidArgumentError(f"r must exceed R, got r={r}")
    omega = NormBall(L2, np.zeros(center.size), R)
    u = center / length
    x1, x2 = center - epsilon * u, center + epsilon * u
    p1, p2 = project_euclidean(omega, x1), project_euclidean(omega, x2)
    collapse = float(norms(p1 - p2, L2)) / (2.0 * epsilon)
    collapsed = max(float(np.abs(p1 - R * u).max()), float(np.abs(p2 - R * u).max()))

    # contrast: two nearby points of the r-sphere
    turn = np.zeros(center.size)
    turn[:2] = [math.cos(0.3), math.sin(0.3)]
    on_sphere = (r * u, r * (u + turn) / norm(u + turn, L2))
    q1, q2 = project_euclidean(omega, on_sphere[0]), project_euclidean(omega, on_sphere[1])
    contrast = float(norms(q1 - q2, L2) / norms(on_sphere[0] - on_sphere[1], L2))
    collapse_ok = collapsed <= EXACT and collapse <= EXACT
    ok = collapse_ok and abs(contrast - R / r) <= EXACT
    witness: Witness | None = None
    if not ok:
        x, y = (x1, x2) if not collapse_ok else on_sphere
        witness = witness_at(DistanceTo(omega, L2), x, y, 0.5, 0.0)
    return CheckOutcome(
        status_of(ok),
        witness=witness,
        details={
            "projection_error": collapsed,
            "collapse_ratio": collapse,
            "contrast_ratio": contrast,
            "expected_contrast": R / r,
        },
    )


def check_norm_boundedness(p: float, dim: int, cfg: SamplerConfig, threshold: float = 1e-3) -> CheckOutcome:
    """Norms are strongly quasiconvex on bounded sets, and the modulus decays on growing ones.

    (a) for p in (1, 2], σ̂ of ‖·‖_p on [−1, 1]^dim exceeds threshold;
    (b) along x0 = e₂, v = e₁ the estimate stays under (4R + 16‖x0‖)/R² for
        R = 10, 100, 1000 and decays;
    (c) ‖·‖₁ on the level segment (1, 1)–(1.5, 0.5) has σ̂ ≈ 0.
    """
    if dim < 2:
        raise InvalidArgumentError(f"dim must be >= 2, got {dim}")
    n = NormSpec.lp(p)
    details: dict[str, Any] = {}
    ok = True
    witness: Witness | None = None
    n_samples = 0

    if 1.0 < p <= 2.0:
        box = sigma_hat(Norm(n), BoxRegion(-np.ones(dim), np.ones(dim)), cfg)
        details["box_sigma_hat"] = box.sigma_hat
        n_samples += box.n_triples
        if box.sigma_hat < threshold:
            ok, witness = False, box.witness

    decay = boundedness_probe(n, basis_vector(dim, 1), basis_vector(dim, 0), [10.0, 100.0, 1000.0], cfg)
    details["decay"] = [{"R": d.R, "sigma_hat": d.sigma_hat, "envelope": d.envelope} for d in decay]
    over = [d for d in decay if not d.under_envelope]
    decays = decay[-1].sigma_hat <= decay[0].sigma_hat + ZERO_MODULUS
    if 1.0 < p <= 2.0:
        decays = decays and decay[-1].sigma_hat < decay[0].sigma_hat / 10.0
    if over or not decays:
        ok = False
        witness = witness or (over[0] if over else decay[-1]).witness

    start, end = np.zeros(dim), np.zeros(dim)
    start[:2], end[:2] = [1.0, 1.0], [1.5, 0.5]
    flat = sigma_hat(Norm(NormSpec.l1()), SegmentRegion(start, end), cfg)
    details["l1_level_sigma_hat"] = flat.sigma_hat
    n_samples += flat.n_triples
    if flat.sigma_hat > ZERO_MODULUS:
        ok = False
        witness = witness or flat.witness
    return CheckOutcome(
        status_of(ok), sigma=details.get("box_sigma_hat"), witness=witness, n_samples=n_samples, details=details
    )


MIDPOINT_CASES: tuple[tuple[str, FunctionSpec, RegionSpec], ...] = (
    ("L2 on (1,0)-(0,1)", Norm(L2), SegmentRegion([1.0, 0.0], [0.0, 1.0])),
    ("L1.5 on [-1,1]^2", Norm(NormSpec.lp(1.5)), BoxRegion([-1.0, -1.0], [1.0, 1.0])),
    ("distance to unit L2 ball on (2,0)-(0,2)", DistanceTo(NormBall(L2, np.zeros(2), 1.0), L2), SegmentRegion([2.0, 0.0], [0.0, 2.0])),
)


def check_midpoint_conversion(cfg: SamplerConfig, tol: float = 1e-6) -> CheckOutcome:
    """σ̂ ≥ 8μ̂ − tol on shared samples for norms and a ball distance."""
    details: dict[str, Any] = {}
    ok = True
    witness: Witness | None = None
    n_samples = 0
    smallest: float | None = None
    for label, f, region in MIDPOINT_CASES:
        result = midpoint_conversion_check(f, region, cfg, tol)
        if not result.passed:
            ok = False
            witness = witness or result.sigma.witness
        n_samples += result.sigma.n_triples
        smallest = result.sigma.sigma_hat if smallest is None else min(smallest, result.sigma.sigma_hat)
        details[label] = {"sigma_hat": result.sigma.sigma_hat, "eight_mu_hat": 8.0 * result.midpoint.mu_hat}
    return CheckOutcome(status_of(ok), sigma=smallest, witness=witness, n_samples=n_samples, details=details)


def interpolation_witness(f_1d: FunctionSpec, check: InterpolationCheck, alpha: float) -> Witness:
    """The failing grid triple of an interpolation check, on [0, 1], at σ = 8α."""
    if check.status is InterpolationStatus.HYPOTHESIS_FAILURE:
        s, t = check.worst_at
        return witness_at(f_1d, [s], [t], 0.5, 8.0 * alpha)
    (lam,) = check.worst_at
    return witness_at(f_1d, [1.0], [0.0], lam, 8.0 * alpha)


def check_lemma_interpolation(cfg: SamplerConfig, grid: int = 64) -> CheckOutcome:
    """The λ-inequality follows from the midpoint modulus along a seeded segment.

    Uses ‖·‖₂ on a random segment (α from the grid) and ‖·‖₁ on a segment in
    the positive orthant (affine, α = 0).
    """
    rng = block_rng(cfg.seed, "lemma-segment", 0)
    start, end = rng.standard_normal(2), rng.standard_normal(2)
    curved = restrict_to_segment(Norm(L2), start, end)
    alpha = max(grid_midpoint_modulus(curved, grid), 0.0)
    curved_check = lambda_interpolation_check(curved, alpha, grid)
    affine = restrict_to_segment(Norm(NormSpec.l1()), [1.0, 2.0], [3.0, 0.5])
    affine_check = lambda_interpolation_check(affine, 0.0, grid)
    ok = curved_check.passed and affine_check.passed
    if curved_check.status is InterpolationStatus.HYPOTHESIS_FAILURE:
        status = CheckStatus.HYPOTHESIS_FAILURE
    else:
        status = status_of(ok)
    witness: Witness | None = None
    if not curved_check.passed:
        witness = interpolation_witness(curved, curved_check, alpha)
    elif not affine_check.passed:
        witness = interpolation_witness(affine, affine_check, 0.0)
    return CheckOutcome(
        status,
        sigma=8.0 * alpha,
        witness=witness,
        n_samples=2 * (grid + 1),
        details={
            "segment": [start.tolist(), end.tolist()],
            "alpha": alpha,
            "curved": curved_check.status.value,
            "curved_worst_gap": curved_check.worst_gap,
            "affine": affine_check.status.value,
            "affine_worst_gap": affine_check.worst_gap,
        },
    )
