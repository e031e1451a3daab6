"""Defects, modulus estimates and certification of strong quasiconvexity.

A triple (x, y, λ) with x_λ = λx + (1 − λ)y has

    defect(σ) = f(x_λ) − max{f(x), f(y)} + (σ/2)·λ(1 − λ)‖x − y‖₂²
    ratio     = 2(max{f(x), f(y)} − f(x_λ)) / (λ(1 − λ)‖x − y‖₂²)

and f is σ-strongly quasiconvex on a region iff no defect(σ) is positive,
i.e. iff σ is at most every ratio. Estimates are minima over a recorded,
seed-replayable sample set.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from sqc_lab.engine.functions import FunctionSpec
from sqc_lab.engine.regions import RegionSpec
from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.sampling import SamplerConfig, block_rng, map_blocks
from sqc_lab.geometry.vectors import L2, Vector, as_vector, check_same_dim, interpolate_rows, norms

logger = logging.getLogger(__name__)

EXCLUSION_BAND = 1e-14
RATIO_CLAMP = 1e12
ROUNDING = 4.0 * np.finfo(np.float64).eps

REFINE_PAIRS = 8
REFINE_STEPS = 60
COLLAPSE_FRACTION = 1e-3

Pair = tuple[Vector, Vector]


@dataclass(frozen=True)
class Witness:
    """A triple (x, y, λ) with its function values and defect at sigma."""

    x: Vector
    y: Vector
    lam: float
    defect: float
    f_values: tuple[float, float, float]  # f(x), f(y), f(x_λ)
    sigma: float

    @property
    def gap2(self) -> float:
        return float(norms(self.x - self.y, L2) ** 2)

    @property
    def ratio(self) -> float:
        f_x, f_y, f_mid = self.f_values
        denom = self.lam * (1.0 - self.lam) * self.gap2
        if denom == 0.0:
            return math.inf
        return 2.0 * (max(f_x, f_y) - f_mid) / denom

    def recompute_defect(self) -> float:
        f_x, f_y, f_mid = self.f_values
        return f_mid - max(f_x, f_y) + 0.5 * self.sigma * self.lam * (1.0 - self.lam) * self.gap2

    def to_json(self) -> dict[str, Any]:
        return {
            "x": self.x.tolist(),
            "y": self.y.tolist(),
            "lambda": self.lam,
            "defect": self.defect,
            "f_values": list(self.f_values),
            "sigma": self.sigma,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Witness":
        return cls(
            x=as_vector(data["x"], "x"),
            y=as_vector(data["y"], "y"),
            lam=float(data["lambda"]),
            defect=float(data["defect"]),
            f_values=tuple(float(v) for v in data["f_values"]),  # type: ignore[arg-type]
            sigma=float(data["sigma"]),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Witness):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and (self.lam, self.defect, self.f_values, self.sigma)
            == (other.lam, other.defect, other.f_values, other.sigma)
        )


@dataclass(frozen=True)
class SampleSet:
    """Pairs, the λ grid and every function value of a sweep."""

    xs: npt.NDArray[np.float64]
    ys: npt.NDArray[np.float64]
    lams: npt.NDArray[np.float64]
    f_x: npt.NDArray[np.float64]
    f_y: npt.NDArray[np.float64]
    f_mid: npt.NDArray[np.float64]  # (pairs, λ)

    @property
    def n_pairs(self) -> int:
        return self.xs.shape[0]

    @staticmethod
    def join(parts: Sequence["SampleSet"]) -> "SampleSet":
        return SampleSet(
            xs=np.concatenate([p.xs for p in parts]),
            ys=np.concatenate([p.ys for p in parts]),
            lams=parts[0].lams,
            f_x=np.concatenate([p.f_x for p in parts]),
            f_y=np.concatenate([p.f_y for p in parts]),
            f_mid=np.concatenate([p.f_mid for p in parts]),
        )

    def upper(self) -> npt.NDArray[np.float64]:
        return np.maximum(self.f_x, self.f_y)[:, None]

    def denominators(self) -> npt.NDArray[np.float64]:
        gap2 = norms(self.xs - self.ys, L2) ** 2
        return (self.lams * (1.0 - self.lams))[None, :] * gap2[:, None]

    def valid(self) -> npt.NDArray[np.bool_]:
        """Triples outside the exclusion band λ(1 − λ)‖x − y‖₂² < EXCLUSION_BAND."""
        return self.denominators() >= EXCLUSION_BAND

    def raw_ratios(self) -> npt.NDArray[np.float64]:
        """Unclamped ratios; +inf on excluded triples."""
        valid = self.valid()
        denom = np.where(valid, self.denominators(), 1.0)
        ratios = 2.0 * (self.upper() - self.f_mid) / denom
        return np.where(valid, ratios, np.inf)

    def defects(self, sigma: float) -> npt.NDArray[np.float64]:
        """Defects at sigma; −inf on excluded triples."""
        values = self.f_mid - self.upper() + 0.5 * sigma * self.denominators()
        return np.where(self.valid(), values, -np.inf)

    def witness(self, i: int, j: int, sigma: float) -> Witness:
        lam = float(self.lams[j])
        f_values = (float(self.f_x[i]), float(self.f_y[i]), float(self.f_mid[i, j]))
        gap2 = float(norms(self.xs[i] - self.ys[i], L2) ** 2)
        value = f_values[2] - max(f_values[0], f_values[1]) + 0.5 * sigma * lam * (1.0 - lam) * gap2
        return Witness(x=self.xs[i].copy(), y=self.ys[i].copy(), lam=lam, defect=value, f_values=f_values, sigma=sigma)


@dataclass(frozen=True)
class SqcEstimate:
    """Smallest ratio over a sample set: an upper estimate of the best modulus."""

    sigma_hat: float
    witness: Witness
    n_triples: int
    seed: int
    clamped: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "sigma_hat": self.sigma_hat,
            "witness": self.witness.to_json(),
            "n_triples": self.n_triples,
            "seed": self.seed,
            "clamped": self.clamped,
        }


@dataclass(frozen=True)
class MidpointEstimate:
    """Smallest midpoint ratio ((f(x) + f(y))/2 − f(m))/‖x − y‖₂² over a sample set."""

    mu_hat: float
    witness: Pair
    n_pairs: int


@dataclass(frozen=True)
class Certification:
    """Outcome of certify: every recorded defect at sigma is at most tol, or the worst witness."""

    passed: bool
    sigma: float
    max_defect: float
    n_triples: int
    seed: int
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class ConversionCheck:
    """σ̂ against 8μ̂ on one shared sample set."""

    passed: bool
    sigma: SqcEstimate
    midpoint: MidpointEstimate

    def __bool__(self) -> bool:
        return self.passed


def check_lambda(lam: float) -> None:
    if not 0.0 < lam < 1.0:
        raise InvalidArgumentError(f"lambda must lie in (0, 1), got {lam}")


def evaluate_pairs(
    f: FunctionSpec, xs: npt.NDArray[np.float64], ys: npt.NDArray[np.float64], lams: npt.NDArray[np.float64]
) -> SampleSet:
    """Evaluate f at both endpoints and at every λ point of each pair."""
    m, dim = xs.shape
    mids = interpolate_rows(xs[:, None, :], ys[:, None, :], lams[None, :])
    f_mid = f.evaluate(mids.reshape(-1, dim)).reshape(m, lams.size)
    return SampleSet(xs=xs, ys=ys, lams=lams, f_x=f.evaluate(xs), f_y=f.evaluate(ys), f_mid=f_mid)


def witness_at(f: FunctionSpec, x: npt.ArrayLike, y: npt.ArrayLike, lam: float, sigma: float) -> Witness:
    """The triple (x, y, λ) evaluated under f at sigma.

    Raises:
        InvalidArgumentError: If λ is outside (0, 1), sigma < 0 or dimensions differ.
    """
    check_lambda(lam)
    if sigma < 0:
        raise InvalidArgumentError(f"sigma must be nonnegative, got {sigma}")
    xv, yv = as_vector(x, "x"), as_vector(y, "y")
    check_same_dim(xv, yv)
    samples = evaluate_pairs(f, xv[None, :], yv[None, :], np.array([lam]))
    return samples.witness(0, 0, sigma)


def defect(f: FunctionSpec, x: npt.ArrayLike, y: npt.ArrayLike, lam: float, sigma: float) -> float:
    """f(λx + (1−λ)y) − max{f(x), f(y)} + (σ/2)λ(1−λ)‖x − y‖₂².

    Raises:
        InvalidArgumentError: If λ is outside (0, 1), sigma < 0 or dimensions differ.
    """
    return witness_at(f, x, y, lam, sigma).defect


def finite_difference_gradient(f: FunctionSpec, p: Vector) -> Vector:
    step = 1e-6 * max(1.0, float(np.abs(p).max()))
    basis = step * np.eye(p.size)
    values = f.evaluate(np.concatenate((p + basis, p - basis)))
    return (values[: p.size] - values[p.size :]) / (2.0 * step)


def match_levels(f: FunctionSpec, region: RegionSpec, x: Vector, y: Vector) -> Pair | None:
    """Move the higher endpoint onto the level set of the lower one.

    Newton steps along the finite-difference gradient, each retracted into the
    region. Returns None if the pair collapses.
    """
    separation = float(norms(x - y, L2))
    x, y = x.copy(), y.copy()
    f_x, f_y = f(x), f(y)
    for _ in range(REFINE_STEPS):
        gap = abs(f_x - f_y)
        if gap <= ROUNDING * max(1.0, abs(f_x), abs(f_y)):
            break
        high = x if f_x > f_y else y
        grad = finite_difference_gradient(f, high)
        g2 = float(grad @ grad)
        if not np.isfinite(g2) or g2 == 0.0:
            break
        moved = region.retract((high - (gap / g2) * grad)[None, :])[0]
        if f_x > f_y:
            x, f_x = moved, f(moved)
        else:
            y, f_y = moved, f(moved)
        if float(norms(x - y, L2)) < COLLAPSE_FRACTION * separation:
            return None
    return x, y


def refine_level_pairs(
    f: FunctionSpec, region: RegionSpec, samples: SampleSet
) -> SampleSet | None:
    """Level-matched copies of the REFINE_PAIRS pairs with the smallest ratios."""
    per_pair = samples.raw_ratios().min(axis=1)
    order = [i for i in np.argsort(per_pair, kind="stable")[:REFINE_PAIRS] if np.isfinite(per_pair[i])]
    refined = [match_levels(f, region, samples.xs[i], samples.ys[i]) for i in order]
    kept = [pair for pair in refined if pair is not None]
    logger.debug(f"Level matching kept {len(kept)} of {len(order)} pairs")
    if not kept:
        return None
    xs = np.stack([pair[0] for pair in kept])
    ys = np.stack([pair[1] for pair in kept])
    return evaluate_pairs(f, xs, ys, samples.lams)


def sweep(
    f: FunctionSpec,
    region: RegionSpec,
    cfg: SamplerConfig,
    anchors: Sequence[Pair] = (),
    refine: bool = True,
) -> SampleSet:
    """Build the recorded sample set: anchor pairs, seeded pairs, then refined pairs.

    Raises:
        InvalidArgumentError: If f and region dimensions differ.
    """
    if f.dim is not None and f.dim != region.dim:
        raise InvalidArgumentError(f"Dimension mismatch: function needs {f.dim}, region has {region.dim}")
    lams = cfg.lambdas()

    def sweep_block(block: int, start: int, stop: int) -> SampleSet:
        xs, ys = region.sample_pairs(block_rng(cfg.seed, "pairs", block), stop - start)
        return evaluate_pairs(f, xs, ys, lams)

    parts = map_blocks(sweep_block, region.pair_count(cfg.n_pairs))
    if anchors:
        ax = np.stack([as_vector(x, "anchor x") for x, _ in anchors])
        ay = np.stack([as_vector(y, "anchor y") for _, y in anchors])
        parts.insert(0, evaluate_pairs(f, ax, ay, lams))
    samples = SampleSet.join(parts)
    if refine and region.refinable:
        refined = refine_level_pairs(f, region, samples)
        if refined is not None:
            samples = SampleSet.join([samples, refined])
    logger.debug(f"Sweep of {region.kind}: {samples.n_pairs} pairs x {lams.size} lambdas")
    return samples


def estimate_sigma(samples: SampleSet, seed: int) -> SqcEstimate:
    """SqcEstimate at the smallest ratio of a sample set; the first index wins ties.

    Raises:
        InvalidArgumentError: If no triple survives the exclusion band.
    """
    raw = samples.raw_ratios()
    valid = np.isfinite(raw)
    n_triples = int(valid.sum())
    if n_triples == 0:
        raise InvalidArgumentError("Region is degenerate: no pair of distinct points")
    i, j = np.unravel_index(int(np.argmin(raw)), raw.shape)
    value = float(raw[i, j])
    clamped = abs(value) > RATIO_CLAMP
    sigma_hat = float(np.clip(value, -RATIO_CLAMP, RATIO_CLAMP))
    return SqcEstimate(
        sigma_hat=sigma_hat,
        witness=samples.witness(int(i), int(j), sigma_hat),
        n_triples=n_triples,
        seed=seed,
        clamped=clamped,
    )


def estimate_mu(samples: SampleSet) -> MidpointEstimate:
    """MidpointEstimate from the λ = 0.5 column of a sample set."""
    j = int(np.flatnonzero(samples.lams == 0.5)[0])
    valid = samples.valid()[:, j]
    if not np.any(valid):
        raise InvalidArgumentError("Region is degenerate: no pair of distinct points")
    gap2 = norms(samples.xs - samples.ys, L2) ** 2
    ratios = ((samples.f_x + samples.f_y) / 2.0 - samples.f_mid[:, j]) / np.where(valid, gap2, 1.0)
    ratios = np.where(valid, ratios, np.inf)
    i = int(np.argmin(ratios))
    return MidpointEstimate(
        mu_hat=float(ratios[i]),
        witness=(samples.xs[i].copy(), samples.ys[i].copy()),
        n_pairs=int(valid.sum()),
    )


def sigma_hat(
    f: FunctionSpec, region: RegionSpec, cfg: SamplerConfig, anchors: Sequence[Pair] = ()
) -> SqcEstimate:
    """Smallest ratio 2(max{f(x), f(y)} − f(x_λ))/(λ(1−λ)‖x − y‖₂²) over the sample set.

    Negative values flag a failure of quasiconvexity itself.

    Raises:
        InvalidArgumentError: If the region holds no two distinct points.
    """
    estimate = estimate_sigma(sweep(f, region, cfg, anchors), cfg.seed)
    logger.debug(f"sigma_hat on {region.kind} = {estimate.sigma_hat:.6g} over {estimate.n_triples} triples")
    return estimate


def mu_hat(
    f: FunctionSpec, region: RegionSpec, cfg: SamplerConfig, anchors: Sequence[Pair] = ()
) -> MidpointEstimate:
    """Smallest midpoint ratio over the sample set."""
    return estimate_mu(sweep(f, region, cfg, anchors))


def midpoint_conversion_check(
    f: FunctionSpec,
    region: RegionSpec,
    cfg: SamplerConfig,
    tol: float = 1e-6,
    anchors: Sequence[Pair] = (),
) -> ConversionCheck:
    """Check σ̂ ≥ 8μ̂ − tol with both estimates taken on one sample set.

    Raises:
        InvalidArgumentError: If the region is not convex.
    """
    if not region.convex:
        raise InvalidArgumentError(f"{region.kind} is not a convex region")
    samples = sweep(f, region, cfg, anchors)
    sigma = estimate_sigma(samples, cfg.seed)
    midpoint = estimate_mu(samples)
    passed = sigma.sigma_hat >= 8.0 * midpoint.mu_hat - tol
    logger.debug(f"sigma_hat={sigma.sigma_hat:.6g} vs 8*mu_hat={8.0 * midpoint.mu_hat:.6g}: {passed}")
    return ConversionCheck(passed=passed, sigma=sigma, midpoint=midpoint)


def certify_samples(samples: SampleSet, sigma: float, seed: int, tol: float) -> Certification:
    defects = samples.defects(sigma)
    valid = np.isfinite(defects)
    if not np.any(valid):
        raise InvalidArgumentError("Region is degenerate: no pair of distinct points")
    i, j = np.unravel_index(int(np.argmax(defects)), defects.shape)
    worst = float(defects[i, j])
    passed = worst <= tol
    return Certification(
        passed=passed,
        sigma=sigma,
        max_defect=worst,
        n_triples=int(valid.sum()),
        seed=seed,
        witness=None if passed else samples.witness(int(i), int(j), sigma),
    )


def certify(
    f: FunctionSpec,
    region: RegionSpec,
    sigma: float,
    cfg: SamplerConfig,
    tol: float = 1e-9,
    anchors: Sequence[Pair] = (),
) -> Certification:
    """Pass iff every recorded defect at sigma is at most tol; otherwise return the worst witness.

    Raises:
        InvalidArgumentError: If sigma < 0.
    """
    if sigma < 0:
        raise InvalidArgumentError(f"sigma must be nonnegative, got {sigma}")
    result = certify_samples(sweep(f, region, cfg, anchors), sigma, cfg.seed, tol)
    logger.debug(f"certify sigma={sigma:.6g} on {region.kind}: max defect {result.max_defect:.3e}")
    return result
