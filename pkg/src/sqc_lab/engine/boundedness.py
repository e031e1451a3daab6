"""Decay of the modulus of t ↦ ‖x0 + t·v‖ on growing intervals [0, R]."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from sqc_lab.engine.estimators import Witness, sigma_hat
from sqc_lab.engine.functions import Norm, Restriction
from sqc_lab.engine.regions import SegmentRegion
from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.sampling import SamplerConfig
from sqc_lab.geometry.vectors import NormSpec, as_vector, check_same_dim, norm

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class DecayPoint:
    """σ̂ on [0, R] next to the analytic ceiling (4R + 16‖x0‖)/R²."""

    R: float
    sigma_hat: float
    envelope: float
    witness: Witness  # argmin triple, in the t coordinate

    @property
    def under_envelope(self) -> bool:
        return self.sigma_hat <= self.envelope + 1e-9


def decay_envelope(R: float, x0_norm: float) -> float:
    return (4.0 * R + 16.0 * x0_norm) / (R * R)


def boundedness_probe(
    n: NormSpec,
    x0: npt.ArrayLike,
    v: npt.ArrayLike,
    R_list: Sequence[float],
    cfg: SamplerConfig,
) -> list[DecayPoint]:
    """Estimate σ̂ of φ(t) = ‖x0 + t·v‖_n on [0, R] for each R.

    The pair (0, R) is always in the sample set; at λ = ½ its ratio is at most
    the envelope, so every σ̂(R) is too.

    Raises:
        InvalidArgumentError: If v = 0, ‖v‖_n ≠ 1, or R_list is not increasing and positive.
    """
    x0v, vv = as_vector(x0, "x0"), as_vector(v, "v")
    check_same_dim(x0v, vv)
    if not np.any(vv != 0):
        raise InvalidArgumentError("Direction v must be nonzero")
    if abs(norm(vv, n) - 1.0) > UNIT_TOL:
        raise InvalidArgumentError(f"Direction v must have unit {n.label} norm, got {norm(vv, n)}")
    radii = [float(R) for R in R_list]
    if not radii or radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise InvalidArgumentError(f"R_list must be increasing positive reals, got {radii}")

    phi = Restriction(f=Norm(n), origin=x0v, direction=vv)
    x0_norm = norm(x0v, n)
    points = []
    for R in radii:
        estimate = sigma_hat(phi, SegmentRegion([0.0], [R]), cfg, anchors=[(np.array([0.0]), np.array([R]))])
        point = DecayPoint(
            R=R, sigma_hat=estimate.sigma_hat, envelope=decay_envelope(R, x0_norm), witness=estimate.witness
        )
        logger.debug(f"R={R:g}: sigma_hat={point.sigma_hat:.6g}, envelope={point.envelope:.6g}")
        points.append(point)
    return points
