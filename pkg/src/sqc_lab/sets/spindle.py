"""Spindles D_R(x, y): the intersection of all radius-R balls containing x and y.

Everything reduces to the plane spanned by the axis u = (y − x)/‖y − x‖ and the
part of z − m orthogonal to it, m the midpoint. In coordinates (s, h) of that
plane, with a = ‖y − x‖/2 and ρ = √(R² − a²):

  - admissible centers form a lens with vertices (0, ±ρ), bounded by an arc of
    the circle of radius R around x and an arc of the circle around y;
  - the spindle section is the intersection of the disks of radius R around
    the two lens vertices.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize_scalar

from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.vectors import L2, Vector, as_vector, check_same_dim, norms
from sqc_lab.sets.specs import DEFAULT_TOL, ConvexSet, Points, as_points

logger = logging.getLogger(__name__)

ARC_NODES = 2000
SPAN_SLACK = 1e-12


def check_span(x: Vector, y: Vector, R: float) -> float:
    """Return a = ‖x − y‖₂/2 after checking that some radius-R ball holds both points.

    Raises:
        InvalidArgumentError: If R <= 0 or ‖x − y‖₂ > 2R.
    """
    if not (math.isfinite(R) and R > 0):
        raise InvalidArgumentError(f"R must be positive, got {R}")
    span = float(norms(x - y, L2))
    if span > 2.0 * R * (1.0 + SPAN_SLACK):
        raise InvalidArgumentError(f"‖x − y‖₂ = {span:.6g} exceeds 2R = {2.0 * R:.6g}")
    return min(span / 2.0, R)


def axis_of(x: Vector, y: Vector) -> Vector:
    d = y - x
    length = float(norms(d, L2))
    if length == 0.0:
        u = np.zeros_like(d)
        u[0] = 1.0
        return u
    return d / length


def plane_coords(
    points: Points, midpoint: Vector, axis: Vector
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], Points]:
    """Axial coordinate s, radial distance h ≥ 0 and unit radial direction of every row."""
    offset = points - midpoint
    s = offset @ axis
    radial = offset - s[:, None] * axis
    h = norms(radial, L2)
    direction = np.zeros_like(radial)
    nonzero = h > 0
    direction[nonzero] = radial[nonzero] / h[nonzero, None]
    return s, h, direction


def lens_center_max(
    s: npt.ArrayLike, h: npt.ArrayLike, a: float, R: float
) -> npt.NDArray[np.float64]:
    """max ‖z − c‖₂ over admissible centers c, for z at plane coordinates (s, h ≥ 0).

    On each boundary circle the farthest point is antipodal to z; when it falls
    outside the arc the maximum over that arc sits at a lens vertex.
    """
    s = np.asarray(s, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    rho = math.sqrt(max(R * R - a * a, 0.0))
    cos_limit = a / R
    result = np.sqrt(s * s + (h + rho) ** 2)
    for center_s, sign in ((-a, -1.0), (a, 1.0)):
        d = np.sqrt((s - center_s) ** 2 + h * h)
        # cosine of the antipodal direction measured from the circle's own axis
        cos_far = np.ones_like(d)
        moved = d > 0
        cos_far[moved] = sign * (s[moved] - center_s) / d[moved]
        on_arc = cos_far >= cos_limit
        result = np.where(on_arc, np.maximum(result, d + R), result)
    return result


def arc_distances(phi: npt.ArrayLike, s: float, h: float, a: float, R: float) -> npt.NDArray[np.float64]:
    """Distances from (s, h) to both arcs at angle φ; rows are (arc around x, arc around y)."""
    phi = np.asarray(phi, dtype=np.float64)
    q = R * np.sin(phi)
    p_x = -a + R * np.cos(phi)
    p_y = a - R * np.cos(phi)
    return np.stack((np.hypot(s - p_x, h - q), np.hypot(s - p_y, h - q)))


def spindle_member(
    x: npt.ArrayLike,
    y: npt.ArrayLike,
    R: float,
    z: npt.ArrayLike,
    tol: float = DEFAULT_TOL,
    nodes: int = ARC_NODES,
) -> bool:
    """Return True iff max{‖z − c‖₂ : ‖c − x‖₂ ≤ R, ‖c − y‖₂ ≤ R} ≤ R + tol.

    Scans both boundary arcs of the admissible-center lens at `nodes` angles,
    then refines around the best node with a bounded scalar search.

    Raises:
        InvalidArgumentError: On dimension mismatch or ‖x − y‖₂ > 2R.
    """
    xv, yv, zv = as_vector(x, "x"), as_vector(y, "y"), as_vector(z, "z")
    check_same_dim(xv, yv, zv)
    a = check_span(xv, yv, R)
    s_arr, h_arr, _ = plane_coords(zv[None, :], (xv + yv) / 2.0, axis_of(xv, yv))
    s, h = float(s_arr[0]), float(h_arr[0])

    phi0 = math.acos(a / R)
    phi = np.linspace(-phi0, phi0, nodes)
    dists = arc_distances(phi, s, h, a, R)
    best = float(dists.max())
    if phi0 > 0:
        for arc in range(2):
            i = int(np.argmax(dists[arc]))
            lo, hi = phi[max(i - 1, 0)], phi[min(i + 1, nodes - 1)]
            found = minimize_scalar(
                lambda t: -float(arc_distances(t, s, h, a, R)[arc]),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": 1e-14},
            )
            best = max(best, -float(found.fun))
    return best <= R + tol


def project_section(
    s: npt.NDArray[np.float64], h: npt.NDArray[np.float64], a: float, rho: float, R: float
) -> Points:
    """Euclidean projection of plane points (s, h ≥ 0) onto the two-disk section.

    Outside the section, the disk around (0, −ρ) is the binding one. Its radial
    projection is the answer when it lands on the upper arc (h ≥ 0); otherwise
    the nearer tip (±a, 0) is.
    """
    offset_h = h + rho
    length = np.hypot(s, offset_h)
    outside = length > R
    scale = np.where(outside, R / np.where(length > 0, length, 1.0), 1.0)
    ps, ph = s * scale, offset_h * scale - rho
    past_tip = outside & (ph < 0)
    ps = np.where(past_tip, np.copysign(a, s), ps)
    ph = np.where(past_tip, 0.0, ph)
    return np.column_stack((np.where(outside, ps, s), np.where(outside, ph, h)))


@dataclass(frozen=True, eq=False)
class Spindle(ConvexSet):
    """D_R(x, y), the intersection of all radius-R balls containing x and y."""

    x: Vector
    y: Vector
    R: float
    half_length: float = field(init=False, repr=False)
    rho: float = field(init=False, repr=False)
    midpoint: Vector = field(init=False, repr=False)
    axis: Vector = field(init=False, repr=False)

    kind: ClassVar[str] = "Spindle"

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", as_vector(self.x, "x"))
        object.__setattr__(self, "y", as_vector(self.y, "y"))
        check_same_dim(self.x, self.y)
        a = check_span(self.x, self.y, self.R)
        object.__setattr__(self, "half_length", a)
        object.__setattr__(self, "rho", math.sqrt(max(self.R * self.R - a * a, 0.0)))
        object.__setattr__(self, "midpoint", (self.x + self.y) / 2.0)
        object.__setattr__(self, "axis", axis_of(self.x, self.y))

    @property
    def dim(self) -> int:
        return self.x.size

    @property
    def height(self) -> float:
        """Half-width of the spindle across its axis, R − √(R² − a²)."""
        return self.R - self.rho

    def contains_many(self, points: npt.ArrayLike, tol: float = DEFAULT_TOL) -> npt.NDArray[np.bool_]:
        pts = as_points(points, self.dim)
        s, h, _ = plane_coords(pts, self.midpoint, self.axis)
        return lens_center_max(s, h, self.half_length, self.R) <= self.R + tol

    def project_many(self, points: npt.ArrayLike) -> Points:
        pts = as_points(points, self.dim)
        s, h, direction = plane_coords(pts, self.midpoint, self.axis)
        planar = project_section(s, h, self.half_length, self.rho, self.R)
        return self.midpoint + planar[:, :1] * self.axis + planar[:, 1:] * direction

    def bounding_ball(self) -> tuple[Vector, float]:
        return self.midpoint, self.half_length

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "x": self.x.tolist(), "y": self.y.tolist(), "R": self.R}


def spindle_boundary_points(
    xs: Points,
    ys: Points,
    R: float,
    rng: np.random.Generator,
    n_directions: int = 2,
    n_angles: int = 16,
) -> Points:
    """Boundary points of D_R(xs[i], ys[i]) for a batch of pairs, shape (m, k, dim).

    Each pair gets n_directions random radial directions orthogonal to its axis
    plus their negatives; along each, n_angles points of the bounding arc from
    tip to tip. Every pair must satisfy ‖x − y‖₂ ≤ 2R.
    """
    m, dim = xs.shape
    d = ys - xs
    lengths = norms(d, L2)
    axes = np.zeros_like(d)
    axes[:, 0] = 1.0
    nonzero = lengths > 0
    axes[nonzero] = d[nonzero] / lengths[nonzero, None]
    a = np.minimum(lengths / 2.0, R)
    rho = np.sqrt(np.maximum(R * R - a * a, 0.0))
    midpoints = (xs + ys) / 2.0

    radial = rng.standard_normal((m, n_directions, dim))
    radial -= np.einsum("mkd,md->mk", radial, axes)[:, :, None] * axes[:, None, :]
    radial_len = norms(radial, L2)
    radial = np.where(radial_len[..., None] > 0, radial / np.where(radial_len > 0, radial_len, 1.0)[..., None], 0.0)
    radial = np.concatenate((radial, -radial), axis=1)

    t = np.linspace(-1.0, 1.0, n_angles)
    psi = np.arcsin(a / R)[:, None] * t[None, :]
    along = R * np.sin(psi)
    across = R * np.cos(psi) - rho[:, None]
    points = (
        midpoints[:, None, None, :]
        + along[:, None, :, None] * axes[:, None, None, :]
        + across[:, None, :, None] * radial[:, :, None, :]
    )
    return points.reshape(m, -1, dim)
