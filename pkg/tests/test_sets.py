"""Tests for convex sets, projections, distances and set probes."""

import math

import numpy as np
import pytest

from sqc_lab.errors import InvalidArgumentError, NumericFailureError, UnsupportedCombinationError
from sqc_lab.geometry.sampling import SamplerConfig, block_rng
from sqc_lab.geometry.vectors import L2, NormSpec, norm
from sqc_lab.sets.dykstra import dykstra_balls
from sqc_lab.sets.probes import strong_convexity_probe, vial_inclusion_check, vial_radius
from sqc_lab.sets.rays import RayProbeResult, recession_ray_probe
from sqc_lab.sets.specs import (
    BallIntersection,
    Box,
    EuclideanBall,
    Halfspace,
    NormBall,
    Segment,
    distance,
    member,
    project_euclidean,
    supports_distance,
)

LENS = BallIntersection(
    (EuclideanBall(np.array([-0.5, 0.0]), 1.0), EuclideanBall(np.array([0.5, 0.0]), 1.0)),
    np.array([0.0, 0.0]),
)

BOUNDED_SETS = [
    NormBall(NormSpec.l2(), np.array([0.5, -0.5]), 1.5),
    NormBall(NormSpec.l1(), np.array([0.0, 0.0]), 1.0),
    NormBall(NormSpec.linf(), np.array([1.0, 1.0]), 0.5),
    Segment(np.array([0.0, 0.0]), np.array([2.0, 1.0])),
    Box(np.array([-1.0, 0.0]), np.array([1.0, 3.0])),
    LENS,
]


class TestNormBall:
    """Tests for NormBall membership, projection and distance."""

    def test_contains(self):
        ball = NormBall(NormSpec.l1(), np.array([0.0, 0.0]), 1.0)
        assert ball.contains([0.5, 0.5])
        assert not ball.contains([0.6, 0.6])

    def test_euclidean_projection_is_radial(self):
        ball = NormBall(L2, np.array([1.0, 0.0]), 2.0)
        np.testing.assert_allclose(project_euclidean(ball, [1.0, 4.0]), [1.0, 2.0])

    def test_l1_projection(self):
        ball = NormBall(NormSpec.l1(), np.array([0.0, 0.0]), 1.0)
        np.testing.assert_allclose(project_euclidean(ball, [2.0, 0.0]), [1.0, 0.0])
        np.testing.assert_allclose(project_euclidean(ball, [1.5, 0.5]), [1.0, 0.0])
        np.testing.assert_allclose(project_euclidean(ball, [1.0, 1.0]), [0.5, 0.5])

    def test_linf_projection_clips(self):
        ball = NormBall(NormSpec.linf(), np.array([0.0, 0.0]), 1.0)
        np.testing.assert_allclose(project_euclidean(ball, [3.0, -0.2]), [1.0, -0.2])

    def test_lp_projection_unsupported(self):
        ball = NormBall(NormSpec.lp(3.0), np.array([0.0, 0.0]), 1.0)
        assert not ball.supports_projection
        with pytest.raises(UnsupportedCombinationError):
            project_euclidean(ball, [2.0, 0.0])

    def test_own_norm_distance(self):
        ball = NormBall(NormSpec.l1(), np.array([0.0, 0.0]), 1.0)
        assert distance(ball, [2.0, 1.0], NormSpec.l1()) == 2.0
        assert distance(ball, [0.2, 0.1], NormSpec.l1()) == 0.0

    def test_lp_ball_in_own_norm(self):
        ball = NormBall(NormSpec.lp(3.0), np.array([0.0, 0.0]), 1.0)
        assert supports_distance(ball, NormSpec.lp(3.0))
        assert distance(ball, [2.0, 0.0], NormSpec.lp(3.0)) == pytest.approx(1.0)

    def test_euclidean_distance_via_projection(self):
        ball = NormBall(L2, np.array([0.0, 0.0]), 1.0)
        assert distance(ball, [3.0, 4.0], L2) == pytest.approx(4.0)

    def test_unsupported_pairs(self):
        with pytest.raises(UnsupportedCombinationError):
            distance(NormBall(NormSpec.lp(3.0), np.array([0.0, 0.0]), 1.0), [2.0, 0.0], L2)
        with pytest.raises(UnsupportedCombinationError):
            distance(Halfspace(np.array([1.0, 0.0]), 0.0), [2.0, 0.0], NormSpec.l1())

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(InvalidArgumentError):
            NormBall(L2, np.array([0.0]), 0.0)

    def test_to_json(self):
        ball = NormBall(NormSpec.linf(), np.array([1.0, 2.0]), 0.5)
        assert ball.to_json() == {"kind": "NormBall", "norm": {"p": "inf"}, "center": [1.0, 2.0], "radius": 0.5}


class TestOtherSets:
    """Tests for halfspaces, segments, boxes and ball intersections."""

    def test_halfspace_projection(self):
        h = Halfspace(np.array([1.0, 0.0]), 0.0)
        np.testing.assert_allclose(project_euclidean(h, [2.0, 3.0]), [0.0, 3.0])
        np.testing.assert_allclose(project_euclidean(h, [-2.0, 3.0]), [-2.0, 3.0])
        assert not h.bounded

    def test_halfspace_rejects_zero_normal(self):
        with pytest.raises(InvalidArgumentError):
            Halfspace(np.array([0.0, 0.0]), 1.0)

    def test_segment_projection(self):
        seg = Segment(np.array([0.0, 0.0]), np.array([2.0, 0.0]))
        np.testing.assert_allclose(project_euclidean(seg, [1.0, 1.0]), [1.0, 0.0])
        np.testing.assert_allclose(project_euclidean(seg, [3.0, 1.0]), [2.0, 0.0])
        assert distance(seg, [3.0, 1.0], L2) == pytest.approx(math.sqrt(2.0))

    def test_box(self):
        box = Box(np.array([0.0, 0.0]), np.array([1.0, 2.0]))
        assert box.contains([1.0, 2.0])
        assert not box.contains([1.1, 2.0])
        np.testing.assert_allclose(project_euclidean(box, [3.0, -1.0]), [1.0, 0.0])

    def test_box_rejects_inverted_bounds(self):
        with pytest.raises(InvalidArgumentError):
            Box(np.array([1.0, 0.0]), np.array([0.0, 1.0]))

    def test_lens_projection_hits_vertex(self):
        np.testing.assert_allclose(project_euclidean(LENS, [0.0, 2.0]), [0.0, math.sqrt(0.75)], atol=1e-8)

    def test_lens_projection_on_single_arc(self):
        p = project_euclidean(LENS, [-1.0, 0.0])
        np.testing.assert_allclose(p, [-0.5, 0.0], atol=1e-8)

    def test_intersection_rejects_outside_interior_point(self):
        with pytest.raises(InvalidArgumentError):
            BallIntersection((EuclideanBall(np.array([0.0, 0.0]), 1.0),), np.array([2.0, 0.0]))

    def test_dykstra_iteration_cap(self):
        with pytest.raises(NumericFailureError):
            dykstra_balls(np.array([[0.0, 2.0]]), LENS.centers, LENS.radii, max_iterations=1)

    def test_member_validates_arguments(self):
        ball = NormBall(L2, np.array([0.0, 0.0]), 1.0)
        assert member(ball, [1.0 + 1e-12, 0.0])
        assert not member(ball, [1.0 + 1e-12, 0.0], tol=0.0)
        with pytest.raises(InvalidArgumentError):
            member(ball, [0.0, 0.0], tol=-1.0)
        with pytest.raises(InvalidArgumentError):
            member(ball, [0.0, 0.0, 0.0])


class TestProjectionProperties:
    """Projection invariants shared by every bounded set."""

    @pytest.mark.parametrize("s", BOUNDED_SETS, ids=lambda s: s.kind)
    def test_projection_is_member_and_idempotent(self, s):
        rng = block_rng(3, "projection-test", 0)
        center, radius = s.bounding_ball()
        z = center + 3.0 * radius * rng.standard_normal((64, s.dim))
        p = s.project_many(z)
        assert np.all(s.contains_many(p, 1e-8))
        np.testing.assert_allclose(s.project_many(p), p, atol=1e-8)

    @pytest.mark.parametrize("s", BOUNDED_SETS, ids=lambda s: s.kind)
    def test_obtuse_angle(self, s):
        rng = block_rng(4, "projection-test", 0)
        center, radius = s.bounding_ball()
        z = center + 3.0 * radius * rng.standard_normal((32, s.dim))
        p = s.project_many(z)
        w = s.sample_points(rng, 64)
        inner = np.einsum("id,jd->ij", z - p, w) - np.einsum("id,id->i", z - p, p)[:, None]
        assert inner.max() <= 1e-7

    @pytest.mark.parametrize("s", BOUNDED_SETS, ids=lambda s: s.kind)
    def test_bounding_ball_contains_samples(self, s):
        center, radius = s.bounding_ball()
        points = s.sample_points(block_rng(5, "projection-test", 0), 128)
        assert np.all(np.linalg.norm(points - center, axis=1) <= radius + 1e-9)


class TestVialInclusion:
    """Tests for vial_inclusion_check."""

    def test_radius(self):
        assert vial_radius(np.array([1.0, 0.0]), np.array([0.0, 1.0]), 0.5, 1.0) == pytest.approx(0.25)

    def test_unit_disk_passes(self):
        disk = NormBall(L2, np.array([0.0, 0.0]), 1.0)
        assert vial_inclusion_check(disk, [1.0, 0.0], [0.0, 1.0], 0.5, 1.0)
        assert vial_inclusion_check(disk, [0.6, 0.8], [-1.0, 0.0], 0.3, 1.0)

    def test_small_radius_fails(self):
        disk = NormBall(L2, np.array([0.0, 0.0]), 1.0)
        assert not vial_inclusion_check(disk, [1.0, 0.0], [0.0, 1.0], 0.5, 0.1)

    def test_box_fails_along_an_edge(self):
        box = Box(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
        assert not vial_inclusion_check(box, [0.0, 0.0], [1.0, 0.0], 0.5, 10.0)

    def test_coincident_points(self):
        disk = NormBall(L2, np.array([0.0, 0.0]), 1.0)
        assert vial_inclusion_check(disk, [1.0, 0.0], [1.0, 0.0], 0.5, 1.0)

    def test_higher_dimension_uses_seeded_directions(self):
        ball = NormBall(L2, np.zeros(3), 1.0)
        assert vial_inclusion_check(ball, [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 0.4, 1.0, n_boundary_samples=512)

    def test_rejects_bad_arguments(self):
        disk = NormBall(L2, np.array([0.0, 0.0]), 1.0)
        with pytest.raises(InvalidArgumentError):
            vial_inclusion_check(disk, [2.0, 0.0], [0.0, 1.0], 0.5, 1.0)
        with pytest.raises(InvalidArgumentError):
            vial_inclusion_check(disk, [1.0, 0.0], [0.0, 1.0], 1.0, 1.0)
        with pytest.raises(InvalidArgumentError):
            vial_inclusion_check(disk, [1.0, 0.0], [0.0, 1.0], 0.5, 0.0)


class TestStrongConvexityProbe:
    """Tests for strong_convexity_probe."""

    def test_unit_disk_is_strongly_convex(self):
        disk = NormBall(L2, np.array([0.0, 0.0]), 1.0)
        result = strong_convexity_probe(disk, 1.0, SamplerConfig(seed=1, n_pairs=256))
        assert result
        assert result.witness is None

    def test_box_is_not_strongly_convex(self):
        box = Box(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
        result = strong_convexity_probe(box, 1.0, SamplerConfig(seed=1, n_pairs=256))
        assert not result
        x, y, z = result.witness
        assert box.contains(x) and box.contains(y)
        assert not box.contains(z)

    def test_far_pair_escapes(self):
        disk = NormBall(L2, np.array([0.0, 0.0]), 1.0)
        result = strong_convexity_probe(disk, 0.1, SamplerConfig(seed=2, n_pairs=64))
        assert not result
        assert not disk.contains(result.witness[2])

    def test_rejects_unbounded_set(self):
        with pytest.raises(InvalidArgumentError):
            strong_convexity_probe(Halfspace(np.array([1.0, 0.0]), 0.0), 1.0, SamplerConfig(n_pairs=8))

    def test_rejects_radius(self):
        disk = NormBall(L2, np.array([0.0, 0.0]), 1.0)
        with pytest.raises(InvalidArgumentError):
            strong_convexity_probe(disk, 0.0, SamplerConfig(n_pairs=8))


class TestRecessionRayProbe:
    """Tests for recession_ray_probe."""

    def test_direction_in_cone(self):
        h = Halfspace(np.array([1.0, 0.0]), 0.0)
        result = recession_ray_probe(h, [-1.0, 0.0], [-1.0, 2.0], t_max=1e6, steps=20)
        assert result.direction_in_cone
        assert result.first_exit_t is None
        assert result.t_checked == 1e6

    def test_exit_is_bisected(self):
        h = Halfspace(np.array([1.0, 0.0]), 0.0)
        result = recession_ray_probe(h, [-1.0, 0.0], [1.0, 0.0], t_max=8.0, steps=4)
        assert not result.direction_in_cone
        assert result.first_exit_t == pytest.approx(1.0, abs=1e-8)

    def test_bounded_set_has_no_recession_direction(self):
        disk = NormBall(L2, np.array([0.0, 0.0]), 1.0)
        result = recession_ray_probe(disk, [0.0, 0.0], [0.0, 1.0], t_max=4.0, steps=3)
        assert result.first_exit_t == pytest.approx(1.0, abs=1e-8)

    def test_result_consistency(self):
        with pytest.raises(InvalidArgumentError):
            RayProbeResult(direction_in_cone=True, t_checked=1.0, first_exit_t=0.5)

    def test_rejects_bad_arguments(self):
        h = Halfspace(np.array([1.0, 0.0]), 0.0)
        with pytest.raises(InvalidArgumentError):
            recession_ray_probe(h, [1.0, 0.0], [-1.0, 0.0], 1.0, 4)
        with pytest.raises(InvalidArgumentError):
            recession_ray_probe(h, [-1.0, 0.0], [0.0, 0.0], 1.0, 4)
        with pytest.raises(InvalidArgumentError):
            recession_ray_probe(h, [-1.0, 0.0], [1.0, 0.0], 0.0, 4)
        with pytest.raises(InvalidArgumentError):
            recession_ray_probe(h, [-1.0, 0.0], [1.0, 0.0], 1.0, 0)


def test_norm_of_projection_residual_matches_distance():
    ball = NormBall(L2, np.array([0.0, 0.0]), 1.0)
    z = np.array([2.0, 2.0])
    assert norm(z - project_euclidean(ball, z)) == pytest.approx(distance(ball, z, L2))
