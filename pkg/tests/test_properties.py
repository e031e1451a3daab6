"""Property-based tests for norms, projections and the modulus estimators."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from sqc_lab.engine.estimators import certify, defect, sigma_hat
from sqc_lab.engine.functions import DistanceTo, Norm
from sqc_lab.engine.regions import BoxRegion, PairRegion
from sqc_lab.geometry.sampling import SamplerConfig
from sqc_lab.geometry.vectors import L2, NormSpec, interpolate, norm, norms
from sqc_lab.sets.specs import Box, Halfspace, NormBall
from sqc_lab.sets.spindle import Spindle

coordinate = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
vector2 = st.lists(coordinate, min_size=2, max_size=2).map(np.array)
vector3 = st.lists(coordinate, min_size=3, max_size=3).map(np.array)
unit_lambda = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
interior_lambda = st.floats(min_value=0.0, max_value=1.0, exclude_min=True, exclude_max=True, allow_nan=False)
exponent = st.floats(min_value=1.0, max_value=8.0, allow_nan=False)


class TestNormProperties:
    """Norm inequalities that hold for every vector."""

    @given(v=vector3, p=exponent, q=exponent)
    @settings(max_examples=200, deadline=None)
    def test_lp_norms_decrease_in_p(self, v, p, q):
        lo, hi = min(p, q), max(p, q)
        assert norm(v, NormSpec.lp(hi)) <= norm(v, NormSpec.lp(lo)) * (1.0 + 1e-12) + 1e-300

    @given(x=vector3, y=vector3, p=exponent)
    @settings(max_examples=200, deadline=None)
    def test_triangle_inequality(self, x, y, p):
        n = NormSpec.lp(p)
        assert norm(x + y, n) <= (norm(x, n) + norm(y, n)) * (1.0 + 1e-12) + 1e-12

    @given(x=vector2, y=vector2, lam=unit_lambda)
    @settings(max_examples=200, deadline=None)
    def test_interpolate_splits_the_segment(self, x, y, lam):
        point = interpolate(x, y, lam)
        gap = norm(x - y)
        assert abs(norm(point - y) - lam * gap) <= 1e-9 * (1.0 + gap)
        assert abs(norm(point - x) - (1.0 - lam) * gap) <= 1e-9 * (1.0 + gap)


class TestProjectionProperties:
    """Euclidean projections land in the set, fix it, and satisfy the obtuse-angle condition."""

    @given(z=vector3, radius=st.floats(min_value=0.1, max_value=5.0))
    @settings(max_examples=100, deadline=None)
    def test_ball(self, z, radius):
        ball = NormBall(L2, np.zeros(3), radius)
        p = ball.project_many(z[None])
        assert ball.contains_many(p)[0]
        np.testing.assert_allclose(ball.project_many(p), p, atol=1e-12)

    @given(z=vector2)
    @settings(max_examples=100, deadline=None)
    def test_box_obtuse_angle(self, z):
        box = Box(np.array([-1.0, 0.0]), np.array([2.0, 0.5]))
        p = box.project_many(z[None])[0]
        corners = np.array([[-1.0, 0.0], [2.0, 0.0], [-1.0, 0.5], [2.0, 0.5]])
        assert np.max((corners - p) @ (z - p)) <= 1e-9

    @given(
        x=vector2.map(lambda v: v / 20.0),
        direction=st.floats(min_value=0.0, max_value=2.0 * np.pi),
        length=st.floats(min_value=0.05, max_value=1.9),
        z=vector2,
    )
    @settings(max_examples=50, deadline=None)
    def test_spindle(self, x, direction, length, z):
        y = x + length * np.array([np.cos(direction), np.sin(direction)])
        spindle = Spindle(x, y, 1.0)
        p = spindle.project_many(z[None])
        assert spindle.contains_many(p)[0]
        assert norms(p[0] - z, L2) <= min(norm(z - x), norm(z - y)) + 1e-9


class TestEstimatorProperties:
    """Relations between defects, the estimated modulus and certification."""

    @given(x=vector2, y=vector2, lam=interior_lambda, sigma=st.floats(min_value=0.0, max_value=10.0))
    @settings(max_examples=200, deadline=None)
    def test_defect_formula(self, x, y, lam, sigma):
        f = Norm(L2)
        expected = f(interpolate(x, y, lam)) - max(f(x), f(y)) + 0.5 * sigma * lam * (1.0 - lam) * norm(x - y) ** 2
        assert abs(defect(f, x, y, lam, sigma) - expected) <= 1e-9 * (1.0 + abs(expected))

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=10, deadline=None)
    def test_sigma_hat_is_certified(self, seed):
        cfg = SamplerConfig(seed=seed, n_pairs=64)
        f, region = Norm(L2), BoxRegion([-1.0, -1.0], [1.0, 1.0])
        estimate = sigma_hat(f, region, cfg)
        assert estimate.sigma_hat > 0
        assert certify(f, region, estimate.sigma_hat, cfg, tol=1e-9).passed
        assert not certify(f, region, 2.0 * estimate.sigma_hat + 1.0, cfg, tol=0.0).passed

    @given(
        u=st.floats(min_value=0.5, max_value=100.0),
        v=st.floats(min_value=-100.0, max_value=100.0),
        length=st.floats(min_value=1e-4, max_value=1.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_level_pairs_refute_at_any_scale(self, u, v, length):
        f = DistanceTo(Halfspace(np.array([1.0, 0.0]), 0.0), L2)
        region = PairRegion(np.array([u, v]), np.array([u, v + length]))
        cfg = SamplerConfig(seed=0, n_pairs=1)
        assert sigma_hat(f, region, cfg).sigma_hat <= 0.0
        result = certify(f, region, 1.0, cfg, tol=0.0)
        assert not result.passed
        assert result.witness.defect > 0
