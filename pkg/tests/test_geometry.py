"""Tests for norms, interpolation and seeded sampling."""

import math
import threading

import numpy as np
import pytest

from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.sampling import (
    SamplerConfig,
    ball_points,
    block_bounds,
    block_rng,
    circle_directions,
    map_blocks,
    sample_sphere,
    scaled_boundary_count,
    serial_blocks,
    sphere_points,
    worker_count,
)
from sqc_lab.geometry.vectors import L2, NormSpec, as_vector, interpolate, norm, norms


class TestNormSpec:
    """Tests for NormSpec and norm evaluation."""

    def test_standard_norms(self):
        v = [3.0, -4.0]
        assert norm(v, L2) == 5.0
        assert norm(v, NormSpec.l1()) == 7.0
        assert norm(v, NormSpec.linf()) == 4.0

    def test_general_p(self):
        assert norm([1.0, 1.0], NormSpec.lp(3.0)) == pytest.approx(2.0 ** (1.0 / 3.0))

    def test_rejects_p_below_one(self):
        with pytest.raises(InvalidArgumentError):
            NormSpec(0.5)

    def test_labels(self):
        assert NormSpec.l2().label == "L2"
        assert NormSpec.lp(1.5).label == "L1.5"
        assert NormSpec.linf().label == "Linf"
        assert NormSpec.linf().to_json() == "inf"

    def test_flags(self):
        assert NormSpec.l2().is_euclidean
        assert NormSpec.linf().is_infinity
        assert not NormSpec.l1().is_infinity

    def test_batch_norms_over_last_axis(self):
        points = np.array([[3.0, 4.0], [0.0, 2.0]])
        np.testing.assert_allclose(norms(points, L2), [5.0, 2.0])

    def test_lp_norms_ordered(self):
        v = np.array([0.3, -1.2, 0.7])
        values = [norm(v, NormSpec.lp(p)) for p in (1.0, 1.5, 2.0, 4.0)]
        assert values == sorted(values, reverse=True)
        assert values[-1] >= norm(v, NormSpec.linf())


class TestInterpolate:
    """Tests for interpolate and vector validation."""

    def test_weights(self):
        x, y = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        np.testing.assert_allclose(interpolate(x, y, 0.25), [0.25, 0.75])

    def test_endpoints(self):
        x, y = np.array([1.0, 2.0]), np.array([-3.0, 5.0])
        np.testing.assert_array_equal(interpolate(x, y, 1.0), x)
        np.testing.assert_array_equal(interpolate(x, y, 0.0), y)

    def test_swap_symmetry_is_bitwise(self):
        x, y = np.array([0.1, 0.7, -2.3]), np.array([1.9, -0.4, 0.3])
        for lam in (0.3, 0.1, 0.5, 0.77):
            assert np.array_equal(interpolate(x, y, lam), interpolate(y, x, 1.0 - lam))

    def test_lambda_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            interpolate([0.0], [1.0], 1.5)
        with pytest.raises(InvalidArgumentError):
            interpolate([0.0], [1.0], -0.1)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            interpolate([0.0, 1.0], [1.0], 0.5)

    def test_as_vector_rejects_bad_input(self):
        with pytest.raises(InvalidArgumentError):
            as_vector([])
        with pytest.raises(InvalidArgumentError):
            as_vector([[1.0, 2.0]])
        with pytest.raises(InvalidArgumentError):
            as_vector([1.0, float("nan")])

    def test_as_vector_is_read_only(self):
        v = as_vector([1.0, 2.0])
        with pytest.raises(ValueError):
            v[0] = 3.0


class TestSamplerConfig:
    """Tests for SamplerConfig and the λ grid."""

    def test_defaults(self):
        cfg = SamplerConfig()
        assert cfg.seed == 0
        assert cfg.n_pairs == 10_000
        assert cfg.lambda_grid == 33

    def test_lambdas_sorted_interior_with_midpoint(self):
        lams = SamplerConfig().lambdas()
        assert lams.size == 33
        assert np.all(np.diff(lams) > 0)
        assert lams[0] > 0.0 and lams[-1] < 1.0
        assert 0.5 in lams

    def test_even_grid_adds_midpoint(self):
        lams = SamplerConfig(lambda_grid=32).lambdas()
        assert lams.size == 33
        assert 0.5 in lams

    def test_jitter_keeps_midpoint(self):
        plain = SamplerConfig(seed=3).lambdas()
        jittered = SamplerConfig(seed=3, jitter=True).lambdas()
        assert 0.5 in jittered
        assert np.all((jittered > 0.0) & (jittered < 1.0))
        assert not np.array_equal(plain, jittered)

    def test_invalid_values(self):
        with pytest.raises(InvalidArgumentError):
            SamplerConfig(seed=-1)
        with pytest.raises(InvalidArgumentError):
            SamplerConfig(n_pairs=0)
        with pytest.raises(InvalidArgumentError):
            SamplerConfig(lambda_grid=0)


class TestSeededStreams:
    """Tests for block RNGs and parallel block mapping."""

    def test_block_rng_is_deterministic(self):
        a = block_rng(11, "pairs", 2).standard_normal(5)
        b = block_rng(11, "pairs", 2).standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_streams_and_blocks_differ(self):
        base = block_rng(11, "pairs", 0).standard_normal(5)
        assert not np.array_equal(base, block_rng(11, "pairs", 1).standard_normal(5))
        assert not np.array_equal(base, block_rng(11, "sphere", 0).standard_normal(5))
        assert not np.array_equal(base, block_rng(12, "pairs", 0).standard_normal(5))

    def test_block_bounds_cover_total(self):
        bounds = block_bounds(10_001)
        assert bounds[0][0] == 0
        assert bounds[-1][1] == 10_001
        assert all(a[1] == b[0] for a, b in zip(bounds, bounds[1:]))

    def test_map_blocks_independent_of_workers(self):
        def draw(block, start, stop):
            return block_rng(5, "test", block).uniform(size=stop - start)

        serial = np.concatenate(map_blocks(draw, 5000, workers=1))
        parallel = np.concatenate(map_blocks(draw, 5000, workers=4))
        np.testing.assert_array_equal(serial, parallel)

    def test_serial_blocks_stay_on_the_calling_thread(self):
        def thread(block, start, stop):
            return threading.get_ident()

        with serial_blocks():
            idents = map_blocks(thread, 5000, workers=4)
        assert set(idents) == {threading.get_ident()}

    def test_worker_count_from_env(self, monkeypatch):
        monkeypatch.setenv("SQCLAB_THREADS", "3")
        assert worker_count() == 3

    def test_worker_count_ignores_bad_env(self, monkeypatch):
        monkeypatch.setenv("SQCLAB_THREADS", "many")
        assert worker_count() >= 1
        monkeypatch.setenv("SQCLAB_THREADS", "0")
        assert worker_count() >= 1


class TestPointSamplers:
    """Tests for sphere, ball and circle samplers."""

    @pytest.mark.parametrize("n", [NormSpec.l1(), NormSpec.l2(), NormSpec.lp(3.0), NormSpec.linf()])
    def test_sphere_points_have_radius(self, n):
        center = np.array([1.0, -2.0, 0.5])
        points = sphere_points(center, 2.0, n, 300, seed=4)
        assert points.shape == (300, 3)
        np.testing.assert_allclose(norms(points - center, n), 2.0, rtol=1e-12)

    def test_sphere_points_empty(self):
        assert sphere_points(np.zeros(3), 1.0, L2, 0, seed=0).shape == (0, 3)

    def test_sample_sphere_streams_budget(self):
        points = list(sample_sphere([0.0, 0.0], 1.5, L2, SamplerConfig(seed=1, n_pairs=50)))
        assert len(points) == 50
        assert all(math.isclose(norm(p), 1.5, rel_tol=1e-12) for p in points)

    def test_sample_sphere_rejects_radius(self):
        with pytest.raises(InvalidArgumentError):
            list(sample_sphere([0.0, 0.0], 0.0, L2, SamplerConfig(n_pairs=5)))

    def test_ball_points_inside(self):
        rng = block_rng(2, "ball", 0)
        center = np.array([0.5, 0.5])
        points = ball_points(rng, center, 0.25, NormSpec.l1(), 500)
        assert np.all(norms(points - center, NormSpec.l1()) <= 0.25 + 1e-12)

    def test_boundary_count_scaling(self):
        assert scaled_boundary_count(2) == 4096
        assert scaled_boundary_count(4) == 4096
        assert scaled_boundary_count(5) == 8192
        assert scaled_boundary_count(6) == 16384

    def test_circle_directions_unit(self):
        directions = circle_directions(16)
        np.testing.assert_allclose(norms(directions, L2), 1.0)
        np.testing.assert_allclose(directions[0], [1.0, 0.0])
