"""Tests for the registered checks, the strongly convex pipeline and the suite runner."""

import warnings

import numpy as np
import pytest

from sqc_lab.engine.interpolation import InterpolationCheck, InterpolationStatus
from sqc_lab.errors import InvalidArgumentError, PreconditionFailure
from sqc_lab.geometry.sampling import SamplerConfig
from sqc_lab.geometry.vectors import L2
from sqc_lab.logging.reporter import PASS
from sqc_lab.sets.specs import NormBall
from sqc_lab.suite import checks
from sqc_lab.suite.checks import CheckStatus, sigma_zero
from sqc_lab.suite.pipeline import descend_on_sphere, run_strongly_convex_pipeline
from sqc_lab.suite.registry import CHECK_NAMES, REGISTRY, CheckSpec, SuiteRunner, lookup, run_check


@pytest.fixture
def cfg():
    return SamplerConfig(seed=0, n_pairs=256)


class TestSigmaZero:
    """Tests for the closed-form sphere modulus."""

    def test_values(self):
        assert sigma_zero(1.0, 2.0) == pytest.approx(0.5)
        assert sigma_zero(1.0, 1.1) == pytest.approx(0.2 / 1.21)
        assert sigma_zero(1.0, 10.0) == pytest.approx(0.1)


class TestBallSpheres:
    """Tests for check_ball_spheres."""

    def test_passes_in_the_plane(self, cfg):
        outcome = checks.check_ball_spheres(1.0, 2.0, cfg, dims=(2,))
        assert outcome.status is CheckStatus.PASS
        assert outcome.sigma == pytest.approx(0.5)
        assert outcome.witness is None
        assert outcome.details["dim2"]["in_ball_refuted"]

    def test_rejects_inner_sphere(self, cfg):
        with pytest.raises(InvalidArgumentError):
            checks.check_ball_spheres(1.0, 0.5, cfg)

    def test_chord_identity(self, cfg):
        identity, concavity = checks.chord_identity_errors(2.0, 4, cfg)
        assert identity <= 1e-12
        assert concavity >= -1e-12


class TestCounterexamples:
    """The counterexample checks confirm their violations."""

    def test_halfspace(self, cfg):
        outcome = checks.check_halfspace_counterexample(cfg)
        assert outcome.status is CheckStatus.PASS
        assert outcome.witness is not None
        assert outcome.witness.defect > 0
        assert outcome.details["literal_defect"] == pytest.approx(1e-3 / 8.0, abs=1e-12)

    def test_maxnorm(self, cfg):
        outcome = checks.check_maxnorm_counterexample(cfg)
        assert outcome.status is CheckStatus.PASS
        assert outcome.details["distances"] == pytest.approx([1.5, 1.5, 1.5])

    def test_l1(self, cfg):
        outcome = checks.check_l1_counterexample(cfg, epsilon=0.1)
        assert outcome.status is CheckStatus.PASS
        assert outcome.details["gap2"] == pytest.approx(0.005, abs=1e-15)
        assert outcome.details["refutes_sigma_1e-6"]

    def test_halfspace_radius_range(self, cfg):
        with pytest.raises(InvalidArgumentError):
            checks.check_halfspace_counterexample(cfg, radius=0.6)


class TestLocalModulus:
    """Tests for check_lp_local."""

    @pytest.mark.parametrize("p", [1.5, 2.0])
    def test_positive_modulus(self, cfg, p):
        outcome = checks.check_lp_local(p, np.array([2.0, 0.0]), 1.0, cfg)
        assert outcome.status is CheckStatus.PASS
        assert outcome.sigma > 0

    def test_l1_contrast_vanishes(self, cfg):
        outcome = checks.check_lp_local(1.0, np.array([2.0, 0.0]), 1.0, cfg)
        assert outcome.status is CheckStatus.PASS
        assert outcome.sigma <= 1e-9

    def test_rejects_inside_point(self, cfg):
        with pytest.raises(InvalidArgumentError):
            checks.check_lp_local(2.0, np.array([0.5, 0.0]), 1.0, cfg)

    def test_rejects_p(self, cfg):
        with pytest.raises(InvalidArgumentError):
            checks.check_lp_local(3.0, np.array([2.0, 0.0]), 1.0, cfg)


class TestStronglyConvex:
    """Tests for the strongly convex set pipeline."""

    def test_ball_pipeline(self, cfg):
        run = run_strongly_convex_pipeline(NormBall(L2, np.zeros(2), 1.0), 1.0, 2.0, cfg, vial_triples=32)
        assert run.pipeline.delta == pytest.approx(1.0, abs=1e-9)
        assert run.pipeline.c0_hat == pytest.approx(0.5, abs=1e-6)
        assert run.pipeline.sigma == pytest.approx(0.25, abs=1e-5)
        assert not run.hypothesis_failure
        assert run.passed

    def test_sphere_meeting_the_set(self, cfg):
        with pytest.raises(PreconditionFailure):
            run_strongly_convex_pipeline(NormBall(L2, np.zeros(2), 1.0), 1.0, 0.5, cfg)

    def test_rejects_dimension(self, cfg):
        with pytest.raises(InvalidArgumentError):
            run_strongly_convex_pipeline(NormBall(L2, np.zeros(1), 1.0), 1.0, 2.0, cfg)

    def test_ball_check(self, cfg):
        outcome = checks.check_strongly_convex(1.0, 2.0, 0.0, 2, cfg)
        assert outcome.status is CheckStatus.PASS
        assert outcome.details["set"] == "NormBall"

    def test_spindle_reports_hypothesis_failure(self, cfg):
        outcome = checks.check_strongly_convex(1.0, 2.0, 0.3, 2, cfg)
        assert outcome.status is CheckStatus.HYPOTHESIS_FAILURE
        assert outcome.details["c0_hat"] <= 1e-9
        assert outcome.details["vial_failures"] == 0


class TestProjectionCollapse:
    """Tests for check_projection_collapse."""

    def test_collapse(self):
        outcome = checks.check_projection_collapse(1.0, np.array([2.0, 0.0]), 0.5, 2.0)
        assert outcome.status is CheckStatus.PASS
        assert outcome.details["collapse_ratio"] == 0.0
        assert outcome.details["contrast_ratio"] == pytest.approx(0.5)

    def test_rejects_epsilon(self):
        with pytest.raises(InvalidArgumentError):
            checks.check_projection_collapse(1.0, np.array([2.0, 0.0]), 1.5, 2.0)


class TestNormBoundedness:
    """Tests for check_norm_boundedness."""

    def test_euclidean(self, cfg):
        outcome = checks.check_norm_boundedness(2.0, 2, cfg)
        assert outcome.status is CheckStatus.PASS
        assert outcome.sigma >= 1e-3
        decay = outcome.details["decay"]
        assert decay[-1]["sigma_hat"] < decay[0]["sigma_hat"]

    def test_l1_skips_the_box(self, cfg):
        outcome = checks.check_norm_boundedness(1.0, 2, cfg)
        assert "box_sigma_hat" not in outcome.details
        assert outcome.details["l1_level_sigma_hat"] <= 1e-9


class TestConversionAndInterpolation:
    """Tests for the midpoint conversion and the one-dimensional interpolation checks."""

    def test_midpoint_conversion(self, cfg):
        outcome = checks.check_midpoint_conversion(cfg)
        assert outcome.status is CheckStatus.PASS
        assert len(outcome.details) == len(checks.MIDPOINT_CASES)

    def test_lemma(self, cfg):
        outcome = checks.check_lemma_interpolation(cfg, grid=32)
        assert outcome.status is CheckStatus.PASS
        assert outcome.details["affine"] == "pass"
        assert outcome.sigma >= 0


class TestRegistry:
    """Tests for check lookup and parameter resolution."""

    def test_names_unique(self):
        assert len(set(CHECK_NAMES)) == len(REGISTRY) == 10

    def test_lookup_unknown(self):
        with pytest.raises(InvalidArgumentError):
            lookup("no-such-check")

    def test_resolve_defaults(self):
        spec = CheckSpec.resolve("ex-halfspace")
        assert spec.params == {"sigma": 1e-3, "radius": 0.4}
        assert spec.expected == "fail-with-witness"

    def test_resolve_override(self):
        spec = CheckSpec.resolve("thm-lp-local", {"p": 1.5})
        assert spec.params["p"] == 1.5
        assert spec.params["R"] == 1.0

    def test_resolve_unknown_param(self):
        with pytest.raises(InvalidArgumentError, match="bogus"):
            CheckSpec.resolve("thm-lp-local", {"bogus": 1.0})

    def test_run_check_record(self, cfg):
        record = run_check(CheckSpec.resolve("ex-projection-collapse"), cfg)
        assert record.name == "ex-projection-collapse"
        assert record.status == PASS
        assert record.seed == 0
        assert record.runtime_ms >= 0.0

    def test_out_of_range_override_raises(self, cfg):
        with pytest.raises(InvalidArgumentError, match="epsilon"):
            run_check(CheckSpec.resolve("ex-l1", {"epsilon": 0.5}), cfg)


class TestSuiteRunner:
    """Tests for SuiteRunner."""

    def test_registration_order_and_callbacks(self, cfg):
        started, finished = [], []
        specs = [CheckSpec.resolve("lemma-1d-interpolation"), CheckSpec.resolve("ex-projection-collapse")]
        report = SuiteRunner(specs, cfg, on_start=started.append, on_finish=finished.append).run_all()
        assert [check.name for check in report.checks] == ["ex-projection-collapse", "lemma-1d-interpolation"]
        assert sorted(started) == sorted(spec.name for spec in specs)
        assert len(finished) == 2
        assert report.suite == "sqclab-paper"
        assert all(check.status == PASS for check in report.checks)

    def test_thread_count_does_not_change_results(self, cfg, monkeypatch):
        specs = [CheckSpec.resolve("lemma-1d-interpolation"), CheckSpec.resolve("ex-maxnorm")]
        monkeypatch.setenv("SQCLAB_THREADS", "1")
        serial = SuiteRunner(specs, cfg).run_all()
        monkeypatch.setenv("SQCLAB_THREADS", "4")
        parallel = SuiteRunner(specs, cfg).run_all()
        assert [(c.name, c.status, c.sigma, c.witness) for c in serial.checks] == [
            (c.name, c.status, c.sigma, c.witness) for c in parallel.checks
        ]


class TestFailWitnesses:
    """Every failing check carries a witness."""

    def test_ball_spheres_chord_identity(self, cfg, monkeypatch):
        monkeypatch.setattr(checks, "EXACT", -1.0)
        outcome = checks.check_ball_spheres(1.0, 2.0, cfg, dims=(2,))
        assert outcome.status is CheckStatus.FAIL
        assert outcome.witness is not None
        assert outcome.witness.sigma == pytest.approx(0.5)
        assert 0.0 < outcome.witness.lam < 1.0

    def test_projection_collapse(self, monkeypatch):
        monkeypatch.setattr(checks, "EXACT", -1.0)
        outcome = checks.check_projection_collapse(1.0, np.array([2.0, 0.0]), 0.5, 2.0)
        assert outcome.status is CheckStatus.FAIL
        np.testing.assert_allclose(outcome.witness.x, [1.5, 0.0])
        np.testing.assert_allclose(outcome.witness.y, [2.5, 0.0])
        assert outcome.witness.f_values == pytest.approx((0.5, 1.5, 1.0))

    def test_norm_boundedness(self, cfg):
        outcome = checks.check_norm_boundedness(2.0, 2, cfg, threshold=1e6)
        assert outcome.status is CheckStatus.FAIL
        assert outcome.witness is not None
        assert outcome.witness.ratio == pytest.approx(outcome.details["box_sigma_hat"])

    def test_midpoint_conversion(self, cfg):
        outcome = checks.check_midpoint_conversion(cfg, tol=-1e6)
        assert outcome.status is CheckStatus.FAIL
        assert outcome.witness is not None

    def test_lemma_conclusion(self, cfg, monkeypatch):
        failed = InterpolationCheck(InterpolationStatus.CONCLUSION_FAILURE, 1.0, (0.25,))
        monkeypatch.setattr(checks, "lambda_interpolation_check", lambda f_1d, alpha, grid: failed)
        outcome = checks.check_lemma_interpolation(cfg, grid=32)
        assert outcome.status is CheckStatus.FAIL
        assert outcome.witness.lam == 0.25
        np.testing.assert_array_equal(outcome.witness.x, [1.0])
        np.testing.assert_array_equal(outcome.witness.y, [0.0])

    def test_lemma_hypothesis(self, cfg, monkeypatch):
        monkeypatch.setattr(checks, "grid_midpoint_modulus", lambda f_1d, grid: 10.0)
        outcome = checks.check_lemma_interpolation(cfg, grid=32)
        assert outcome.status is CheckStatus.HYPOTHESIS_FAILURE
        assert outcome.witness.lam == 0.5
        assert outcome.witness.sigma == 80.0
        assert outcome.witness.x.shape == (1,)


class TestDescent:
    """Tests for descend_on_sphere."""

    def test_infinite_objective_is_silent(self):
        start = np.array([[2.0, 0.0], [0.0, 2.0]])
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            point, value = descend_on_sphere(lambda tuples: np.full(tuples.shape[0], np.inf), start, 2.0)
        np.testing.assert_array_equal(point, start)
        assert value == np.inf
