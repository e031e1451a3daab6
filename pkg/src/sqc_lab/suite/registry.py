"""Registered checks, their default parameters, and the parallel suite runner."""

import logging
import time
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.sampling import SamplerConfig, serial_blocks, worker_count
from sqc_lab.logging.reporter import CheckRecord, Report
from sqc_lab.suite import checks
from sqc_lab.suite.checks import CheckOutcome

logger = logging.getLogger(__name__)

SUITE_NAME = "sqclab-paper"

Params = dict[str, float]
CheckFn = Callable[[Params, SamplerConfig], CheckOutcome]


def first_axis_point(coordinate: float, dim: int) -> np.ndarray:
    point = np.zeros(dim)
    point[0] = coordinate
    return point


def as_dim(value: float, name: str = "dim") -> int:
    if value != int(value):
        raise InvalidArgumentError(f"{name} must be an integer, got {value}")
    return int(value)


def run_ball_spheres(params: Params, cfg: SamplerConfig) -> CheckOutcome:
    dim = as_dim(params["dim"])
    dims = checks.DEFAULT_DIMS if dim == 0 else (dim,)
    return checks.check_ball_spheres(params["R"], params["r"], cfg, dims, params["tol"])


def run_lp_local(params: Params, cfg: SamplerConfig) -> CheckOutcome:
    x0 = first_axis_point(params["x0"], as_dim(params["dim"]))
    return checks.check_lp_local(params["p"], x0, params["R"], cfg)


def run_strongly_convex(params: Params, cfg: SamplerConfig) -> CheckOutcome:
    return checks.check_strongly_convex(params["R"], params["r"], params["a"], as_dim(params["dim"]), cfg, params["tol"])


def run_projection_collapse(params: Params, cfg: SamplerConfig) -> CheckOutcome:
    x0 = first_axis_point(params["x0"], as_dim(params["dim"]))
    return checks.check_projection_collapse(params["R"], x0, params["eps"], params["r"])


@dataclass(frozen=True)
class RegisteredCheck:
    name: str
    defaults: Params
    expected: Literal["pass", "fail-with-witness"]
    tolerance: float
    run: CheckFn


REGISTRY: tuple[RegisteredCheck, ...] = (
    RegisteredCheck("prop-ball-spheres", {"R": 1.0, "r": 2.0, "dim": 0, "tol": 1e-9}, "pass", 1e-9, run_ball_spheres),
    RegisteredCheck(
        "ex-halfspace",
        {"sigma": 1e-3, "radius": 0.4},
        "fail-with-witness",
        0.0,
        lambda p, cfg: checks.check_halfspace_counterexample(cfg, p["sigma"], p["radius"]),
    ),
    RegisteredCheck(
        "ex-maxnorm",
        {"sigma": 1e-3},
        "fail-with-witness",
        0.0,
        lambda p, cfg: checks.check_maxnorm_counterexample(cfg, p["sigma"]),
    ),
    RegisteredCheck(
        "ex-l1",
        {"sigma": 1e-3, "epsilon": 0.1},
        "fail-with-witness",
        0.0,
        lambda p, cfg: checks.check_l1_counterexample(cfg, p["sigma"], p["epsilon"]),
    ),
    RegisteredCheck("thm-lp-local", {"p": 2.0, "R": 1.0, "x0": 2.0, "dim": 2}, "pass", 0.0, run_lp_local),
    RegisteredCheck(
        "thm-strongly-convex", {"R": 1.0, "r": 2.0, "a": 0.0, "dim": 2, "tol": 1e-9}, "pass", 1e-9, run_strongly_convex
    ),
    RegisteredCheck(
        "ex-projection-collapse",
        {"R": 1.0, "x0": 2.0, "eps": 0.5, "r": 2.0, "dim": 2},
        "pass",
        1e-12,
        run_projection_collapse,
    ),
    RegisteredCheck(
        "thm-norm-boundedness",
        {"p": 2.0, "dim": 2, "threshold": 1e-3},
        "pass",
        1e-9,
        lambda p, cfg: checks.check_norm_boundedness(p["p"], as_dim(p["dim"]), cfg, p["threshold"]),
    ),
    RegisteredCheck(
        "prop-midpoint-conversion",
        {"tol": 1e-6},
        "pass",
        1e-6,
        lambda p, cfg: checks.check_midpoint_conversion(cfg, p["tol"]),
    ),
    RegisteredCheck(
        "lemma-1d-interpolation",
        {"grid": 64},
        "pass",
        1e-9,
        lambda p, cfg: checks.check_lemma_interpolation(cfg, as_dim(p["grid"], "grid")),
    ),
)

CHECK_NAMES: tuple[str, ...] = tuple(check.name for check in REGISTRY)


def lookup(name: str) -> RegisteredCheck:
    """Return the registered check called name.

    Raises:
        InvalidArgumentError: If no check has that name.
    """
    for check in REGISTRY:
        if check.name == name:
            return check
    raise InvalidArgumentError(f"Unknown check '{name}'; expected one of {', '.join(CHECK_NAMES)}")


@dataclass(frozen=True)
class CheckSpec:
    """A registered check with its resolved parameters."""

    name: str
    params: Params = field(default_factory=dict)
    expected: Literal["pass", "fail-with-witness"] = "pass"
    tolerance: float = 0.0

    @classmethod
    def resolve(cls, name: str, overrides: Mapping[str, float] | None = None) -> "CheckSpec":
        """Merge overrides into the registered defaults of name.

        Raises:
            InvalidArgumentError: If name is unknown or an override names no parameter of the check.
        """
        check = lookup(name)
        params = dict(check.defaults)
        for key, value in (overrides or {}).items():
            if key not in params:
                raise InvalidArgumentError(
                    f"Unknown parameter '{key}' for {name}; expected one of {', '.join(sorted(params))}"
                )
            params[key] = float(value)
        return cls(name=name, params=params, expected=check.expected, tolerance=check.tolerance)


def run_check(spec: CheckSpec, cfg: SamplerConfig) -> CheckRecord:
    """Run one check and stamp its outcome with name, params, seed and runtime."""
    logger.info(f"Running {spec.name} with {spec.params}")
    start = time.perf_counter()
    outcome = lookup(spec.name).run(spec.params, cfg)
    runtime_ms = (time.perf_counter() - start) * 1000.0
    logger.info(f"{spec.name}: {outcome.status.value} in {runtime_ms:.0f} ms")
    return CheckRecord(
        name=spec.name,
        params=dict(spec.params),
        status=outcome.status.value,
        sigma=outcome.sigma,
        witness=outcome.witness,
        n_samples=outcome.n_samples,
        seed=cfg.seed,
        runtime_ms=runtime_ms,
        details=outcome.details,
    )


class SuiteRunner:
    """Runs checks in a thread pool and assembles the report in registration order."""

    def __init__(
        self,
        specs: Sequence[CheckSpec],
        cfg: SamplerConfig,
        on_start: Callable[[str], None] | None = None,
        on_finish: Callable[[CheckRecord], None] | None = None,
    ) -> None:
        """Initialize the runner.

        Args:
            specs: Checks to run.
            cfg: Sampling budget and seed shared by every check.
            on_start: Called with a check name when it starts.
            on_finish: Called with each record when its check finishes.
        """
        self.specs = sorted(specs, key=lambda spec: CHECK_NAMES.index(spec.name))
        self.cfg = cfg
        self.on_start = on_start
        self.on_finish = on_finish

    def _run_one(self, spec: CheckSpec) -> CheckRecord:
        if self.on_start:
            self.on_start(spec.name)
        record = run_check(spec, self.cfg)
        if self.on_finish:
            self.on_finish(record)
        return record

    def _run_serial(self, spec: CheckSpec) -> CheckRecord:
        with serial_blocks():
            return self._run_one(spec)

    def run_all(self) -> Report:
        """Run every check.

        Returns:
            Report whose checks follow the registration order.
        """
        workers = min(worker_count(), max(len(self.specs), 1))
        if workers <= 1:
            records = [self._run_one(spec) for spec in self.specs]
        else:
            # one pool level at a time keeps the total within SQCLAB_THREADS
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(self._run_serial, self.specs))
        return Report(suite=SUITE_NAME, checks=records)
