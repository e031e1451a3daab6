"""Configuration loading and validation using Pydantic."""

import json
from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from sqc_lab.engine.functions import DistanceTo, FunctionSpec, Norm
from sqc_lab.engine.regions import BallRegion, BoxRegion, PairRegion, RegionSpec, SegmentRegion, SphereChords
from sqc_lab.geometry.sampling import SamplerConfig
from sqc_lab.geometry.vectors import NormSpec
from sqc_lab.sets.specs import BallIntersection, Box, ConvexSet, EuclideanBall, Halfspace, NormBall, Segment
from sqc_lab.sets.spindle import Spindle

COMMANDS = ("certify", "estimate", "paper", "dump")

Vector = list[float]


class StrictModel(BaseModel):
    """Base for every config model: unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class NormConfig(StrictModel):
    """{"p": <float >= 1>} or {"p": "inf"}."""

    p: float | Literal["inf"]

    @field_validator("p")
    @classmethod
    def validate_p(cls, v: float | str) -> float | str:
        if v != "inf" and not v >= 1.0:
            raise ValueError(f"p must be >= 1 or 'inf', got {v}")
        return v

    def to_spec(self) -> NormSpec:
        return NormSpec.linf() if self.p == "inf" else NormSpec.lp(float(self.p))


L2_CONFIG = NormConfig(p=2.0)


class NormBallConfig(StrictModel):
    kind: Literal["NormBall"]
    norm: NormConfig
    center: Vector
    radius: float = Field(gt=0)

    def to_spec(self) -> ConvexSet:
        return NormBall(self.norm.to_spec(), np.array(self.center), self.radius)


class HalfspaceConfig(StrictModel):
    kind: Literal["Halfspace"]
    a: Vector
    b: float

    def to_spec(self) -> ConvexSet:
        return Halfspace(np.array(self.a), self.b)


class SegmentConfig(StrictModel):
    kind: Literal["Segment"]
    x1: Vector
    x2: Vector

    def to_spec(self) -> ConvexSet:
        return Segment(np.array(self.x1), np.array(self.x2))


class BoxConfig(StrictModel):
    kind: Literal["Box"]
    lo: Vector
    hi: Vector

    def to_spec(self) -> ConvexSet:
        return Box(np.array(self.lo), np.array(self.hi))


class BallConfig(StrictModel):
    center: Vector
    radius: float = Field(gt=0)


class BallIntersectionConfig(StrictModel):
    kind: Literal["BallIntersection"]
    balls: list[BallConfig] = Field(min_length=1)
    interior_point: Vector

    def to_spec(self) -> ConvexSet:
        return BallIntersection(
            tuple(EuclideanBall(np.array(ball.center), ball.radius) for ball in self.balls),
            np.array(self.interior_point),
        )


class SpindleConfig(StrictModel):
    kind: Literal["Spindle"]
    x: Vector
    y: Vector
    R: float = Field(gt=0)

    def to_spec(self) -> ConvexSet:
        return Spindle(np.array(self.x), np.array(self.y), self.R)


SetConfig = Annotated[
    NormBallConfig | HalfspaceConfig | SegmentConfig | BoxConfig | BallIntersectionConfig | SpindleConfig,
    Field(discriminator="kind"),
]


class NormFunctionConfig(StrictModel):
    kind: Literal["Norm"]
    n: NormConfig
    center: Vector | None = None

    def to_spec(self) -> FunctionSpec:
        return Norm(self.n.to_spec(), None if self.center is None else np.array(self.center))


class DistanceToConfig(StrictModel):
    kind: Literal["DistanceTo"]
    set_: SetConfig = Field(alias="set")
    n: NormConfig = L2_CONFIG

    def to_spec(self) -> FunctionSpec:
        return DistanceTo(self.set_.to_spec(), self.n.to_spec())


FunctionConfig = Annotated[NormFunctionConfig | DistanceToConfig, Field(discriminator="kind")]


class SegmentRegionConfig(StrictModel):
    kind: Literal["SegmentRegion"]
    x1: Vector
    x2: Vector

    def to_spec(self) -> RegionSpec:
        return SegmentRegion(np.array(self.x1), np.array(self.x2))


class SphereChordsConfig(StrictModel):
    kind: Literal["SphereChords"]
    center: Vector
    r: float = Field(gt=0)
    n: NormConfig = L2_CONFIG

    def to_spec(self) -> RegionSpec:
        return SphereChords(np.array(self.center), self.r, self.n.to_spec())


class BallRegionConfig(StrictModel):
    kind: Literal["BallRegion"]
    center: Vector
    radius: float = Field(gt=0)
    n: NormConfig = L2_CONFIG

    def to_spec(self) -> RegionSpec:
        return BallRegion(np.array(self.center), self.radius, self.n.to_spec())


class BoxRegionConfig(StrictModel):
    kind: Literal["BoxRegion"]
    lo: Vector
    hi: Vector

    def to_spec(self) -> RegionSpec:
        return BoxRegion(np.array(self.lo), np.array(self.hi))


class PairRegionConfig(StrictModel):
    kind: Literal["PairRegion"]
    x1: Vector
    x2: Vector

    def to_spec(self) -> RegionSpec:
        return PairRegion(np.array(self.x1), np.array(self.x2))


RegionConfig = Annotated[
    SegmentRegionConfig | SphereChordsConfig | BallRegionConfig | BoxRegionConfig | PairRegionConfig,
    Field(discriminator="kind"),
]


class RunConfig(StrictModel):
    """Complete run configuration: a command with its inputs and sampling budget."""

    command: Literal["certify", "estimate", "paper", "dump"]
    function: FunctionConfig | None = None
    region: RegionConfig | None = None
    sigma: float | None = Field(default=None, ge=0, description="Modulus to certify (certify only)")
    seed: int = Field(default=0, ge=0, description="Root seed of every sample stream")
    samples: int = Field(default=10_000, ge=1, description="Sampled pairs per sweep")
    lambda_grid: int = Field(default=33, ge=1, description="Interior λ values per pair")
    tol: float = Field(default=1e-9, ge=0, description="Certification tolerance")
    out_path: str | None = None
    format: Literal["json", "csv"] = "json"
    check: list[str] | None = Field(default=None, description="Paper checks to run; all when omitted")
    params: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_command(self) -> "RunConfig":
        if self.command == "certify" and self.sigma is None:
            raise ValueError("sigma: certify requires sigma")
        if self.command == "estimate" and self.sigma is not None:
            raise ValueError("sigma: estimate does not take sigma")
        if self.command == "paper":
            if self.function is not None or self.region is not None:
                raise ValueError("function: paper runs registered checks and takes no function or region")
        else:
            if self.function is None:
                raise ValueError(f"function: {self.command} requires a function")
            if self.region is None:
                raise ValueError(f"region: {self.command} requires a region")
            if self.params:
                raise ValueError(f"params: --param applies to paper checks only, not {self.command}")
        if self.params and not self.check:
            raise ValueError("params: --param needs --check to name the check it applies to")
        return self

    def sampler(self) -> SamplerConfig:
        return SamplerConfig(seed=self.seed, n_pairs=self.samples, lambda_grid=self.lambda_grid)


def parse_run_config(data: dict[str, Any]) -> RunConfig:
    """Validate a run configuration mapping.

    Raises:
        ValueError: If the configuration is invalid (pydantic ValidationError).
    """
    return RunConfig.model_validate(data)


def load_config(config_path: Path | str) -> dict[str, Any]:
    """Load a JSON configuration file.

    Args:
        config_path: Path to the JSON file.

    Returns:
        The raw mapping, to be merged with command-line values and validated.

    Raises:
        FileNotFoundError: If config file doesn't exist.
        ValueError: If the file is not a JSON object.
    """
    config_path = Path(config_path)

    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_path) as f:
        data = json.load(f)

    if not isinstance(data, dict):
        raise ValueError(f"{config_path}: top level must be a JSON object")
    return data
