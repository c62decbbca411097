"""Project configuration: one YAML/JSON document, strictly parsed.

Unknown keys are rejected so that a misspelt unit-bearing field never falls
back silently to its default.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .chain_model import ChainSpec, EfficiencyBands
from .command_pipeline import PipelineConfig
from .gait_synthesis import GaitParameters
from .leg_kinematics import ELBOW_NEGATIVE, ELBOW_POSITIVE, JointLimits, LegGeometry
from .tendon_transmission import CONVENTIONS, DesignPair, TendonJacobian, tuned_design


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class LegSection(_Strict):
    l1: float = Field(125.0, gt=0)
    l2: float = Field(125.0, gt=0)


class JointLimitSection(_Strict):
    lower: tuple[float, float] = (-math.pi / 2, -math.pi / 2)
    upper: tuple[float, float] = (math.pi, math.pi)


class GaitSection(_Strict):
    stride: float = Field(80.0, gt=0)
    swing_height: float = Field(40.0, gt=0)
    samples_per_phase: int = Field(50, ge=2)
    ground_offset: float = Field(200.0, gt=0)
    max_joint_step: float = Field(0.2, gt=0)
    joint_limits: JointLimitSection = JointLimitSection()
    elbow_branch: Literal["positive", "negative"] = "positive"


class JacobianSection(_Strict):
    g: tuple[tuple[float, float], tuple[float, float]]
    q0: tuple[float, float]


_TUNED = tuned_design()


class TendonSection(_Strict):
    convention: Literal["interior", "kinematic"] = "interior"
    optimize: bool = False
    front: JacobianSection = JacobianSection(g=_TUNED.front.g.tolist(), q0=_TUNED.front.q0.tolist())
    back: JacobianSection = JacobianSection(g=_TUNED.back.g.tolist(), q0=_TUNED.back.q0.tolist())


class OptimizationSection(_Strict):
    norm_lower: float = Field(60.0, gt=0)
    entry_upper: float = Field(40.0, gt=0)
    zero_top_right: bool = True
    equal_diagonal: bool = True
    shared_top_left: bool = True
    starts: int = Field(32, ge=1)
    seed: int = 0
    tol: float = Field(1e-6, gt=0)
    max_iter: int = Field(10_000, ge=1)


class ChainSection(_Strict):
    links: int = Field(7, ge=1)
    link_length: float = Field(174.0, gt=0)
    axis_pattern: Optional[list[Literal["parallel", "twisted"]]] = None
    pulley_radius: float = Field(15.0, gt=0)
    wire_diameter: float = Field(2.0, gt=0)
    joint_limit: float = Field(math.pi / 3, gt=0)
    half_spacing: Optional[float] = None


class PipelineSection(_Strict):
    max_wire_speed: float = Field(50.0, gt=0)
    min_step_time: float = Field(0.01, ge=0)
    control_rate: float = Field(100.0, gt=0)
    walking_scale: float = Field(1.0, ge=1)
    cycles: int = Field(1, ge=1)


class EfficiencySection(_Strict):
    per_pulley: tuple[float, float] = (0.98, 0.99)
    mu: tuple[float, float] = (0.04, 0.2)
    pulley_count: int = Field(14, ge=0)
    bend_max: float = Field(4 * math.pi, gt=0)
    samples: int = Field(41, ge=2)

    @field_validator("per_pulley", "mu")
    @classmethod
    def _ordered(cls, v):
        if v[0] > v[1]:
            raise ValueError("band must be given as [low, high]")
        return v


class ProjectConfig(_Strict):
    leg: LegSection = LegSection()
    gait: GaitSection = GaitSection()
    tendon: TendonSection = TendonSection()
    optimization: OptimizationSection = OptimizationSection()
    chain: ChainSection = ChainSection()
    pipeline: PipelineSection = PipelineSection()
    efficiency: EfficiencySection = EfficiencySection()

    # -- domain objects -----------------------------------------------------

    def leg_geometry(self) -> LegGeometry:
        return LegGeometry(self.leg.l1, self.leg.l2, self.gait.ground_offset)

    def gait_parameters(self) -> GaitParameters:
        g = self.gait
        return GaitParameters(
            g.stride, g.swing_height, g.samples_per_phase, g.ground_offset, g.max_joint_step,
            JointLimits(tuple(g.joint_limits.lower), tuple(g.joint_limits.upper)),
            ELBOW_POSITIVE if g.elbow_branch == "positive" else ELBOW_NEGATIVE,
        )

    def convention(self):
        return CONVENTIONS[self.tendon.convention]

    def given_design(self) -> DesignPair:
        t = self.tendon
        return DesignPair(TendonJacobian(t.front.g, t.front.q0),
                          TendonJacobian(t.back.g, t.back.q0), self.convention())

    def chain_spec(self) -> ChainSpec:
        c = self.chain
        return ChainSpec(c.links, c.link_length,
                         tuple(c.axis_pattern) if c.axis_pattern else None,
                         c.pulley_radius, c.wire_diameter, c.joint_limit, c.half_spacing)

    def pipeline_config(self) -> PipelineConfig:
        p = self.pipeline
        return PipelineConfig(p.max_wire_speed, p.min_step_time, p.control_rate, p.walking_scale)

    def efficiency_bands(self) -> EfficiencyBands:
        e = self.efficiency
        return EfficiencyBands(tuple(e.per_pulley), tuple(e.mu), e.pulley_count)


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def parse_config(text: str, source: str = "<config>") -> ProjectConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"{source}: not a valid YAML/JSON document{where}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping, got {type(data).__name__}")
    try:
        return ProjectConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"{source}: {_format_validation(exc)}") from exc


def load_config(path=None) -> ProjectConfig:
    if path is None:
        return ProjectConfig()
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))


def default_config_yaml() -> str:
    return yaml.safe_dump(ProjectConfig().model_dump(mode="json"), sort_keys=False)
