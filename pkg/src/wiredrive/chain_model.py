"""Serial chain of decoupled joints carrying the drive wire, and its efficiency.

Each decoupled joint is a pair of synchronised hinges on two pulley centres
``2 * half_spacing`` apart. A half-angle ``theta`` bends the chain by
``2 * theta``. The wire runs along a link tangent to the first pulley, crosses
between the pulleys on their internal tangent and leaves tangent to the second
pulley along the next link. All tangent points and wrap angles are computed
from the posed geometry; nothing assumes the wrap sum is constant.

Link ``i`` follows joint ``i``. ``axis_pattern[i]`` says whether joint ``i``
hinges about the same axis as the previous joint (``"parallel"``) or about an
axis turned a quarter turn about the link's long axis (``"twisted"``). The wire
crossing a twisted link is modelled as the straight chord between its end
tangent points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import JointLimitError

AXIS_TYPES = ("parallel", "twisted")


def _default_pattern(n):
    return tuple("parallel" if i % 2 == 0 else "twisted" for i in range(n))


@dataclass(frozen=True)
class ChainSpec:
    links: int = 7
    link_length: float = 174.0
    axis_pattern: tuple = None
    pulley_radius: float = 15.0
    wire_diameter: float = 2.0
    joint_limit: float = math.pi / 3
    half_spacing: float = None  # defaults to the pulley radius (pulleys in contact)

    def __post_init__(self):
        if int(self.links) != self.links or self.links < 1:
            raise ValueError(f"links must be a positive integer, got {self.links}")
        if not (self.link_length > 0 and self.pulley_radius > 0 and self.wire_diameter > 0):
            raise ValueError("link_length, pulley_radius and wire_diameter must be positive")
        if self.wire_diameter >= 2 * self.pulley_radius:
            raise ValueError("wire diameter must be smaller than the pulley diameter")
        if self.axis_pattern is None:
            object.__setattr__(self, "axis_pattern", _default_pattern(self.links))
        object.__setattr__(self, "axis_pattern", tuple(self.axis_pattern))
        if len(self.axis_pattern) != self.links or any(a not in AXIS_TYPES for a in self.axis_pattern):
            raise ValueError(f"axis_pattern must list {self.links} of {AXIS_TYPES}")
        if self.half_spacing is None:
            object.__setattr__(self, "half_spacing", float(self.pulley_radius))
        if self.half_spacing < self.pulley_radius:
            raise ValueError("pulleys overlap: half_spacing must be >= pulley_radius")
        if self.straight_length <= 0:
            raise ValueError("link too short for the joint pulleys")
        if not 0 < self.joint_limit < self.tangent_angle:
            raise ValueError(
                f"joint_limit {self.joint_limit:.4g} rad lets the wire leave the pulleys; "
                f"it must stay below {self.tangent_angle:.4g} rad for this pulley layout"
            )

    @property
    def diameter_ratio(self) -> float:
        return 2 * self.pulley_radius / self.wire_diameter

    @property
    def tangent_angle(self) -> float:
        """Angle between the pulley centre line and the crossing wire's normal."""
        return math.asin(self.pulley_radius / self.half_spacing)

    @property
    def straight_length(self) -> float:
        """Link length on each side of a joint outside the pulley pair."""
        return self.link_length / 2 - self.half_spacing

    @property
    def pulley_count(self) -> int:
        return 2 * self.links

    @property
    def twisted_mask(self) -> np.ndarray:
        return np.array([a == "twisted" for a in self.axis_pattern], dtype=np.bool_)


@dataclass(frozen=True, eq=False)
class ChainConfiguration:
    theta: np.ndarray

    def __post_init__(self):
        th = np.array(self.theta, dtype=float).reshape(-1)
        if not np.all(np.isfinite(th)):
            raise ValueError("half-angles must be finite")
        th.flags.writeable = False
        object.__setattr__(self, "theta", th)

    @classmethod
    def zeros(cls, spec: ChainSpec) -> ChainConfiguration:
        return cls(np.zeros(spec.links))

    def cumulative_bend(self) -> float:
        return float(np.sum(np.abs(2 * self.theta)))


def _check_limits(spec: ChainSpec, theta: np.ndarray) -> None:
    if theta.shape[-1] != spec.links:
        raise ValueError(f"expected {spec.links} half-angles, got {theta.shape[-1]}")
    over = np.abs(theta) > spec.joint_limit
    if over.any():
        idx = np.argwhere(over)[0]
        raise JointLimitError(
            f"half-angle {theta[tuple(idx)]:.6g} rad at joint {idx[-1]} exceeds the limit "
            f"{spec.joint_limit:.6g} rad"
        )


def wire_routing(spec: ChainSpec, thetas) -> tuple[np.ndarray, np.ndarray]:
    """Path lengths ``(M,)`` and per-joint wrap angles ``(M, links, 2)`` for a batch."""
    th = np.ascontiguousarray(np.atleast_2d(np.asarray(thetas, dtype=float)))
    _check_limits(spec, th)
    return _kernels.chain_routing(th, spec.twisted_mask, spec.straight_length,
                                  spec.straight_length, spec.half_spacing, spec.pulley_radius)


def wire_path_length(spec: ChainSpec, config: ChainConfiguration) -> float:
    path, _ = wire_routing(spec, config.theta[None, :])
    return float(path[0])


def wrap_angles(spec: ChainSpec, config: ChainConfiguration) -> np.ndarray:
    _, wraps = wire_routing(spec, config.theta[None, :])
    return wraps[0]


def baseline_length(spec: ChainSpec) -> float:
    """Straight-chain length by hand: straight runs, internal tangents and wraps.

    A run ending at a twisted joint switches the wire offset into the
    perpendicular plane, so it is the chord ``hypot(run, r * sqrt(2))``.
    """
    r, a = spec.pulley_radius, spec.straight_length
    cross = 2 * math.sqrt(spec.half_spacing ** 2 - r ** 2)
    wrap = 2 * spec.tangent_angle * r
    total = a + spec.links * (cross + wrap)  # final run to the tip anchor
    for i, kind in enumerate(spec.axis_pattern):
        run = a if i == 0 else 2 * a
        total += math.hypot(run, r * math.sqrt(2)) if kind == "twisted" else run
    return total


def _rot(axis, angle):
    c, s = math.cos(angle), math.sin(angle)
    if axis == "z":
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    if axis == "x":
        return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    raise ValueError(axis)


_QUARTER_X = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])


def _translate(d):
    T = np.eye(4)
    T[0, 3] = d
    return T


def _homog(R):
    T = np.eye(4)
    T[:3, :3] = R
    return T


def joint_transform(spec: ChainSpec, index: int, theta: float) -> np.ndarray:
    """4x4 transform across joint ``index`` and the link that follows it."""
    T = np.eye(4)
    if spec.axis_pattern[index] == "twisted":
        T = T @ _homog(_QUARTER_X)
    a = spec.straight_length
    half = _homog(_rot("z", theta))
    return T @ _translate(a) @ half @ _translate(2 * spec.half_spacing) @ half @ _translate(a)


def chain_forward_kinematics(spec: ChainSpec, config: ChainConfiguration) -> list[np.ndarray]:
    """Homogeneous pose of every link end, base frame first excluded."""
    _check_limits(spec, config.theta)
    poses = []
    T = np.eye(4)
    for i, th in enumerate(config.theta):
        T = T @ joint_transform(spec, i, float(th))
        poses.append(T)
    return poses


def tip_pose(spec: ChainSpec, config: ChainConfiguration) -> np.ndarray:
    return chain_forward_kinematics(spec, config)[-1]


# ---------------------------------------------------------------------------
# transmission efficiency
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EfficiencyModel:
    kind: str  # "chain" or "tsm"
    per_pulley_efficiency: float = 0.985
    mu: float = 0.1
    pulley_count: int = 14

    def __post_init__(self):
        if self.kind not in ("chain", "tsm"):
            raise ValueError(f"unknown efficiency model kind {self.kind!r}")
        if not 0 < self.per_pulley_efficiency <= 1:
            raise ValueError("per-pulley efficiency must lie in (0, 1]")
        if self.mu < 0:
            raise ValueError("friction coefficient must be non-negative")
        if self.pulley_count < 0:
            raise ValueError("pulley_count must be non-negative")


def transmission_efficiency(model: EfficiencyModel, cumulative_bend) -> np.ndarray | float:
    bend = np.asarray(cumulative_bend, dtype=float)
    if np.any(bend < 0):
        raise ValueError("cumulative bend must be non-negative")
    if model.kind == "chain":
        out = np.full(bend.shape, model.per_pulley_efficiency ** model.pulley_count)
    else:
        out = np.exp(-model.mu * bend)
    return float(out) if out.ndim == 0 else out


def crossover_bend(level: float, mu: float) -> float:
    """Bend at which ``exp(-mu * bend)`` drops to ``level``."""
    return -math.log(level) / mu


@dataclass(frozen=True)
class EfficiencyBands:
    per_pulley: tuple = (0.98, 0.99)
    mu: tuple = (0.04, 0.2)
    pulley_count: int = 14

    def __post_init__(self):
        lo, hi = self.per_pulley
        if not 0 < lo <= hi <= 1:
            raise ValueError(f"bad per-pulley efficiency band {self.per_pulley}")
        lo, hi = self.mu
        if not 0 <= lo <= hi:
            raise ValueError(f"bad friction band {self.mu}")


@dataclass(frozen=True, eq=False)
class EfficiencyComparison:
    bend: np.ndarray
    chain_min: np.ndarray
    chain_max: np.ndarray
    tsm_min: np.ndarray
    tsm_max: np.ndarray
    bands: EfficiencyBands = field(default_factory=EfficiencyBands)

    def rows(self):
        return zip(self.bend, self.chain_min, self.chain_max, self.tsm_min, self.tsm_max)

    @property
    def crossover(self) -> float:
        """Bend beyond which best-case TSM is below worst-case chain."""
        return crossover_bend(float(self.chain_min[0]), self.bands.mu[0])


def efficiency_comparison(bend_samples, bands: EfficiencyBands | None = None) -> EfficiencyComparison:
    bands = bands or EfficiencyBands()
    bend = np.asarray(bend_samples, dtype=float)
    chain = [transmission_efficiency(EfficiencyModel("chain", e, pulley_count=bands.pulley_count), bend)
             for e in bands.per_pulley]
    tsm_hi = transmission_efficiency(EfficiencyModel("tsm", mu=bands.mu[0]), bend)
    tsm_lo = transmission_efficiency(EfficiencyModel("tsm", mu=bands.mu[1]), bend)
    return EfficiencyComparison(bend, np.asarray(chain[0]), np.asarray(chain[1]),
                                np.asarray(tsm_lo), np.asarray(tsm_hi), bands)
