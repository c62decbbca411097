"""Planar two-link leg hanging below the shoulder.

Angles are measured from the straight-down posture; a positive angle swings
the distal end forward. The shoulder sits at the origin with ``x`` pointing
forward and ``y`` pointing up, so the ground plane is ``y = -ground_offset``.
Lengths are millimetres, angles radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import UnreachableTargetError, UnreachableTrajectoryError

ELBOW_POSITIVE = 1
ELBOW_NEGATIVE = -1


@dataclass(frozen=True)
class LegGeometry:
    l1: float = 125.0
    l2: float = 125.0
    ground_offset: float = 200.0

    def __post_init__(self):
        if not (self.l1 > 0 and self.l2 > 0):
            raise ValueError(f"link lengths must be positive, got l1={self.l1}, l2={self.l2}")
        if not (0 < self.ground_offset < self.l1 + self.l2):
            raise UnreachableTrajectoryError(
                f"ground plane {self.ground_offset} mm below the shoulder is outside "
                f"the reachable depth (0, {self.l1 + self.l2})"
            )

    @property
    def outer_radius(self) -> float:
        return self.l1 + self.l2

    @property
    def inner_radius(self) -> float:
        return abs(self.l1 - self.l2)


@dataclass(frozen=True)
class JointAngles:
    q1: float
    q2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.q1, self.q2], dtype=float)

    @classmethod
    def from_array(cls, q) -> JointAngles:
        return cls(float(q[0]), float(q[1]))


@dataclass(frozen=True)
class FootPosition:
    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    @property
    def norm(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class JointLimits:
    """Per-joint closed intervals, checked when a gait plan is validated."""

    lower: tuple[float, float] = (-math.pi / 2, -math.pi / 2)
    upper: tuple[float, float] = (math.pi, math.pi)

    def __post_init__(self):
        for lo, hi in zip(self.lower, self.upper):
            if not lo < hi:
                raise ValueError(f"empty joint interval [{lo}, {hi}]")

    def contains(self, q) -> np.ndarray:
        """Elementwise membership for an ``(n, 2)`` array (or a single pair)."""
        q = np.atleast_2d(np.asarray(q, dtype=float))
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        return np.all((q >= lo) & (q <= hi), axis=1)


def forward_kinematics(geom: LegGeometry, q: JointAngles) -> FootPosition:
    a = q.q1
    b = q.q1 + q.q2
    return FootPosition(
        geom.l1 * math.sin(a) + geom.l2 * math.sin(b),
        -(geom.l1 * math.cos(a) + geom.l2 * math.cos(b)),
    )


def reachable(geom: LegGeometry, p: FootPosition) -> bool:
    d = math.hypot(p.x, p.y)
    return geom.inner_radius <= d <= geom.outer_radius


def _annulus_message(geom, x, y):
    return (
        f"foot target ({x:.6g}, {y:.6g}) at distance {math.hypot(x, y):.6g} mm is outside "
        f"the reachable annulus [{geom.inner_radius:.6g}, {geom.outer_radius:.6g}] mm"
    )


def inverse_kinematics(
    geom: LegGeometry, p: FootPosition, branch: int = ELBOW_POSITIVE
) -> JointAngles:
    """Closed-form IK; ``branch`` selects ``q2 >= 0`` (+1) or ``q2 <= 0`` (-1)."""
    if branch not in (ELBOW_POSITIVE, ELBOW_NEGATIVE):
        raise ValueError(f"branch must be +1 or -1, got {branch}")
    if not reachable(geom, p):
        raise UnreachableTargetError(_annulus_message(geom, p.x, p.y), point=(p.x, p.y))
    q = _kernels.leg_ik(geom.l1, geom.l2, np.array([[p.x, p.y]]), float(branch))
    return JointAngles.from_array(q[0])


def forward_kinematics_batch(geom: LegGeometry, q) -> np.ndarray:
    q = np.ascontiguousarray(np.atleast_2d(q), dtype=float)
    return _kernels.leg_fk(geom.l1, geom.l2, q)


def reachable_batch(geom: LegGeometry, p) -> np.ndarray:
    p = np.atleast_2d(np.asarray(p, dtype=float))
    d = np.hypot(p[:, 0], p[:, 1])
    return (d >= geom.inner_radius) & (d <= geom.outer_radius)


def inverse_kinematics_batch(geom: LegGeometry, p, branch: int = ELBOW_POSITIVE) -> np.ndarray:
    """Vector form of :func:`inverse_kinematics` over an ``(n, 2)`` point array."""
    if branch not in (ELBOW_POSITIVE, ELBOW_NEGATIVE):
        raise ValueError(f"branch must be +1 or -1, got {branch}")
    p = np.ascontiguousarray(np.atleast_2d(p), dtype=float)
    ok = reachable_batch(geom, p)
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        x, y = p[i]
        raise UnreachableTargetError(
            f"sample {i}: " + _annulus_message(geom, x, y), point=(float(x), float(y)), index=i
        )
    return _kernels.leg_ik(geom.l1, geom.l2, p, float(branch))
