"""Linear wire model ``l = G (q - q0)`` and the front/back coupling it induces.

``G`` is in millimetres of wire per radian of joint motion. Joint vectors here
are in *joint coordinates*, which may differ from the leg-kinematic angles by
a fixed affine map (see :class:`JointConvention`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularJacobianError
from .leg_kinematics import JointAngles

DET_THRESHOLD = 1e-6


def _as_angles_array(q) -> np.ndarray:
    if isinstance(q, JointAngles):
        return q.as_array()
    return np.asarray(q, dtype=float)


@dataclass(frozen=True, eq=False)
class TendonJacobian:
    g: np.ndarray
    q0: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        q0 = np.array(_as_angles_array(self.q0), dtype=float)
        if g.shape != (2, 2) or q0.shape != (2,):
            raise ValueError(f"expected a 2x2 jacobian and 2-vector q0, got {g.shape} and {q0.shape}")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(q0))):
            raise ValueError("tendon jacobian entries must be finite")
        det = float(np.linalg.det(g))
        if abs(det) < DET_THRESHOLD:
            raise SingularJacobianError(
                f"tendon jacobian {g.tolist()} has |det| = {abs(det):.3g} < {DET_THRESHOLD}"
            )
        g.flags.writeable = False
        q0.flags.writeable = False
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "q0", q0)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.g))

    def to_dict(self) -> dict:
        return {"g": self.g.tolist(), "q0": self.q0.tolist()}

    def __repr__(self):
        return f"TendonJacobian(g={self.g.tolist()}, q0={self.q0.tolist()})"


@dataclass(frozen=True)
class WireDisplacement:
    l1: float
    l2: float

    def __post_init__(self):
        if not (math.isfinite(self.l1) and math.isfinite(self.l2)):
            raise ValueError("wire displacement must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.l1, self.l2], dtype=float)

    @classmethod
    def from_array(cls, v) -> WireDisplacement:
        return cls(float(v[0]), float(v[1]))


def wire_displacement(t: TendonJacobian, q: JointAngles) -> WireDisplacement:
    return WireDisplacement.from_array(t.g @ (_as_angles_array(q) - t.q0))


def joint_angles_from_wire(t: TendonJacobian, l: WireDisplacement) -> JointAngles:
    if abs(t.det) < DET_THRESHOLD:
        raise SingularJacobianError(f"|det G| = {abs(t.det):.3g} below {DET_THRESHOLD}")
    return JointAngles.from_array(t.q0 + np.linalg.solve(t.g, l.as_array()))


def coupling_matrix(front: TendonJacobian, back: TendonJacobian) -> np.ndarray:
    """``inv(G_back) @ G_front``: maps front joint displacement to back."""
    if abs(back.det) < DET_THRESHOLD:
        raise SingularJacobianError(f"back jacobian |det| = {abs(back.det):.3g}")
    return np.linalg.solve(back.g, front.g)


def coupling_map(front: TendonJacobian, back: TendonJacobian, qf: JointAngles) -> JointAngles:
    """Back-leg joint vector that shares the front leg's wire displacement."""
    return JointAngles.from_array(coupling_map_batch(front, back, _as_angles_array(qf))[0])


def coupling_map_batch(front: TendonJacobian, back: TendonJacobian, qf) -> np.ndarray:
    qf = np.atleast_2d(np.asarray(qf, dtype=float))
    if abs(back.det) < DET_THRESHOLD:
        raise SingularJacobianError(f"back jacobian |det| = {abs(back.det):.3g}")
    lf = (qf - front.q0) @ front.g.T
    return back.q0 + np.linalg.solve(back.g, lf.T).T


def coupling_residual(front: TendonJacobian, back: TendonJacobian, qf, qb) -> np.ndarray:
    """Per-sample norm of ``G_f (q_f - q0_f) - G_b (q_b - q0_b)`` in mm."""
    qf = np.atleast_2d(np.asarray(qf, dtype=float))
    qb = np.atleast_2d(np.asarray(qb, dtype=float))
    r = (qf - front.q0) @ front.g.T - (qb - back.q0) @ back.g.T
    return np.linalg.norm(r, axis=1)


@dataclass(frozen=True)
class JointConvention:
    """Affine map between leg-kinematic angles and joint coordinates.

    ``joint = offset + sign * kinematic`` elementwise, with each sign +-1.
    """

    name: str
    sign: tuple[float, float] = (1.0, 1.0)
    offset: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if any(s not in (1.0, -1.0) for s in self.sign):
            raise ValueError(f"convention signs must be +-1, got {self.sign}")

    def to_joint(self, q_kin) -> np.ndarray:
        return np.asarray(self.offset) + np.asarray(self.sign) * np.asarray(q_kin, dtype=float)

    def to_kinematic(self, q_joint) -> np.ndarray:
        return np.asarray(self.sign) * (np.asarray(q_joint, dtype=float) - np.asarray(self.offset))


KINEMATIC = JointConvention("kinematic")
# Thigh angle measured downward from the forward body axis; knee as the interior
# angle between the two links (pi when straight). The stored reference designs
# below are expressed in this convention.
INTERIOR = JointConvention("interior", sign=(-1.0, -1.0), offset=(math.pi / 2, math.pi))

CONVENTIONS = {c.name: c for c in (KINEMATIC, INTERIOR)}


@dataclass(frozen=True, eq=False)
class DesignPair:
    front: TendonJacobian
    back: TendonJacobian
    convention: JointConvention = field(default=INTERIOR)


def nominal_optimum() -> DesignPair:
    """Optimised design before hand tuning."""
    return DesignPair(
        TendonJacobian([[40.0, 0.0], [20.0, -40.0]], [2.2, 1.9]),
        TendonJacobian([[-40.0, 0.0], [-20.0, 40.0]], [2.2, 1.7]),
    )


def tuned_design() -> DesignPair:
    """Hand-tuned design used on the built robot."""
    return DesignPair(
        TendonJacobian([[35.0, 0.0], [7.5, -35.0]], [2.6, 1.0]),
        TendonJacobian([[-35.0, 0.0], [7.5, 35.0]], [1.7, 2.6]),
    )
