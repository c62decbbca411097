"""Trot-gait construction for the coupled front/back leg pairs.

One side of the robot runs a cycle of ``2N`` samples: in phase A the front leg
is in stance and tracks the ground line by IK while the back leg swings on the
pose dictated by the shared wires; phase B swaps the roles. The other side runs
the same cycle offset by half a period, which gives the diagonal trot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PlanInvariantError, UnreachableTargetError, UnreachableTrajectoryError
from .leg_kinematics import (
    ELBOW_POSITIVE,
    JointLimits,
    LegGeometry,
    forward_kinematics_batch,
    inverse_kinematics_batch,
    reachable_batch,
)
from .tendon_transmission import (
    INTERIOR,
    KINEMATIC,
    JointConvention,
    TendonJacobian,
    coupling_map_batch,
    coupling_residual,
)

LEGS = ("LF", "LB", "RF", "RB")

STANCE_TOL = 1e-6
COUPLING_TOL = 1e-9


@dataclass(frozen=True)
class GaitParameters:
    stride: float = 80.0
    swing_height: float = 40.0
    samples_per_phase: int = 50
    ground_offset: float = 200.0
    max_joint_step: float = 0.2
    joint_limits: JointLimits = field(default_factory=JointLimits)
    branch: int = ELBOW_POSITIVE

    def __post_init__(self):
        if not self.stride > 0:
            raise ValueError(f"stride must be positive, got {self.stride}")
        if not self.swing_height > 0:
            raise ValueError(f"swing_height must be positive, got {self.swing_height}")
        if int(self.samples_per_phase) != self.samples_per_phase or self.samples_per_phase < 2:
            raise ValueError(f"samples_per_phase must be an integer >= 2, got {self.samples_per_phase}")
        if not self.ground_offset > 0:
            raise ValueError(f"ground_offset must be positive, got {self.ground_offset}")
        if not self.max_joint_step > 0:
            raise ValueError("max_joint_step must be positive")

    @property
    def n(self) -> int:
        return int(self.samples_per_phase)

    def validate_for(self, geom: LegGeometry) -> None:
        """Raise if the stance line leaves the reachable annulus of ``geom``."""
        if geom.ground_offset != self.ground_offset:
            raise ValueError(
                f"ground offset mismatch: leg {geom.ground_offset} vs gait {self.ground_offset}"
            )
        ends = np.array([[self.stride / 2, -self.ground_offset],
                         [-self.stride / 2, -self.ground_offset],
                         [0.0, -self.ground_offset]])
        ok = reachable_batch(geom, ends)
        if not ok.all():
            x, y = ends[int(np.flatnonzero(~ok)[0])]
            raise UnreachableTrajectoryError(
                f"stance line point ({x:g}, {y:g}) is outside the reachable annulus "
                f"[{geom.inner_radius:g}, {geom.outer_radius:g}] mm",
                point=(float(x), float(y)),
            )


@dataclass(frozen=True, eq=False)
class JointSequence:
    """Kinematic joint angles of one leg, ``q[k]`` taken at sample ``index[k]``."""

    q: np.ndarray
    index: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        index = np.asarray(self.index, dtype=int)
        if q.ndim != 2 or q.shape[1] != 2 or len(index) != len(q):
            raise ValueError(f"bad joint sequence shapes q={q.shape}, index={index.shape}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "index", index)

    def __len__(self):
        return len(self.q)

    def max_step(self) -> float:
        if len(self.q) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.q, axis=0))))


def swing_arc(p: GaitParameters, u) -> np.ndarray:
    """Target swing path at progress ``u`` in [0, 1]: linear return, sine bump."""
    u = np.asarray(u, dtype=float)
    x = -p.stride / 2 + p.stride * u
    y = -p.ground_offset + p.swing_height * np.sin(np.pi * u)
    return np.stack([x, y], axis=-1)


def _stance_points(p: GaitParameters) -> np.ndarray:
    x = np.linspace(p.stride / 2, -p.stride / 2, p.n)
    return np.stack([x, np.full(p.n, -p.ground_offset)], axis=1)


def target_foot_trajectory(p: GaitParameters, geom: LegGeometry | None = None):
    """Comb-shaped targets ``(front, back)``, each ``(2N, 2)``.

    The front sequence is stance followed by swing; the back sequence is the
    same cycle rotated by ``N`` samples.
    """
    geom = geom or LegGeometry(ground_offset=p.ground_offset)
    u = np.arange(1, p.n + 1) / (p.n + 1)
    front = np.vstack([_stance_points(p), swing_arc(p, u)])
    ok = reachable_batch(geom, front)
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        raise UnreachableTrajectoryError(
            f"target sample {i} at ({front[i, 0]:g}, {front[i, 1]:g}) is unreachable",
            point=tuple(front[i]), index=i,
        )
    back = np.roll(front, p.n, axis=0)
    return front, back


def target_joint_sequences(p: GaitParameters, geom: LegGeometry,
                           convention: JointConvention = KINEMATIC):
    """IK of the comb targets in joint coordinates: ``(Qf, Qb)``."""
    front, back = target_foot_trajectory(p, geom)
    Qf = inverse_kinematics_batch(geom, front, p.branch)
    Qb = inverse_kinematics_batch(geom, back, p.branch)
    return convention.to_joint(Qf), convention.to_joint(Qb)


def stance_joint_sequence(geom: LegGeometry, p: GaitParameters) -> JointSequence:
    p.validate_for(geom)
    try:
        q = inverse_kinematics_batch(geom, _stance_points(p), p.branch)
    except UnreachableTargetError as exc:
        raise UnreachableTrajectoryError(str(exc), point=exc.point, index=exc.index) from exc
    return JointSequence(q, np.arange(p.n))


def derive_swing_sequence(stance: JointSequence, stance_t: TendonJacobian,
                          swing_t: TendonJacobian,
                          convention: JointConvention = KINEMATIC) -> JointSequence:
    """Pose of the opposite leg forced by the shared wires, sample by sample."""
    qj = coupling_map_batch(stance_t, swing_t, convention.to_joint(stance.q))
    return JointSequence(convention.to_kinematic(qj), stance.index.copy())


@dataclass(frozen=True, eq=False)
class GaitPlan:
    params: GaitParameters
    geom: LegGeometry
    front: TendonJacobian
    back: TendonJacobian
    convention: JointConvention
    phase: np.ndarray  # 'A' or 'B' per sample of the left side
    q: dict  # leg -> (2N, 2) kinematic angles
    feet: dict  # leg -> (2N, 2) foot positions in the shoulder frame
    stance: dict  # leg -> (2N,) bool
    wires: np.ndarray  # (2N, 4): left pair, right pair

    @property
    def n_samples(self) -> int:
        return len(self.phase)

    def joint_coordinates(self, leg: str) -> np.ndarray:
        return self.convention.to_joint(self.q[leg])

    def metrics(self) -> dict:
        clear = [self.feet[leg][~self.stance[leg], 1] + self.geom.ground_offset for leg in LEGS]
        track = [np.abs(self.feet[leg][self.stance[leg], 1] + self.geom.ground_offset) for leg in LEGS]
        resid = max(
            float(np.max(coupling_residual(self.front, self.back,
                                           self.joint_coordinates(f), self.joint_coordinates(b))))
            for f, b in (("LF", "LB"), ("RF", "RB"))
        )
        n = self.params.n
        w = self.wires[:, :2]
        return {
            "min_swing_clearance_mm": float(min(c.min() for c in clear)),
            "max_stance_error_mm": float(max(t.max() for t in track)),
            "max_coupling_residual_mm": resid,
            "max_step_within_phase_rad": float(max(_phase_steps(self.q[leg], n) for leg in LEGS)),
            "phase_transition_wire_jump_mm": float(max(np.max(np.abs(w[n] - w[n - 1])),
                                                       np.max(np.abs(w[0] - w[-1])))),
        }


def _phase_steps(q, n):
    return max(np.max(np.abs(np.diff(q[:n], axis=0)), initial=0.0),
               np.max(np.abs(np.diff(q[n:], axis=0)), initial=0.0))


def build_gait_plan(geom: LegGeometry, p: GaitParameters, front_t: TendonJacobian,
                    back_t: TendonJacobian, convention: JointConvention = INTERIOR) -> GaitPlan:
    n = p.n
    stance = stance_joint_sequence(geom, p)
    back_swing = derive_swing_sequence(stance, front_t, back_t, convention)   # phase A
    front_swing = derive_swing_sequence(stance, back_t, front_t, convention)  # phase B

    qf = np.vstack([stance.q, front_swing.q])
    qb = np.vstack([back_swing.q, stance.q])
    lf = (convention.to_joint(stance.q) - front_t.q0) @ front_t.g.T
    lb = (convention.to_joint(stance.q) - back_t.q0) @ back_t.g.T
    left_wires = np.vstack([lf, lb])

    front_stance = np.r_[np.ones(n, bool), np.zeros(n, bool)]
    q = {"LF": qf, "LB": qb, "RF": np.roll(qf, -n, axis=0), "RB": np.roll(qb, -n, axis=0)}
    stance_flags = {"LF": front_stance, "LB": ~front_stance,
                    "RF": np.roll(front_stance, -n), "RB": np.roll(~front_stance, -n)}
    feet = {leg: forward_kinematics_batch(geom, q[leg]) for leg in LEGS}
    wires = np.hstack([left_wires, np.roll(left_wires, -n, axis=0)])
    phase = np.array(["A"] * n + ["B"] * n)

    plan = GaitPlan(p, geom, front_t, back_t, convention, phase, q, feet, stance_flags, wires)
    check_plan(plan)
    return plan


def check_plan(plan: GaitPlan) -> None:
    """Raise :class:`PlanInvariantError` naming the first violated invariant."""
    p, g, n = plan.params, plan.geom, plan.params.n
    for f, b in (("LF", "LB"), ("RF", "RB")):
        if not np.array_equal(plan.stance[f], ~plan.stance[b]):
            raise PlanInvariantError("complementarity", f"{f} and {b} stance flags overlap")
    for leg in LEGS:
        y = plan.feet[leg][:, 1]
        st = plan.stance[leg]
        err = np.abs(y + g.ground_offset)
        bad = np.flatnonzero(st & (err > STANCE_TOL))
        if bad.size:
            raise PlanInvariantError("stance-tracking", f"{leg} stance foot off the ground by "
                                     f"{err[bad[0]]:.3g} mm at sample {bad[0]}", int(bad[0]))
        bad = np.flatnonzero(~st & (y <= -g.ground_offset))
        if bad.size:
            raise PlanInvariantError("swing-clearance", f"{leg} swing foot at y={y[bad[0]]:.6g} "
                                     f"is not above the ground at sample {bad[0]}", int(bad[0]))
        inside = p.joint_limits.contains(plan.q[leg])
        if not inside.all():
            i = int(np.flatnonzero(~inside)[0])
            raise PlanInvariantError("joint-limits", f"{leg} angles {plan.q[leg][i].tolist()} "
                                     f"outside limits at sample {i}", i)
        step = _phase_steps(plan.q[leg], n)
        if step > p.max_joint_step:
            raise PlanInvariantError("joint-step", f"{leg} joint step {step:.4g} rad exceeds "
                                     f"{p.max_joint_step} rad within a phase")
    for f, b in (("LF", "LB"), ("RF", "RB")):
        r = coupling_residual(plan.front, plan.back,
                              plan.joint_coordinates(f), plan.joint_coordinates(b))
        if r.max() > COUPLING_TOL:
            i = int(np.argmax(r))
            raise PlanInvariantError("coupling", f"{f}/{b} wire mismatch {r[i]:.3g} mm at "
                                     f"sample {i}", i)
    stance_wire = plan.wires[:, :2]
    coupled = np.where(plan.stance["LF"][:, None],
                       (plan.joint_coordinates("LB") - plan.back.q0) @ plan.back.g.T,
                       (plan.joint_coordinates("LF") - plan.front.q0) @ plan.front.g.T)
    if np.max(np.abs(stance_wire - coupled)) > COUPLING_TOL:
        raise PlanInvariantError("coupling", "wire series differs between stance and swing leg")
    for leg_l, leg_r in (("LF", "RF"), ("LB", "RB")):
        if not np.array_equal(plan.q[leg_r], np.roll(plan.q[leg_l], -n, axis=0)):
            raise PlanInvariantError("side-offset", f"{leg_r} is not {leg_l} shifted by {n}")
    if not np.array_equal(plan.wires[:, 2:], np.roll(plan.wires[:, :2], -n, axis=0)):
        raise PlanInvariantError("side-offset", "right wires are not left wires shifted by N")
    if not math.isfinite(float(np.sum(plan.wires))):
        raise PlanInvariantError("finite", "non-finite wire displacement")
