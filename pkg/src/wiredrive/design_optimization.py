"""Choose tendon jacobians and initial angles for the coupled front/back legs.

The objective is the summed squared mismatch between the wire displacement the
front leg would demand and the one the back leg would demand along the ideal
(comb) joint sequences. Constraints bound the size of the jacobians and tie
entries together so that pulleys can be shared.

Norms: the lower bound applies to the Frobenius norm, the upper bound to the
largest absolute entry. Both are inclusive at ``tol``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NoFeasiblePointError
from .gait_synthesis import GaitParameters, target_joint_sequences
from .leg_kinematics import LegGeometry
from .tendon_transmission import INTERIOR, DesignPair, JointConvention, TendonJacobian

log = logging.getLogger(__name__)

FEAS_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class DesignProblem:
    Qf: np.ndarray
    Qb: np.ndarray
    norm_lower: float = 60.0
    entry_upper: float = 40.0
    zero_top_right: bool = True
    equal_diagonal: bool = True
    shared_top_left: bool = True
    convention: JointConvention = INTERIOR

    def __post_init__(self):
        Qf = np.ascontiguousarray(self.Qf, dtype=float)
        Qb = np.ascontiguousarray(self.Qb, dtype=float)
        if Qf.shape != Qb.shape or Qf.ndim != 2 or Qf.shape[1] != 2:
            raise ValueError(f"Qf and Qb must both be (n, 2), got {Qf.shape} and {Qb.shape}")
        if len(Qf) < 4:
            raise ValueError(f"need at least 4 samples, got {len(Qf)}")
        if not (self.norm_lower > 0 and self.entry_upper > 0):
            raise ValueError("norm_lower and entry_upper must be positive")
        object.__setattr__(self, "Qf", Qf)
        object.__setattr__(self, "Qb", Qb)

    @classmethod
    def from_gait(cls, p: GaitParameters | None = None, geom: LegGeometry | None = None,
                  convention: JointConvention = INTERIOR, **kw) -> DesignProblem:
        p = p or GaitParameters()
        geom = geom or LegGeometry(ground_offset=p.ground_offset)
        Qf, Qb = target_joint_sequences(p, geom, convention)
        return cls(Qf, Qb, convention=convention, **kw)

    def objective(self, front: TendonJacobian, back: TendonJacobian) -> float:
        return objective(self.Qf, self.Qb, front, back)


def objective(Qf, Qb, front: TendonJacobian, back: TendonJacobian) -> float:
    """Sum over samples of ``|G_f (Qf[i] - q0_f) - G_b (Qb[i] - q0_b)|^2`` in mm^2."""
    Qf = np.ascontiguousarray(np.atleast_2d(Qf), dtype=float)
    Qb = np.ascontiguousarray(np.atleast_2d(Qb), dtype=float)
    if len(Qf) == 0 or Qf.shape != Qb.shape:
        raise ValueError("joint sequences must be non-empty and of equal shape")
    return float(_kernels.coupling_objective(
        np.ascontiguousarray(front.g), np.ascontiguousarray(back.g),
        np.ascontiguousarray(front.q0), np.ascontiguousarray(back.q0), Qf, Qb))


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    value: float
    bound: float
    margin: float  # >= -tol means satisfied
    satisfied: bool
    active: bool


@dataclass(frozen=True)
class ConstraintReport:
    checks: tuple

    @property
    def feasible(self) -> bool:
        return all(c.satisfied for c in self.checks)

    def __getitem__(self, name) -> ConstraintCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "checks": [
                {"name": c.name, "value": c.value, "bound": c.bound, "margin": c.margin,
                 "satisfied": c.satisfied, "active": c.active}
                for c in self.checks
            ],
        }


def check_constraints(front: TendonJacobian, back: TendonJacobian, norm_lower=60.0,
                      entry_upper=40.0, tol=FEAS_TOL, zero_top_right=True,
                      equal_diagonal=True, shared_top_left=True) -> ConstraintReport:
    checks = []

    def add(name, value, bound, margin):
        checks.append(ConstraintCheck(name, float(value), float(bound), float(margin),
                                      bool(margin >= -tol), bool(abs(margin) <= tol)))

    for tag, g in (("front", front.g), ("back", back.g)):
        fro = float(np.linalg.norm(g))
        big = float(np.max(np.abs(g)))
        add(f"{tag}.frobenius_lower", fro, norm_lower, fro - norm_lower)
        add(f"{tag}.max_entry_upper", big, entry_upper, entry_upper - big)
        if zero_top_right:
            add(f"{tag}.top_right_zero", g[0, 1], 0.0, -abs(g[0, 1]))
        if equal_diagonal:
            d = abs(abs(g[0, 0]) - abs(g[1, 1]))
            add(f"{tag}.diagonal_magnitudes_equal", d, 0.0, -d)
    if shared_top_left:
        d = abs(abs(front.g[0, 0]) - abs(back.g[0, 0]))
        add("shared_top_left_magnitude", d, 0.0, -d)
    return ConstraintReport(tuple(checks))


def problem_constraints(problem: DesignProblem, front, back, tol=FEAS_TOL) -> ConstraintReport:
    return check_constraints(front, back, problem.norm_lower, problem.entry_upper, tol,
                             problem.zero_top_right, problem.equal_diagonal,
                             problem.shared_top_left)


@dataclass(frozen=True, eq=False)
class DesignSolution:
    front: TendonJacobian
    back: TendonJacobian
    objective: float
    constraint_report: ConstraintReport
    sign_pattern: tuple
    starts: int
    evaluations_iterations: int

    def to_dict(self) -> dict:
        return {
            "front": self.front.to_dict(),
            "back": self.back.to_dict(),
            "objective_mm2": self.objective,
            "constraints": self.constraint_report.to_dict(),
            "sign_pattern": list(self.sign_pattern),
            "starts": self.starts,
            "search_iterations": self.evaluations_iterations,
        }


# ---------------------------------------------------------------------------
# parameterisation
# ---------------------------------------------------------------------------

_ENTRY_NAMES = ("f00", "f01", "f10", "f11", "b00", "b01", "b10", "b11")


@dataclass(frozen=True, eq=False)
class _Layout:
    """Maps the free parameter vector to the eight jacobian entries and q0."""

    names: tuple
    ent_idx: np.ndarray
    ent_sign: np.ndarray
    q0_idx: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    scale: np.ndarray
    signs: tuple

    def decode(self, theta):
        gf, gb = np.zeros((2, 2)), np.zeros((2, 2))
        q0f, q0b = np.zeros(2), np.zeros(2)
        for e in range(8):
            k = self.ent_idx[e]
            v = 0.0 if k < 0 else self.ent_sign[e] * theta[k]
            (gf if e < 4 else gb)[(e % 4) // 2, e % 2] = v
        q0f[:] = theta[self.q0_idx[:2]]
        q0b[:] = theta[self.q0_idx[2:]]
        return gf, gb, q0f, q0b


def _sign_patterns(problem: DesignProblem):
    n_ties = 2 * int(problem.equal_diagonal) + int(problem.shared_top_left)
    return list(itertools.product((1.0, -1.0), repeat=n_ties))


def _layout(problem: DesignProblem, signs) -> _Layout:
    U = problem.entry_upper
    names, lower, upper, scale = [], [], [], []
    idx = {}
    sign = dict.fromkeys(_ENTRY_NAMES, 1.0)
    s = iter(signs)

    def new(name, lo, hi, sc):
        names.append(name)
        lower.append(lo)
        upper.append(hi)
        scale.append(sc)
        return len(names) - 1

    gscale = U / 4
    idx["f00"] = new("front_top_left", -U, U, gscale)
    if problem.equal_diagonal:
        idx["f11"] = idx["f00"]
        sign["f11"] = next(s)
    else:
        idx["f11"] = new("front_bottom_right", -U, U, gscale)
    if problem.shared_top_left:
        idx["b00"] = idx["f00"]
        sign["b00"] = next(s)
    else:
        idx["b00"] = new("back_top_left", -U, U, gscale)
    if problem.equal_diagonal:
        idx["b11"] = idx["b00"]
        sign["b11"] = sign["b00"] * next(s)
    else:
        idx["b11"] = new("back_bottom_right", -U, U, gscale)
    idx["f10"] = new("front_bottom_left", -U, U, gscale)
    idx["b10"] = new("back_bottom_left", -U, U, gscale)
    if problem.zero_top_right:
        idx["f01"] = idx["b01"] = -1
    else:
        idx["f01"] = new("front_top_right", -U, U, gscale)
        idx["b01"] = new("back_top_right", -U, U, gscale)

    q0_idx = []
    for tag, Q in (("front", problem.Qf), ("back", problem.Qb)):
        for j in range(2):
            c = float(np.mean(Q[:, j]))
            q0_idx.append(new(f"{tag}_q0_{j + 1}", c - 2 * math.pi, c + 2 * math.pi, 0.1))

    return _Layout(
        tuple(names),
        np.array([idx[k] for k in _ENTRY_NAMES], dtype=np.int64),
        np.array([sign[k] for k in _ENTRY_NAMES], dtype=float),
        np.array(q0_idx, dtype=np.int64),
        np.array(lower), np.array(upper), np.array(scale), tuple(signs),
    )


def _feasible(problem, gf, gb) -> bool:
    for g in (gf, gb):
        if np.max(np.abs(g)) > problem.entry_upper or np.linalg.norm(g) < problem.norm_lower:
            return False
    return True


def _random_start(problem, layout, rng, tries=2000):
    centre = 0.5 * (layout.lower + layout.upper)
    for _ in range(tries):
        theta = rng.uniform(layout.lower, layout.upper)
        # q0 entries start near the mean posture rather than anywhere in +-2 pi
        theta[layout.q0_idx] = centre[layout.q0_idx] + rng.normal(0.0, 0.1, 4)
        gf, gb, _, _ = layout.decode(theta)
        if _feasible(problem, gf, gb):
            return theta
    return None


def _orthonormal_bases(rng, dim, count):
    out = np.empty((count, dim, dim))
    for i in range(count):
        qm, rm = np.linalg.qr(rng.normal(size=(dim, dim)))
        out[i] = qm * np.sign(np.diag(rm))
    return out


def _run_start(problem, k, child_seed, patterns, tol, max_iter):
    rng = np.random.default_rng(child_seed)
    layout = _layout(problem, patterns[k % len(patterns)])
    theta0 = _random_start(problem, layout, rng)
    if theta0 is None:
        return None
    bases = _orthonormal_bases(rng, len(theta0), 16)
    theta, f, iters = _kernels.pattern_search(
        theta0, layout.scale, layout.lower, layout.upper, layout.ent_idx, layout.ent_sign,
        layout.q0_idx, problem.Qf, problem.Qb, float(problem.norm_lower),
        float(problem.entry_upper), bases, float(tol), int(max_iter))
    return float(f), tuple(float(v) for v in theta), layout, int(iters)


def optimize(problem: DesignProblem, starts: int = 32, seed: int = 0, tol: float = FEAS_TOL,
             max_iter: int = 10_000) -> DesignSolution:
    """Multi-start pattern search over the structured parameterisation.

    Start ``k`` draws from the ``k``-th child of ``SeedSequence(seed)`` and uses
    sign pattern ``k mod len(patterns)``, so a run with more starts sees every
    start of a run with fewer.
    """
    if starts < 1:
        raise ValueError("need at least one start")
    patterns = _sign_patterns(problem)
    children = np.random.SeedSequence(seed).spawn(starts)
    best = None
    total_iters = 0
    for k in range(starts):
        res = _run_start(problem, k, children[k], patterns, tol, max_iter)
        if res is None:
            log.debug("start %d found no feasible initial point", k)
            continue
        f, theta, layout, iters = res
        total_iters += iters
        key = (f, theta)
        if best is None or key < best[0]:
            best = (key, layout)
    if best is None:
        raise NoFeasiblePointError(
            f"no feasible starting point in {starts} starts (norm >= {problem.norm_lower}, "
            f"max entry <= {problem.entry_upper})"
        )
    (f, theta), layout = best
    gf, gb, q0f, q0b = layout.decode(np.array(theta))
    front = TendonJacobian(gf, q0f)
    back = TendonJacobian(gb, q0b)
    return DesignSolution(
        front, back, problem.objective(front, back),
        problem_constraints(problem, front, back, tol), layout.signs, starts, total_iters,
    )


def reference_comparison(problem: DesignProblem, solution: DesignSolution,
                         reference: DesignPair) -> dict:
    ref_obj = problem.objective(reference.front, reference.back)
    report = problem_constraints(problem, reference.front, reference.back)
    return {
        "reference": {"front": reference.front.to_dict(), "back": reference.back.to_dict()},
        "reference_objective_mm2": ref_obj,
        "reference_constraints": report.to_dict(),
        "solution_objective_mm2": solution.objective,
        "solution_dominates": bool(solution.objective <= ref_obj + FEAS_TOL),
    }
