"""Turn a wire-length series into rate-sampled motor commands.

Stages: allocate knot times so no wire exceeds the speed limit between knots,
pass a C1 Catmull-Rom (cubic Hermite) curve through the knots, stretch time by
the walking scale and sample at the control rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptySeriesError, NonMonotoneTimeError

SPEED_SLACK = 1e-9


@dataclass(frozen=True)
class PipelineConfig:
    max_wire_speed: float = 50.0  # mm/s
    min_step_time: float = 0.01  # s
    control_rate: float = 100.0  # Hz
    walking_scale: float = 1.0

    def __post_init__(self):
        if not self.max_wire_speed > 0:
            raise ValueError("max_wire_speed must be positive")
        if not self.min_step_time >= 0:
            raise ValueError("min_step_time must be non-negative")
        if not self.control_rate > 0:
            raise ValueError("control_rate must be positive")
        if not self.walking_scale >= 1:
            raise ValueError(f"walking_scale must be >= 1, got {self.walking_scale}")


@dataclass(frozen=True, eq=False)
class Knots:
    t: np.ndarray  # (K,)
    values: np.ndarray  # (K, W)

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])


def allocate_times(series, cfg: PipelineConfig) -> Knots:
    """Knot times with ``dt_i = max(min_step, max_j |dl_ij| / max_speed)``."""
    l = np.asarray(series, dtype=float)
    if l.ndim == 1:
        l = l[:, None]
    if len(l) == 0:
        raise EmptySeriesError("wire series is empty")
    if len(l) < 2:
        raise EmptySeriesError("need at least two samples to allocate times")
    dt = np.maximum(cfg.min_step_time,
                    np.max(np.abs(np.diff(l, axis=0)), axis=1) / cfg.max_wire_speed)
    return Knots(np.concatenate([[0.0], np.cumsum(dt)]), l)


class WireSpline:
    """C1 piecewise-cubic interpolant through timed knots.

    Interior tangents are the non-uniform central differences
    ``(p[i+1] - p[i-1]) / (t[i+1] - t[i-1])``; the end tangents are the one-sided
    slopes of the first and last segments. Queries outside the knot span
    return the end values.
    """

    def __init__(self, t, values):
        t = np.ascontiguousarray(t, dtype=float)
        p = np.asarray(values, dtype=float)
        if p.ndim == 1:
            p = p[:, None]
        p = np.ascontiguousarray(p)
        if len(t) < 2 or len(t) != len(p):
            raise ValueError("need at least two knots with matching values")
        if np.any(np.diff(t) <= 0):
            raise NonMonotoneTimeError("knot times must be strictly increasing")
        m = np.empty_like(p)
        m[0] = (p[1] - p[0]) / (t[1] - t[0])
        m[-1] = (p[-1] - p[-2]) / (t[-1] - t[-2])
        if len(t) > 2:
            m[1:-1] = (p[2:] - p[:-2]) / (t[2:] - t[:-2])[:, None]
        self.t, self.p, self.m = t, p, m

    @property
    def span(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def __call__(self, tq):
        tq = np.asarray(tq, dtype=float)
        flat = np.ascontiguousarray(np.atleast_1d(tq).ravel())
        out = _kernels.hermite_eval(self.t, self.p, self.m, flat)
        return out[0] if tq.ndim == 0 else out.reshape(tq.shape + (self.p.shape[1],))

    def segment_coefficients(self):
        """Power-basis coefficients per segment in the local variable ``u`` in [0, 1]."""
        h = np.diff(self.t)[:, None]
        p0, p1, m0, m1 = self.p[:-1], self.p[1:], self.m[:-1], self.m[1:]
        a1 = h * m0
        a2 = 3 * (p1 - p0) - h * (2 * m0 + m1)
        a3 = 2 * (p0 - p1) + h * (m0 + m1)
        return p0, a1, a2, a3, h

    def max_speed(self) -> np.ndarray:
        """Exact per-wire maximum of ``|dl/dt|`` over the knot span."""
        _, a1, a2, a3, h = self.segment_coefficients()
        cands = [np.abs(a1), np.abs(a1 + 2 * a2 + 3 * a3)]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = -a2 / (3 * a3)
        inside = np.isfinite(u) & (u > 0) & (u < 1)
        u = np.where(inside, u, 0.0)
        cands.append(np.where(inside, np.abs(a1 + 2 * a2 * u + 3 * a3 * u * u), 0.0))
        return np.max(np.stack(cands) / h[None], axis=(0, 1))


def spline(knots: Knots) -> WireSpline:
    return WireSpline(knots.t, knots.values)


class ScaledTrajectory:
    """``base`` with time stretched by ``factor`` (query time ``t`` maps to ``t / factor``)."""

    def __init__(self, base: WireSpline, factor: float):
        self.base = base
        self.factor = float(factor)

    @property
    def duration(self) -> float:
        t0, t1 = self.base.span
        return (t1 - t0) * self.factor

    def __call__(self, t):
        return self.base(np.asarray(t, dtype=float) / self.factor)


@dataclass(frozen=True, eq=False)
class CommandSeries:
    t: np.ndarray  # (S,) seconds
    lengths: np.ndarray  # (S, W) mm
    duration: float  # length of the scaled trajectory, s
    dilation: float  # extra stretch applied to keep the spline under the speed limit
    walking_scale: float
    trajectory: ScaledTrajectory

    def speeds(self) -> np.ndarray:
        return np.abs(np.diff(self.lengths, axis=0)) / np.diff(self.t)[:, None]

    def check(self, cfg: PipelineConfig) -> None:
        dt = np.diff(self.t)
        if np.any(dt <= 0) or not np.allclose(dt, 1 / cfg.control_rate, rtol=0, atol=1e-9):
            raise ValueError("command timestamps are not uniform at the control rate")
        limit = cfg.max_wire_speed / self.walking_scale + SPEED_SLACK
        v = self.speeds()
        if v.size and v.max() > limit:
            raise ValueError(f"command speed {v.max():.6g} mm/s exceeds {limit:.6g} mm/s")


def emit_commands(series, cfg: PipelineConfig) -> CommandSeries:
    knots = allocate_times(series, cfg)
    base = spline(knots)
    vmax = float(np.max(base.max_speed()))
    # Hermite segments can overshoot the knot-to-knot slope; stretch uniformly if so
    # (roundoff-level excess is ignored; the sampled check below keeps the slack honest)
    dilation = vmax / cfg.max_wire_speed if vmax > cfg.max_wire_speed * (1 + 1e-12) else 1.0
    traj = ScaledTrajectory(base, dilation * cfg.walking_scale)
    n = int(math.ceil(traj.duration * cfg.control_rate - 1e-9))
    t = np.arange(n + 1) / cfg.control_rate
    out = CommandSeries(t, traj(t), traj.duration, dilation, cfg.walking_scale, traj)
    out.check(cfg)
    return out


def cyclic_series(wires, cycles: int = 1) -> np.ndarray:
    """Repeat a closed gait cycle and append the first sample to close the loop."""
    w = np.asarray(wires, dtype=float)
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    return np.vstack([np.tile(w, (cycles, 1)), w[:1]])
