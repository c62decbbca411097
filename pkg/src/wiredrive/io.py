"""CSV / JSON / SVG writers.

CSV files use a header row, ',' separators, '.' decimals and LF line endings;
floats are written with ``repr`` so the same numbers always give the same bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .chain_model import EfficiencyComparison
from .command_pipeline import CommandSeries
from .gait_synthesis import LEGS, GaitPlan


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv_stream(fh, header, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        write_csv_stream(fh, header, rows)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n")


# ---------------------------------------------------------------------------
# gait plan
# ---------------------------------------------------------------------------

PLAN_HEADER = (
    ["sample", "phase"]
    + [f"{leg}_{c}" for leg in LEGS for c in ("q1", "q2")]
    + [f"{leg}_{c}" for leg in LEGS for c in ("x", "y")]
    + [f"{leg}_stance" for leg in LEGS]
    + ["wire1", "wire2", "wire3", "wire4"]
)


def plan_rows(plan: GaitPlan):
    for i in range(plan.n_samples):
        row = [i, plan.phase[i]]
        row += [plan.q[leg][i, j] for leg in LEGS for j in range(2)]
        row += [plan.feet[leg][i, j] for leg in LEGS for j in range(2)]
        row += [plan.stance[leg][i] for leg in LEGS]
        row += list(plan.wires[i])
        yield row


def write_plan_csv(plan: GaitPlan, path) -> None:
    write_csv(path, PLAN_HEADER, plan_rows(plan))


def plan_to_dict(plan: GaitPlan) -> dict:
    p = plan.params
    return {
        "parameters": {
            "stride": p.stride, "swing_height": p.swing_height,
            "samples_per_phase": p.n, "ground_offset": p.ground_offset,
            "max_joint_step": p.max_joint_step, "branch": p.branch,
            "joint_limits": {"lower": list(p.joint_limits.lower), "upper": list(p.joint_limits.upper)},
        },
        "leg": {"l1": plan.geom.l1, "l2": plan.geom.l2, "ground_offset": plan.geom.ground_offset},
        "joint_convention": plan.convention.name,
        "front": plan.front.to_dict(),
        "back": plan.back.to_dict(),
        "phase": plan.phase.tolist(),
        "legs": {
            leg: {
                "q_kinematic": plan.q[leg],
                "q_joint": plan.joint_coordinates(leg),
                "foot": plan.feet[leg],
                "stance": plan.stance[leg],
            }
            for leg in LEGS
        },
        "wires": plan.wires,
        "metrics": plan.metrics(),
    }


def plot_foot_traces(plan: GaitPlan, path) -> None:
    fig, plt = _figure()
    ax = fig.add_subplot(111)
    g = plan.geom.ground_offset
    for leg, style in zip(LEGS, ("-", "--", ":", "-.")):
        f = plan.feet[leg]
        ax.plot(f[:, 0], f[:, 1], style, label=leg)
    ax.axhline(-g, color="k", lw=0.8)
    ax.set_xlabel("x [mm]")
    ax.set_ylabel("y [mm]")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend()
    _save(fig, plt, path)


# ---------------------------------------------------------------------------
# commands, chain, efficiency
# ---------------------------------------------------------------------------


def write_commands_csv(cmds: CommandSeries, path) -> None:
    W = cmds.lengths.shape[1]
    header = ["t"] + [f"l{j + 1}" for j in range(W)]
    write_csv(path, header, ([t, *row] for t, row in zip(cmds.t, cmds.lengths)))


EFFICIENCY_HEADER = ["bend_rad", "chain_min", "chain_max", "tsm_min", "tsm_max"]


def write_efficiency_csv(cmp: EfficiencyComparison, path) -> None:
    write_csv(path, EFFICIENCY_HEADER, cmp.rows())


def plot_efficiency(cmp: EfficiencyComparison, path) -> None:
    fig, plt = _figure()
    ax = fig.add_subplot(111)
    ax.fill_between(cmp.bend, cmp.chain_min, cmp.chain_max, alpha=0.5, label="decoupled-joint chain")
    ax.fill_between(cmp.bend, cmp.tsm_min, cmp.tsm_max, alpha=0.5, label="tendon sheath")
    ax.set_xlabel("cumulative bend [rad]")
    ax.set_ylabel("transmission efficiency")
    ax.set_ylim(0, 1.05)
    ax.legend()
    _save(fig, plt, path)


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "wiredrive"
    return plt.figure(figsize=(6, 4)), plt


def _save(fig, plt, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
