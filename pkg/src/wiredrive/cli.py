"""``wiredrive`` command line.

Exit codes:
  0  success
  1  unreadable or invalid configuration (including singular jacobians)
  2  no feasible design point
  3  gait plan invariant violated or target unreachable
  4  chain configuration outside the joint limits
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from . import io
from .chain_model import (
    ChainConfiguration, baseline_length, efficiency_comparison, tip_pose, transmission_efficiency,
    EfficiencyModel, wire_path_length,
)
from .command_pipeline import cyclic_series, emit_commands
from .config import ConfigError, ProjectConfig, load_config
from .design_optimization import DesignProblem, optimize, reference_comparison
from .errors import (
    JointLimitError, NoFeasiblePointError, PlanInvariantError, UnreachableTargetError,
)
from .gait_synthesis import build_gait_plan
from .tendon_transmission import nominal_optimum

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_PLAN = 3
EXIT_CHAIN = 4

log = logging.getLogger("wiredrive")


class _Failure(Exception):
    def __init__(self, code, kind, message):
        super().__init__(message)
        self.code, self.kind = code, kind


def _emit_text(out, text):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _emit_csv(out, header, rows):
    if out in (None, "-"):
        io.write_csv_stream(sys.stdout, header, rows)
    else:
        io.write_csv(out, header, rows)


def _plot_path(args, default_name):
    if args.out in (None, "-"):
        return Path(default_name)
    out = Path(args.out)
    return out / default_name if out.suffix == "" else out.with_suffix(".svg")


def _summary(msg):
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------


def _design_problem(cfg: ProjectConfig) -> DesignProblem:
    o = cfg.optimization
    return DesignProblem.from_gait(
        cfg.gait_parameters(), cfg.leg_geometry(), cfg.convention(),
        norm_lower=o.norm_lower, entry_upper=o.entry_upper, zero_top_right=o.zero_top_right,
        equal_diagonal=o.equal_diagonal, shared_top_left=o.shared_top_left,
    )


def _solve(cfg: ProjectConfig, seed, starts=None):
    o = cfg.optimization
    problem = _design_problem(cfg)
    seed = o.seed if seed is None else seed
    starts = o.starts if starts is None else starts
    sol = optimize(problem, starts=starts, seed=seed, tol=o.tol, max_iter=o.max_iter)
    if not sol.constraint_report.feasible:
        raise NoFeasiblePointError("best point found violates the design constraints")
    return problem, sol, seed


def cmd_optimize(args, cfg: ProjectConfig) -> int:
    problem, sol, seed = _solve(cfg, args.seed, args.starts)
    report = {
        "seed": seed,
        "joint_convention": problem.convention.name,
        "samples": len(problem.Qf),
        "bounds": {"frobenius_lower": problem.norm_lower, "max_entry_upper": problem.entry_upper},
        "solution": sol.to_dict(),
        "comparison": reference_comparison(problem, sol, nominal_optimum()),
    }
    _emit_text(args.out, json.dumps(io._jsonable(report), indent=2) + "\n")
    _summary(f"objective {sol.objective:.6g} mm^2 "
             f"(reference {report['comparison']['reference_objective_mm2']:.6g} mm^2), feasible")
    return EXIT_OK


# ---------------------------------------------------------------------------
# plan-gait
# ---------------------------------------------------------------------------


def cmd_plan_gait(args, cfg: ProjectConfig) -> int:
    geom, p = cfg.leg_geometry(), cfg.gait_parameters()
    p.validate_for(geom)
    if cfg.tendon.optimize:
        _, sol, _ = _solve(cfg, args.seed)
        front, back = sol.front, sol.back
    else:
        design = cfg.given_design()
        front, back = design.front, design.back
    plan = build_gait_plan(geom, p, front, back, cfg.convention())

    out = Path(args.out or "plan_out")
    out.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        io.write_json(out / "plan.json", io.plan_to_dict(plan))
    else:
        io.write_plan_csv(plan, out / "plan.csv")
    m = plan.metrics()
    msg = (f"plan: {plan.n_samples} samples, min swing clearance "
           f"{m['min_swing_clearance_mm']:.4g} mm, coupling residual {m['max_coupling_residual_mm']:.3g} mm")

    if args.emit_commands:
        pc = cfg.pipeline_config()
        cmds = emit_commands(cyclic_series(plan.wires, cfg.pipeline.cycles), pc)
        io.write_commands_csv(cmds, out / "commands.csv")
        msg += f"; commands: {len(cmds.t)} samples over {cmds.duration:.6g} s"
    if args.plot:
        io.plot_foot_traces(plan, out / "foot_traces.svg")
    _summary(msg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate-chain
# ---------------------------------------------------------------------------

CHAIN_HEADER = (
    ["row", "status", "error", "path_length_mm", "baseline_delta_mm", "cumulative_bend_rad",
     "tip_x", "tip_y", "tip_z"]
    + [f"r{i}{j}" for i in range(1, 4) for j in range(1, 4)]
    + ["chain_eff_min", "chain_eff_max", "tsm_eff_min", "tsm_eff_max"]
)


def _load_configurations(path):
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read configurations from {path}: {exc}") from exc
    if isinstance(data, dict):
        if set(data) != {"configurations"}:
            raise ConfigError(f"{path}: expected a single 'configurations' key")
        data = data["configurations"]
    if not isinstance(data, list):
        raise ConfigError(f"{path}: configurations must be a list of half-angle lists")
    return data


def _chain_row(cfg, spec, bands, i, theta):
    base = [i]
    try:
        th = np.asarray(theta, dtype=float)
        if th.shape != (spec.links,):
            raise ValueError(f"expected {spec.links} half-angles, got shape {th.shape}")
        conf = ChainConfiguration(th)
        L = wire_path_length(spec, conf)
        T = tip_pose(spec, conf)
    except JointLimitError as exc:
        return base + ["joint-limit", str(exc)] + [""] * (len(CHAIN_HEADER) - 3), True
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"configuration row {i}: {exc}") from exc
    bend = conf.cumulative_bend()
    eff = [transmission_efficiency(EfficiencyModel("chain", e, pulley_count=bands.pulley_count), bend)
           for e in bands.per_pulley]
    tsm = [transmission_efficiency(EfficiencyModel("tsm", mu=mu), bend) for mu in bands.mu[::-1]]
    row = base + ["ok", "", L, L - baseline_length(spec), bend, *T[:3, 3], *T[:3, :3].ravel(),
                  *eff, *tsm]
    return row, False


def cmd_simulate_chain(args, cfg: ProjectConfig) -> int:
    spec, bands = cfg.chain_spec(), cfg.efficiency_bands()
    if args.configurations:
        thetas = _load_configurations(args.configurations)
    else:
        rng = np.random.default_rng(0 if args.seed is None else args.seed)
        thetas = rng.uniform(-spec.joint_limit, spec.joint_limit, (args.random, spec.links)).tolist()
        thetas.insert(0, [0.0] * spec.links)
    rows, failed = [], 0
    for i, theta in enumerate(thetas):
        row, bad = _chain_row(cfg, spec, bands, i, theta)
        rows.append(row)
        failed += bad
    if args.format == "json":
        recs = [dict(zip(CHAIN_HEADER, r)) for r in rows]
        _emit_text(args.out, json.dumps(io._jsonable(recs), indent=2) + "\n")
    else:
        _emit_csv(args.out, CHAIN_HEADER, rows)
    ok = [r[3] for r in rows if r[1] == "ok"]
    spread = (max(ok) - min(ok)) if ok else float("nan")
    _summary(f"chain: {len(rows)} configurations, {failed} over the joint limit, "
             f"path-length spread {spread:.3g} mm")
    return EXIT_CHAIN if failed else EXIT_OK


# ---------------------------------------------------------------------------
# efficiency-compare
# ---------------------------------------------------------------------------


def cmd_efficiency_compare(args, cfg: ProjectConfig) -> int:
    e = cfg.efficiency
    bend_max = e.bend_max if args.bend_max is None else args.bend_max
    samples = e.samples if args.samples is None else args.samples
    if not (bend_max > 0 and samples >= 2):
        raise ConfigError("bend range needs bend_max > 0 and at least 2 samples")
    cmp = efficiency_comparison(np.linspace(0.0, bend_max, samples), cfg.efficiency_bands())
    if args.format == "json":
        recs = [dict(zip(io.EFFICIENCY_HEADER, r)) for r in cmp.rows()]
        _emit_text(args.out, json.dumps(io._jsonable(recs), indent=2) + "\n")
    else:
        _emit_csv(args.out, io.EFFICIENCY_HEADER, cmp.rows())
    if args.plot:
        io.plot_efficiency(cmp, _plot_path(args, "efficiency.svg"))
    lo, hi = float(cmp.chain_min[0]), float(cmp.chain_max[0])
    x75 = -math.log(0.75) / cmp.bands.mu[0]
    _summary(f"chain efficiency {lo:.4f}..{hi:.4f}; best-case sheath falls below worst-case chain "
             f"beyond {cmp.crossover:.4f} rad (below 0.75 beyond {x75:.4f} rad)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _global_flags(parser, suppress):
    # flags may come before or after the subcommand; the subcommand copy must not
    # overwrite a value given before it
    def d(v):
        return argparse.SUPPRESS if suppress else v

    parser.add_argument("--config", default=d(None), help="YAML or JSON project configuration")
    parser.add_argument("--out", default=d(None), help="output file or directory ('-' for stdout)")
    parser.add_argument("--seed", type=int, default=d(None), help="override the random seed")
    parser.add_argument("--format", choices=("csv", "json"), default=d("csv"))
    parser.add_argument("--plot", action="store_true", default=d(False),
                        help="also write an SVG figure")
    parser.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(argparse.ArgumentParser(add_help=False), suppress=True)
    ap = _global_flags(argparse.ArgumentParser(
        prog="wiredrive", description="Wire-driven quadruped design and planning tools."),
        suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", parents=[common], help="optimise tendon jacobians")
    p.add_argument("--starts", type=int, help="override the number of starts")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("plan-gait", parents=[common], help="build the coupled gait plan")
    p.add_argument("--emit-commands", action="store_true", help="also write commands.csv")
    p.set_defaults(func=cmd_plan_gait)

    p = sub.add_parser("simulate-chain", parents=[common], help="evaluate chain configurations")
    p.add_argument("--configurations", help="YAML/JSON list of half-angle lists")
    p.add_argument("--random", type=int, default=100,
                   help="number of random configurations when none are given")
    p.set_defaults(func=cmd_simulate_chain)

    p = sub.add_parser("efficiency-compare", parents=[common], help="efficiency band table")
    p.add_argument("--bend-max", type=float, help="largest cumulative bend [rad]")
    p.add_argument("--samples", type=int, help="number of bend samples")
    p.set_defaults(func=cmd_efficiency_compare)
    return ap


def _run(args) -> int:
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except ConfigError as exc:
        raise _Failure(EXIT_CONFIG, "config", str(exc)) from exc
    except NoFeasiblePointError as exc:
        raise _Failure(EXIT_INFEASIBLE, "no-feasible-point", str(exc)) from exc
    except UnreachableTargetError as exc:
        raise _Failure(EXIT_PLAN, "unreachable-trajectory", str(exc)) from exc
    except PlanInvariantError as exc:
        raise _Failure(EXIT_PLAN, "plan-invariant", str(exc)) from exc
    except JointLimitError as exc:
        raise _Failure(EXIT_CHAIN, "chain-limit", str(exc)) from exc
    except ValueError as exc:
        # domain constructors reject values the schema cannot express (singular G, ...)
        raise _Failure(EXIT_CONFIG, "config", str(exc)) from exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except _Failure as f:
        print(f"error[{f.kind}]: {f}", file=sys.stderr)
        return f.code


if __name__ == "__main__":
    sys.exit(main())
