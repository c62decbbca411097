"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each pair is first checked for agreement on the benchmark input. The numba
column includes no compile time (one warm-up call first). With
WIREDRIVE_DISABLE_JIT=1 the "loop" column is the uncompiled python loop.
"""

import argparse
import time

import numpy as np

from wiredrive import _kernels as K
from wiredrive._jit import USE_JIT
from wiredrive.chain_model import ChainSpec
from wiredrive.design_optimization import DesignProblem, optimize
from wiredrive.gait_synthesis import GaitParameters, build_gait_plan
from wiredrive.leg_kinematics import LegGeometry
from wiredrive.tendon_transmission import tuned_design


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    q = np.ascontiguousarray(rng.uniform(-1.0, 2.5, (200_000, 2)))
    p = K.leg_fk_numpy(125.0, 125.0, q)
    yield "leg_fk (200k)", K.leg_fk_loop, K.leg_fk_numpy, (125.0, 125.0, q)
    yield "leg_ik (200k)", K.leg_ik_loop, K.leg_ik_numpy, (125.0, 125.0, p, 1)

    g = np.array([[35.0, 0.0], [7.5, -35.0]])
    Q = np.ascontiguousarray(rng.uniform(0.5, 2.5, (100_000, 2)))
    args = (g, -g, np.array([2.6, 1.0]), np.array([1.7, 2.6]), Q, Q[::-1].copy())
    yield "coupling_objective (100k)", K.coupling_objective_loop, K.coupling_objective_numpy, args

    spec = ChainSpec()
    th = np.ascontiguousarray(rng.uniform(-spec.joint_limit, spec.joint_limit, (20_000, spec.links)))
    args = (th, spec.twisted_mask, spec.straight_length, spec.straight_length,
            spec.half_spacing, spec.pulley_radius)
    yield "chain_routing (20k x 7)", K.chain_routing_loop, K.chain_routing_numpy, args

    tk = np.cumsum(rng.uniform(0.01, 0.1, 2_000))
    pk = np.ascontiguousarray(rng.normal(size=(2_000, 4)))
    mk = np.ascontiguousarray(np.gradient(pk, tk, axis=0))
    tq = np.linspace(tk[0], tk[-1], 200_000)
    yield "hermite_eval (200k)", K.hermite_eval_loop, K.hermite_eval_numpy, (tk, pk, mk, tq)


def agree(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.allclose(x, y, rtol=1e-10, atol=1e-9, equal_nan=True) for x, y in zip(a, b))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    print(f"jit enabled: {USE_JIT}")
    print(f"{'kernel':28s} {'loop [ms]':>10s} {'numpy [ms]':>11s} {'ratio':>7s}  agree")
    for name, loop, vec, a in cases(rng):
        ok = agree(loop(*a), vec(*a))
        tl = best_of(lambda: loop(*a), args.repeat)
        tv = best_of(lambda: vec(*a), args.repeat)
        print(f"{name:28s} {tl * 1e3:10.2f} {tv * 1e3:11.2f} {tv / tl:7.2f}  {ok}")

    geom, p, d = LegGeometry(), GaitParameters(), tuned_design()
    t = best_of(lambda: build_gait_plan(geom, p, d.front, d.back), args.repeat)
    print(f"\nbuild_gait_plan (N=50): {t * 1e3:.2f} ms")
    prob = DesignProblem.from_gait(p, geom)
    t0 = time.perf_counter()
    sol = optimize(prob, starts=32, seed=0)
    print(f"optimize (32 starts, incl. compile): {time.perf_counter() - t0:.2f} s, "
          f"objective {sol.objective:.4f} mm^2")


if __name__ == "__main__":
    main()
