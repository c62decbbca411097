import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from wiredrive import _kernels
from wiredrive.chain_model import (
    ChainConfiguration, ChainSpec, EfficiencyBands, EfficiencyModel, baseline_length,
    chain_forward_kinematics, crossover_bend, efficiency_comparison, joint_transform, tip_pose,
    transmission_efficiency, wire_path_length, wire_routing, wrap_angles,
)
from wiredrive.errors import JointLimitError

CHAIN = ChainSpec()
CONFIG_P = ChainConfiguration([0.2, 0, -0.15, 0, 0.1, 0, 0])


def tip_oracle(spec, theta):
    """Walk the chain with scipy rotations: run, half bend, pulley gap, half bend, run."""
    R = Rotation.identity()
    pos = np.zeros(3)
    a = spec.straight_length
    for kind, th in zip(spec.axis_pattern, theta):
        if kind == "twisted":
            R = R * Rotation.from_euler("x", 90, degrees=True)
        pos = pos + R.apply([a, 0, 0])
        R = R * Rotation.from_rotvec([0, 0, th])
        pos = pos + R.apply([2 * spec.half_spacing, 0, 0])
        R = R * Rotation.from_rotvec([0, 0, th])
        pos = pos + R.apply([a, 0, 0])
    return pos, R.as_matrix()


def test_defaults():
    assert CHAIN.links == 7 and CHAIN.pulley_count == 14
    assert CHAIN.axis_pattern[:3] == ("parallel", "twisted", "parallel")
    assert CHAIN.diameter_ratio == 15.0
    assert CHAIN.tangent_angle == pytest.approx(math.pi / 2)


def test_straight_chain_baseline():
    L0 = wire_path_length(CHAIN, ChainConfiguration.zeros(CHAIN))
    assert L0 == pytest.approx(baseline_length(CHAIN), abs=1e-9)
    # every joint wraps half a turn on touching pulleys
    runs = CHAIN.straight_length * (2 * CHAIN.links) + CHAIN.links * math.pi * CHAIN.pulley_radius
    twist_excess = sum(math.hypot(2 * CHAIN.straight_length, CHAIN.pulley_radius * math.sqrt(2))
                       - 2 * CHAIN.straight_length for k in CHAIN.axis_pattern if k == "twisted")
    assert L0 == pytest.approx(runs + twist_excess, abs=1e-9)


def test_all_parallel_baseline_is_textbook_sum():
    spec = ChainSpec(axis_pattern=("parallel",) * 7)
    L0 = wire_path_length(spec, ChainConfiguration.zeros(spec))
    assert L0 == pytest.approx(7 * 174 - 7 * 30 + 7 * math.pi * 15, abs=1e-9)


def test_decoupling_over_random_configurations(rng):
    th = rng.uniform(-CHAIN.joint_limit, CHAIN.joint_limit, (1000, CHAIN.links))
    path, wraps = wire_routing(CHAIN, th)
    L0 = wire_path_length(CHAIN, ChainConfiguration.zeros(CHAIN))
    assert np.max(np.abs(path - L0)) < 1e-9
    assert np.max(np.abs(wraps.sum(axis=2) - math.pi)) < 1e-9


def test_wrap_angles_follow_half_angle():
    w = wrap_angles(CHAIN, CONFIG_P)
    expected = np.stack([CHAIN.tangent_angle - CONFIG_P.theta, CHAIN.tangent_angle + CONFIG_P.theta], 1)
    assert w == pytest.approx(expected, abs=1e-12)


def test_single_joint_at_limit():
    spec = ChainSpec(links=1, axis_pattern=("parallel",))
    at_limit = wire_path_length(spec, ChainConfiguration([spec.joint_limit]))
    assert at_limit == pytest.approx(wire_path_length(spec, ChainConfiguration([0.0])), abs=1e-9)


def test_separated_pulleys_still_decouple(rng):
    spec = ChainSpec(half_spacing=20.0, joint_limit=0.5)
    th = rng.uniform(-0.5, 0.5, (200, spec.links))
    path, wraps = wire_routing(spec, th)
    assert np.ptp(path) < 1e-9
    assert wraps.sum(axis=2) == pytest.approx(2 * math.asin(15 / 20), abs=1e-12)
    assert path[0] == pytest.approx(baseline_length(spec), abs=1e-9)


def test_limits_and_validation():
    with pytest.raises(JointLimitError):
        wire_path_length(CHAIN, ChainConfiguration([1.2, 0, 0, 0, 0, 0, 0]))
    with pytest.raises(ValueError):
        wire_path_length(CHAIN, ChainConfiguration([0.0] * 6))
    with pytest.raises(ValueError):
        ChainSpec(half_spacing=30.0)  # default limit pi/3 exceeds asin(1/2)
    with pytest.raises(ValueError):
        ChainSpec(half_spacing=10.0)
    with pytest.raises(ValueError):
        ChainSpec(axis_pattern=("parallel",) * 6)
    with pytest.raises(ValueError):
        ChainSpec(wire_diameter=40)


def test_straight_tip():
    T = tip_pose(CHAIN, ChainConfiguration.zeros(CHAIN))
    assert T[:3, 3] == pytest.approx((7 * 174, 0, 0), abs=1e-9)


def test_single_parallel_link_quarter_turn():
    spec = ChainSpec(links=1, axis_pattern=("parallel",), half_spacing=16.0, joint_limit=0.9)
    T = tip_pose(spec, ChainConfiguration([math.pi / 4]))
    assert T[:3, :3] == pytest.approx(Rotation.from_rotvec([0, 0, math.pi / 2]).as_matrix(), abs=1e-12)


def test_tip_pose_against_rotation_oracle():
    T = tip_pose(CHAIN, CONFIG_P)
    pos, R = tip_oracle(CHAIN, CONFIG_P.theta)
    assert T[:3, 3] == pytest.approx(pos, abs=1e-9)
    assert T[:3, :3] == pytest.approx(R, abs=1e-12)
    assert T[:3, 3] == pytest.approx((1123.5631, 344.2788, -228.9243), abs=1e-3)


def test_fk_prefix_suffix_composition(rng):
    th = rng.uniform(-0.9, 0.9, CHAIN.links)
    poses = chain_forward_kinematics(CHAIN, ChainConfiguration(th))
    for k in range(1, CHAIN.links):
        suffix = np.eye(4)
        for i in range(k, CHAIN.links):
            suffix = suffix @ joint_transform(CHAIN, i, th[i])
        assert poses[k - 1] @ suffix == pytest.approx(poses[-1], abs=1e-9)


half = st.floats(-math.pi / 3, math.pi / 3, allow_nan=False)


@given(st.lists(half, min_size=7, max_size=7))
def test_decoupling_property(theta):
    path, wraps = wire_routing(CHAIN, np.array([theta]))
    assert path[0] == pytest.approx(baseline_length(CHAIN), abs=1e-9)
    assert wraps[0].sum(axis=1) == pytest.approx(math.pi, abs=1e-9)


@given(st.lists(half, min_size=7, max_size=7))
def test_loop_and_numpy_routing_agree(theta):
    th = np.array([theta])
    args = (CHAIN.twisted_mask, CHAIN.straight_length, CHAIN.straight_length,
            CHAIN.half_spacing, CHAIN.pulley_radius)
    p1, w1 = _kernels.chain_routing_loop(th, *args)
    p2, w2 = _kernels.chain_routing_numpy(th, *args)
    assert p1 == pytest.approx(p2, abs=1e-9)
    assert w1 == pytest.approx(w2, abs=1e-12)


def test_efficiency_examples():
    lo = transmission_efficiency(EfficiencyModel("chain", 0.98), 3.0)
    hi = transmission_efficiency(EfficiencyModel("chain", 0.99), 0.0)
    assert lo == pytest.approx(0.98 ** 14, rel=1e-15) == pytest.approx(0.7536, abs=1e-4)
    assert hi == pytest.approx(0.8687, abs=1e-4)
    assert transmission_efficiency(EfficiencyModel("tsm", mu=0.3), 0.0) == 1.0
    assert transmission_efficiency(EfficiencyModel("tsm", mu=0.2), 2 * math.pi) == pytest.approx(
        math.exp(-0.4 * math.pi), rel=1e-15)
    assert math.exp(-0.4 * math.pi) == pytest.approx(0.2846, abs=1e-4)
    with pytest.raises(ValueError):
        EfficiencyModel("rope")
    with pytest.raises(ValueError):
        transmission_efficiency(EfficiencyModel("tsm"), -1.0)


def test_crossover():
    assert crossover_bend(0.75, 0.04) == pytest.approx(7.192, abs=1e-3)
    cmp = efficiency_comparison(np.linspace(0, 4 * math.pi, 41))
    assert cmp.crossover == pytest.approx(-math.log(0.98 ** 14) / 0.04, rel=1e-12)
    assert math.exp(-0.04 * cmp.crossover) == pytest.approx(cmp.chain_min[0], rel=1e-12)


def test_comparison_table_shape():
    cmp = efficiency_comparison(np.linspace(0, 4 * math.pi, 41), EfficiencyBands())
    assert np.ptp(cmp.chain_min) == 0 and np.ptp(cmp.chain_max) == 0
    assert np.all(np.diff(cmp.tsm_min) < 0) and np.all(np.diff(cmp.tsm_max) < 0)
    assert np.all(cmp.tsm_min <= cmp.tsm_max)
    with pytest.raises(ValueError):
        EfficiencyBands(per_pulley=(0.99, 0.98))


@given(st.lists(st.floats(0, 50), min_size=2, max_size=20, unique=True), st.floats(1e-3, 1))
def test_tsm_non_increasing_and_exponential(bends, mu):
    b = np.sort(bends)
    e = transmission_efficiency(EfficiencyModel("tsm", mu=mu), b)
    assert np.all(np.diff(e) <= 0)
    assert e == pytest.approx(np.exp(-mu * b), rel=1e-15)
