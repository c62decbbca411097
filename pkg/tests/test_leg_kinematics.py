import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import fsolve

from wiredrive.errors import UnreachableTargetError, UnreachableTrajectoryError
from wiredrive.leg_kinematics import (
    ELBOW_NEGATIVE, ELBOW_POSITIVE, FootPosition, JointAngles, JointLimits, LegGeometry,
    forward_kinematics, forward_kinematics_batch, inverse_kinematics, inverse_kinematics_batch,
    reachable, reachable_batch,
)

GEOM = LegGeometry()


def fk_oracle(l1, l2, q1, q2):
    # foot as a sum of two rotated complex links, angles measured from straight down
    z = -1j * (l1 * np.exp(1j * q1) + l2 * np.exp(1j * (q1 + q2)))
    return z.real, z.imag


def test_forward_examples():
    assert forward_kinematics(GEOM, JointAngles(0, 0)).as_array() == pytest.approx((0, -250), abs=1e-12)
    assert forward_kinematics(GEOM, JointAngles(math.pi / 2, 0)).as_array() == pytest.approx((250, 0), abs=1e-12)
    p = forward_kinematics(GEOM, JointAngles(0, 1.2870022))
    assert (p.x, p.y) == pytest.approx(fk_oracle(125, 125, 0, 1.2870022), abs=1e-12)
    assert (p.x, p.y) == pytest.approx((119.98, -160.0), abs=0.03)


def test_inverse_stance_point_matches_root_finder():
    q = inverse_kinematics(GEOM, FootPosition(0, -200))

    def resid(v):
        x, y = fk_oracle(125, 125, *v)
        return [x, y + 200]

    ref = fsolve(resid, [-0.5, 1.2], xtol=1e-14)
    assert q.q2 == pytest.approx(math.acos(0.28), abs=1e-12)
    assert q.q2 == pytest.approx(1.2870022, abs=1e-7)
    assert (q.q1, q.q2) == pytest.approx(tuple(ref), abs=1e-10)
    # symmetric links: the shoulder sits half the knee angle behind the vertical
    assert q.q1 == pytest.approx(-q.q2 / 2, abs=1e-12)
    assert q.q1 == pytest.approx(-0.6435011088, abs=1e-9)


def test_inverse_boundary_and_unreachable():
    q = inverse_kinematics(GEOM, FootPosition(0, -250))
    assert (q.q1, q.q2) == pytest.approx((0, 0), abs=1e-12)
    with pytest.raises(UnreachableTargetError):
        inverse_kinematics(GEOM, FootPosition(300, 0))
    with pytest.raises(UnreachableTargetError):
        inverse_kinematics(LegGeometry(100, 150, 45), FootPosition(0, -40))
    with pytest.raises(UnreachableTargetError) as ei:
        inverse_kinematics_batch(GEOM, np.array([[0, -200.0], [0, -260.0]]))
    assert ei.value.index == 1


def test_reachable_examples():
    assert reachable(GEOM, FootPosition(0, -250))
    assert not reachable(GEOM, FootPosition(0, -251))
    assert not reachable(LegGeometry(100, 150, 45), FootPosition(0, -40))
    assert reachable(LegGeometry(100, 150, 45), FootPosition(0, -50))


def test_geometry_validation():
    with pytest.raises(ValueError):
        LegGeometry(-1, 125, 200)
    with pytest.raises(UnreachableTrajectoryError):
        LegGeometry(125, 125, 260)
    with pytest.raises(ValueError):
        JointLimits((1.0, 0.0), (0.0, 1.0))


def test_both_branches_mirror():
    p = FootPosition(30, -180)
    up = inverse_kinematics(GEOM, p, ELBOW_POSITIVE)
    down = inverse_kinematics(GEOM, p, ELBOW_NEGATIVE)
    assert up.q2 == pytest.approx(-down.q2, abs=1e-12)
    for q in (up, down):
        assert forward_kinematics(GEOM, q).as_array() == pytest.approx((30, -180), abs=1e-10)


angle = st.floats(-math.pi / 2, math.pi, allow_nan=False)
knee = st.floats(1e-3, math.pi - 1e-3, allow_nan=False)


@given(angle, knee, st.sampled_from([ELBOW_POSITIVE, ELBOW_NEGATIVE]))
def test_round_trip_property(q1, k, branch):
    q = JointAngles(q1, branch * k)
    p = forward_kinematics(GEOM, q)
    back = inverse_kinematics(GEOM, p, branch)
    assert forward_kinematics(GEOM, back).as_array() == pytest.approx(p.as_array(), abs=1e-9)
    assert math.remainder(back.q1 - q1, 2 * math.pi) == pytest.approx(0, abs=1e-9)
    assert back.q2 == pytest.approx(q.q2, abs=1e-9)


@given(st.floats(-300, 300), st.floats(-300, 300),
       st.floats(50, 150), st.floats(50, 150))
def test_reachable_is_ik_domain(x, y, l1, l2):
    geom = LegGeometry(l1, l2, 0.5 * (l1 + l2))
    p = FootPosition(x, y)
    if reachable(geom, p):
        q = inverse_kinematics(geom, p)
        assert forward_kinematics(geom, q).as_array() == pytest.approx((x, y), abs=1e-9)
    else:
        with pytest.raises(UnreachableTargetError):
            inverse_kinematics(geom, p)


def test_batch_matches_scalar(rng):
    q = np.column_stack([rng.uniform(-1, 2, 50), rng.uniform(0.1, 2.5, 50)])
    P = forward_kinematics_batch(GEOM, q)
    for qi, pi in zip(q, P):
        assert forward_kinematics(GEOM, JointAngles(*qi)).as_array() == pytest.approx(pi, abs=1e-12)
    assert reachable_batch(GEOM, P).all()
    assert inverse_kinematics_batch(GEOM, P) == pytest.approx(q, abs=1e-9)
