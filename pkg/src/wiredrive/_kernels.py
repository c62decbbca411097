"""Hot numeric kernels.

Every kernel exists twice: an explicit-loop version (``*_loop``) that numba
compiles, and a vectorised numpy version (``*_numpy``). The module-level name
without suffix points at whichever path ``_jit.USE_JIT`` selects. Both paths are
exercised against each other in the test-suite and in ``benchmarks/``.
"""

import math

import numpy as np

from ._jit import USE_JIT, njit

# ---------------------------------------------------------------------------
# planar two-link leg
# ---------------------------------------------------------------------------


def _leg_fk_loop(l1, l2, q):
    n = q.shape[0]
    out = np.empty((n, 2))
    for i in range(n):
        a = q[i, 0]
        b = a + q[i, 1]
        out[i, 0] = l1 * math.sin(a) + l2 * math.sin(b)
        out[i, 1] = -(l1 * math.cos(a) + l2 * math.cos(b))
    return out


def _leg_fk_numpy(l1, l2, q):
    a = q[:, 0]
    b = a + q[:, 1]
    return np.stack(
        [l1 * np.sin(a) + l2 * np.sin(b), -(l1 * np.cos(a) + l2 * np.cos(b))], axis=1
    )


def _leg_ik_loop(l1, l2, p, branch):
    n = p.shape[0]
    out = np.empty((n, 2))
    for i in range(n):
        x = p[i, 0]
        y = p[i, 1]
        d = math.hypot(x, y)
        k = 2.0 * l1 * l2
        # 1 + c and 1 - c as factored differences keep precision near both workspace rims
        opc = max((d - abs(l1 - l2)) * (d + abs(l1 - l2)) / k, 0.0)
        omc = max((l1 + l2 - d) * (l1 + l2 + d) / k, 0.0)
        c = 0.5 * (opc - omc)
        s = branch * math.sqrt(opc * omc)
        q2 = math.atan2(s, c)
        q1 = math.atan2(x, -y) - math.atan2(l2 * s, (l1 - l2) + l2 * opc)
        if q1 > math.pi:
            q1 -= 2.0 * math.pi
        elif q1 <= -math.pi:
            q1 += 2.0 * math.pi
        out[i, 0] = q1
        out[i, 1] = q2
    return out


def _leg_ik_numpy(l1, l2, p, branch):
    x = p[:, 0]
    y = p[:, 1]
    d = np.hypot(x, y)
    k = 2.0 * l1 * l2
    opc = np.maximum((d - abs(l1 - l2)) * (d + abs(l1 - l2)) / k, 0.0)
    omc = np.maximum((l1 + l2 - d) * (l1 + l2 + d) / k, 0.0)
    c = 0.5 * (opc - omc)
    s = branch * np.sqrt(opc * omc)
    q2 = np.arctan2(s, c)
    q1 = np.arctan2(x, -y) - np.arctan2(l2 * s, (l1 - l2) + l2 * opc)
    q1 = np.where(q1 > np.pi, q1 - 2.0 * np.pi, q1)
    q1 = np.where(q1 <= -np.pi, q1 + 2.0 * np.pi, q1)
    return np.stack([q1, q2], axis=1)


# ---------------------------------------------------------------------------
# coupling residual and the pattern search that minimises it
# ---------------------------------------------------------------------------


def _coupling_objective_loop(gf, gb, q0f, q0b, Qf, Qb):
    total = 0.0
    for i in range(Qf.shape[0]):
        df0 = Qf[i, 0] - q0f[0]
        df1 = Qf[i, 1] - q0f[1]
        db0 = Qb[i, 0] - q0b[0]
        db1 = Qb[i, 1] - q0b[1]
        # difference of the two streams, so identical streams cancel exactly
        r0 = (gf[0, 0] * df0 + gf[0, 1] * df1) - (gb[0, 0] * db0 + gb[0, 1] * db1)
        r1 = (gf[1, 0] * df0 + gf[1, 1] * df1) - (gb[1, 0] * db0 + gb[1, 1] * db1)
        total += r0 * r0 + r1 * r1
    return total


def _coupling_objective_numpy(gf, gb, q0f, q0b, Qf, Qb):
    r = (Qf - q0f) @ gf.T - (Qb - q0b) @ gb.T
    return float(np.sum(r * r))


def _decode(theta, ent_idx, ent_sign, q0_idx, gf, gb, q0f, q0b):
    for e in range(8):
        k = ent_idx[e]
        v = 0.0 if k < 0 else ent_sign[e] * theta[k]
        if e < 4:
            gf[e // 2, e % 2] = v
        else:
            gb[(e - 4) // 2, e % 2] = v
    q0f[0] = theta[q0_idx[0]]
    q0f[1] = theta[q0_idx[1]]
    q0b[0] = theta[q0_idx[2]]
    q0b[1] = theta[q0_idx[3]]


def _matrix_feasible(g, norm_lower, entry_upper):
    sq = 0.0
    for i in range(2):
        for j in range(2):
            v = g[i, j]
            if abs(v) > entry_upper:
                return False
            sq += v * v
    return math.sqrt(sq) >= norm_lower


def _pattern_search(theta0, scale, lower, upper, ent_idx, ent_sign, q0_idx,
                    Qf, Qb, norm_lower, entry_upper, bases, tol, max_iter):
    # Opportunistic poll over +-coordinate directions followed by the columns of
    # a rotating orthonormal basis; infeasible trial points are discarded.
    P = theta0.shape[0]
    theta = theta0.copy()
    trial = theta0.copy()
    gf = np.zeros((2, 2))
    gb = np.zeros((2, 2))
    q0f = np.zeros(2)
    q0b = np.zeros(2)
    _decode(theta, ent_idx, ent_sign, q0_idx, gf, gb, q0f, q0b)
    best = coupling_objective(gf, gb, q0f, q0b, Qf, Qb)
    step = 1.0
    it = 0
    n_bases = bases.shape[0]
    while step >= tol and it < max_iter:
        basis = bases[it % n_bases]
        improved = False
        for j in range(4 * P):
            sign = 1.0 if j % 2 == 0 else -1.0
            col = j // 2
            for k in range(P):
                if col < P:
                    d = 1.0 if k == col else 0.0
                else:
                    d = basis[k, col - P]
                trial[k] = theta[k] + sign * step * scale[k] * d
            inside = True
            for k in range(P):
                if trial[k] < lower[k] or trial[k] > upper[k]:
                    inside = False
                    break
            if not inside:
                continue
            _decode(trial, ent_idx, ent_sign, q0_idx, gf, gb, q0f, q0b)
            if not (_matrix_feasible(gf, norm_lower, entry_upper)
                    and _matrix_feasible(gb, norm_lower, entry_upper)):
                continue
            val = coupling_objective(gf, gb, q0f, q0b, Qf, Qb)
            if val < best:
                best = val
                for k in range(P):
                    theta[k] = trial[k]
                improved = True
                break
        if improved:
            step = min(2.0 * step, 1.0)
        else:
            step *= 0.5
        it += 1
    return theta, best, it


# ---------------------------------------------------------------------------
# decoupled-joint chain: wire routing
# ---------------------------------------------------------------------------


def _signed_angle(a0, a1, a2, b0, b1, b2, k0, k1, k2):
    c0 = a1 * b2 - a2 * b1
    c1 = a2 * b0 - a0 * b2
    c2 = a0 * b1 - a1 * b0
    return math.atan2(k0 * c0 + k1 * c1 + k2 * c2, a0 * b0 + a1 * b1 + a2 * b2)


def _rotz_inplace(R, th, out):
    c = math.cos(th)
    s = math.sin(th)
    for i in range(3):
        r0 = R[i, 0]
        r1 = R[i, 1]
        out[i, 0] = c * r0 + s * r1
        out[i, 1] = -s * r0 + c * r1
        out[i, 2] = R[i, 2]


def _chain_routing_loop(theta, twisted, a, b, h, r):
    M, J = theta.shape
    path = np.empty(M)
    wraps = np.empty((M, J, 2))
    cg = r / h
    sg = math.sqrt(max(0.0, 1.0 - cg * cg))
    R = np.empty((3, 3))
    R1 = np.empty((3, 3))
    R2 = np.empty((3, 3))
    o = np.empty(3)
    prev = np.empty(3)
    C1 = np.empty(3)
    C2 = np.empty(3)
    u1 = np.empty(3)
    for m in range(M):
        for i in range(3):
            o[i] = 0.0
            for j in range(3):
                R[i, j] = 1.0 if i == j else 0.0
        s = 1.0
        for i in range(3):
            prev[i] = s * r * R[i, 1]
        total = 0.0
        for jt in range(J):
            if twisted[jt]:
                # local frame turned a quarter turn about the long axis
                for i in range(3):
                    y_old = R[i, 1]
                    R[i, 1] = R[i, 2]
                    R[i, 2] = -y_old
            th = theta[m, jt]
            seg = 0.0
            for i in range(3):
                C1[i] = o[i] + a * R[i, 0]
                d = C1[i] + s * r * R[i, 1] - prev[i]
                seg += d * d
            total += math.sqrt(seg)
            _rotz_inplace(R, th, R1)
            for i in range(3):
                C2[i] = C1[i] + 2.0 * h * R1[i, 0]
                u1[i] = cg * R1[i, 0] + s * sg * R1[i, 1]
            k0 = R[0, 2]
            k1 = R[1, 2]
            k2 = R[2, 2]
            w1 = -s * _signed_angle(s * R[0, 1], s * R[1, 1], s * R[2, 1],
                                    u1[0], u1[1], u1[2], k0, k1, k2)
            _rotz_inplace(R1, th, R2)
            w2 = s * _signed_angle(-u1[0], -u1[1], -u1[2],
                                   -s * R2[0, 1], -s * R2[1, 1], -s * R2[2, 1],
                                   k0, k1, k2)
            cross = 0.0
            for i in range(3):
                d = (C2[i] - r * u1[i]) - (C1[i] + r * u1[i])
                cross += d * d
            total += r * w1 + math.sqrt(cross) + r * w2
            wraps[m, jt, 0] = w1
            wraps[m, jt, 1] = w2
            for i in range(3):
                prev[i] = C2[i] - s * r * R2[i, 1]
                o[i] = C2[i] + b * R2[i, 0]
                for j in range(3):
                    R[i, j] = R2[i, j]
            s = -s
        seg = 0.0
        for i in range(3):
            d = o[i] + s * r * R[i, 1] - prev[i]
            seg += d * d
        path[m] = total + math.sqrt(seg)
    return path, wraps


def _rotz_batch(th):
    c = np.cos(th)
    s = np.sin(th)
    Rz = np.zeros((th.shape[0], 3, 3))
    Rz[:, 0, 0] = c
    Rz[:, 0, 1] = -s
    Rz[:, 1, 0] = s
    Rz[:, 1, 1] = c
    Rz[:, 2, 2] = 1.0
    return Rz


def _angle_about(av, bv, k):
    return np.arctan2(np.einsum("mi,mi->m", k, np.cross(av, bv)),
                      np.einsum("mi,mi->m", av, bv))


def _chain_routing_numpy(theta, twisted, a, b, h, r):
    M, J = theta.shape
    cg = r / h
    sg = math.sqrt(max(0.0, 1.0 - cg * cg))
    twist = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
    R = np.broadcast_to(np.eye(3), (M, 3, 3)).copy()
    o = np.zeros((M, 3))
    s = 1.0
    prev = s * r * R[:, :, 1]
    total = np.zeros(M)
    wraps = np.empty((M, J, 2))
    for jt in range(J):
        if twisted[jt]:
            R = R @ twist
        Rz = _rotz_batch(theta[:, jt])
        x, y, k = R[:, :, 0], R[:, :, 1], R[:, :, 2]
        C1 = o + a * x
        total += np.linalg.norm(C1 + s * r * y - prev, axis=1)
        R1 = R @ Rz
        C2 = C1 + 2.0 * h * R1[:, :, 0]
        u1 = cg * R1[:, :, 0] + s * sg * R1[:, :, 1]
        w1 = -s * _angle_about(s * y, u1, k)
        R2 = R1 @ Rz
        w2 = s * _angle_about(-u1, -s * R2[:, :, 1], k)
        cross = np.linalg.norm((C2 - r * u1) - (C1 + r * u1), axis=1)
        total += r * w1 + cross + r * w2
        wraps[:, jt, 0] = w1
        wraps[:, jt, 1] = w2
        prev = C2 - s * r * R2[:, :, 1]
        o = C2 + b * R2[:, :, 0]
        R = R2
        s = -s
    total += np.linalg.norm(o + s * r * R[:, :, 1] - prev, axis=1)
    return total, wraps


# ---------------------------------------------------------------------------
# cubic Hermite evaluation (the spline used by the command pipeline)
# ---------------------------------------------------------------------------


def _hermite_eval_loop(tk, pk, mk, tq):
    K = tk.shape[0]
    W = pk.shape[1]
    S = tq.shape[0]
    out = np.empty((S, W))
    for i in range(S):
        t = tq[i]
        if t <= tk[0]:
            for w in range(W):
                out[i, w] = pk[0, w]
            continue
        if t >= tk[K - 1]:
            for w in range(W):
                out[i, w] = pk[K - 1, w]
            continue
        j = np.searchsorted(tk, t, side="right") - 1
        hs = tk[j + 1] - tk[j]
        u = (t - tk[j]) / hs
        u2 = u * u
        u3 = u2 * u
        h00 = 2.0 * u3 - 3.0 * u2 + 1.0
        h10 = u3 - 2.0 * u2 + u
        h01 = -2.0 * u3 + 3.0 * u2
        h11 = u3 - u2
        for w in range(W):
            out[i, w] = (h00 * pk[j, w] + h10 * hs * mk[j, w]
                         + h01 * pk[j + 1, w] + h11 * hs * mk[j + 1, w])
    return out


def _hermite_eval_numpy(tk, pk, mk, tq):
    K = tk.shape[0]
    j = np.clip(np.searchsorted(tk, tq, side="right") - 1, 0, K - 2)
    hs = tk[j + 1] - tk[j]
    u = ((tq - tk[j]) / hs)[:, None]
    u2 = u * u
    u3 = u2 * u
    hh = hs[:, None]
    out = ((2.0 * u3 - 3.0 * u2 + 1.0) * pk[j] + (u3 - 2.0 * u2 + u) * hh * mk[j]
           + (-2.0 * u3 + 3.0 * u2) * pk[j + 1] + (u3 - u2) * hh * mk[j + 1])
    out[tq <= tk[0]] = pk[0]
    out[tq >= tk[-1]] = pk[-1]
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

leg_fk_loop = njit(_leg_fk_loop)
leg_ik_loop = njit(_leg_ik_loop)
coupling_objective_loop = njit(_coupling_objective_loop)
chain_routing_loop = njit(_chain_routing_loop)
hermite_eval_loop = njit(_hermite_eval_loop)

leg_fk_numpy = _leg_fk_numpy
leg_ik_numpy = _leg_ik_numpy
coupling_objective_numpy = _coupling_objective_numpy
chain_routing_numpy = _chain_routing_numpy
hermite_eval_numpy = _hermite_eval_numpy

if USE_JIT:
    leg_fk = leg_fk_loop
    leg_ik = leg_ik_loop
    coupling_objective = coupling_objective_loop
    chain_routing = chain_routing_loop
    hermite_eval = hermite_eval_loop
    _decode = njit(_decode)
    _matrix_feasible = njit(_matrix_feasible)
    _signed_angle = njit(_signed_angle)
    _rotz_inplace = njit(_rotz_inplace)
else:
    leg_fk = leg_fk_numpy
    leg_ik = leg_ik_numpy
    coupling_objective = coupling_objective_numpy
    chain_routing = chain_routing_numpy
    hermite_eval = hermite_eval_numpy

pattern_search = njit(_pattern_search)
