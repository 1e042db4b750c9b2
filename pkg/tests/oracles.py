"""Independent reference computations for the kinematics tests.

Deliberately written with plain ``math`` and lists: angles between vectors
come from ``atan2(|a x b|, a . b)`` rather than ``acos``, rotations from
explicit matrices, and the elbow-yaw range map from endpoint
interpolation. Nothing here imports the package's geometry code.
"""

import math

# capture (x, y up, z away from sensor) -> body (x left, y front, z up)
CAPTURE_TO_BODY = ((1.0, 0.0, 0.0), (0.0, 0.0, -1.0), (0.0, 1.0, 0.0))


def matvec(m, v):
    return [sum(m[i][j] * v[j] for j in range(3)) for i in range(3)]


def sub(a, b):
    return [a[i] - b[i] for i in range(3)]


def dot(a, b):
    return sum(a[i] * b[i] for i in range(3))


def cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def length(a):
    return math.sqrt(dot(a, a))


def angle_between(a, b):
    return math.atan2(length(cross(a, b)), dot(a, b))


def rot_x(angle):
    c, s = math.cos(angle), math.sin(angle)
    return ((1.0, 0.0, 0.0), (0.0, c, -s), (0.0, s, c))


def body_vec(joints, start, end):
    return matvec(CAPTURE_TO_BODY, sub(list(joints[end]), list(joints[start])))


def lerp_map(x, x0, x1, y0, y1):
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0)


def range_conv(theta):
    if theta >= math.pi / 2:
        return lerp_map(theta, math.pi / 2, math.pi, -math.pi / 2, 0.0)
    if theta <= -math.pi / 2:
        return lerp_map(theta, -math.pi, -math.pi / 2, 0.0, math.pi)
    return theta


def _sign(side):
    return 1.0 if side == "left" else -1.0


def _other(side):
    return "right" if side == "left" else "left"


def shoulder_roll(joints, side):
    rs = body_vec(joints, f"{_other(side)}_shoulder", f"{side}_shoulder")
    se = body_vec(joints, f"{side}_shoulder", f"{side}_elbow")
    return _sign(side) * (angle_between(rs, se) - math.pi / 2)


def elbow_roll(joints, side):
    se = body_vec(joints, f"{side}_shoulder", f"{side}_elbow")
    eh = body_vec(joints, f"{side}_elbow", f"{side}_hand")
    return _sign(side) * (angle_between(se, eh) - math.pi)


def elbow_yaw(joints, side):
    eh = body_vec(joints, f"{side}_elbow", f"{side}_hand")
    return _sign(side) * range_conv(math.atan2(eh[2], eh[1]))


def shoulder_pitch(joints, side):
    se = body_vec(joints, f"{side}_shoulder", f"{side}_elbow")
    return math.atan2(se[2], math.hypot(se[0], se[1]))


def _head(joints):
    return matvec(rot_x(-math.pi / 2), body_vec(joints, "neck", "head"))


def head_yaw(joints, k1):
    v = _head(joints)
    return k1 * math.atan2(v[0], v[1])


def head_pitch(joints, k1, k2, yaw=None):
    v = _head(joints)
    if yaw is None:
        yaw = head_yaw(joints, k1)
    return math.atan2(v[2], v[1]) + abs(k2 * yaw)


def clip(x, lo, hi):
    return lo if x < lo else hi if x > hi else x
