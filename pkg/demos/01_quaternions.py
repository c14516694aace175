"""Quaternion basics: wxyz storage, composition order, exp/log and slerp."""

import numpy as np

from virtimu.rotation import (
    quat_compose,
    quat_exp,
    quat_from_axis_angle,
    quat_log_angle_axis,
    quat_rotate,
    quat_to_matrix,
    slerp,
)

np.set_printoptions(precision=4, suppress=True)

# a quarter turn about +Y carries +X to -Z
yaw = quat_from_axis_angle([0, 1, 0], np.pi / 2)
print("yaw quaternion (w, x, y, z):", yaw)
print("rotates +X to", quat_rotate(yaw, [1.0, 0.0, 0.0]))

# compose(a, b) applies b first, then a
pitch = quat_from_axis_angle([1, 0, 0], np.pi / 2)
print("pitch then yaw:", quat_rotate(quat_compose(yaw, pitch), [0.0, 1.0, 0.0]))
print("matrix form:\n", quat_to_matrix(quat_compose(yaw, pitch)))

# exp and log are inverses on rotation vectors with angle < pi
v = np.array([0.3, -0.2, 0.9])
print("log(exp(v)) =", quat_log_angle_axis(quat_exp(v)), " v =", v)

# slerp walks the short arc at constant angular speed
a = quat_from_axis_angle([0, 0, 1], 0.0)
b = quat_from_axis_angle([0, 0, 1], 1.2)
for u in (0.0, 0.25, 0.5, 1.0):
    angle = np.linalg.norm(quat_log_angle_axis(slerp(a, b, u)))
    print(f"u={u:.2f} angle={angle:.3f} rad")
