"""Forward kinematics on the 22-joint body: bend an elbow, watch the wrist move."""

import numpy as np

from virtimu.rotation import IDENTITY, quat_from_axis_angle
from virtimu.skeleton import (
    PoseFrame,
    forward_kinematics,
    normalize_height,
    rest_height,
    smpl_body_skeleton,
)

np.set_printoptions(precision=3, suppress=True)

sk = smpl_body_skeleton()
print(f"{sk.n_joints} joints, rest height {rest_height(sk):.3f} m")

sk = normalize_height(sk, 1.7)
print(f"after normalization: {rest_height(sk):.6f} m")

wrist = sk.index("left_wrist")
rest = PoseFrame(np.zeros(3), np.tile(IDENTITY, (sk.n_joints, 1)))
pos, _ = forward_kinematics(sk, rest)
print("left wrist at rest:", pos[wrist])

rot = rest.rotations.copy()
rot[sk.index("left_elbow")] = quat_from_axis_angle([0, 1, 0], np.pi / 2)
pos, ori = forward_kinematics(sk, PoseFrame(np.zeros(3), rot))
print("left wrist, elbow bent 90 deg:", pos[wrist])

# bone lengths are fixed, whatever the pose
lengths = np.linalg.norm(pos[1:] - pos[list(sk.parents[1:])], axis=1)
print("largest bone length change:", np.abs(lengths - sk.bone_lengths()[1:]).max())
