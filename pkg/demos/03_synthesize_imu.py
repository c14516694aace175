"""From a waving arm to a wrist-worn accelerometer and gyroscope."""

import numpy as np

from virtimu.rotation import IDENTITY, quat_from_axis_angle
from virtimu.skeleton import MotionSequence, find_feet, normalize_height, rebase_sequence, smpl_body_skeleton
from virtimu.synthesis import SensorAttachment, synthesize

np.set_printoptions(precision=3, suppress=True)

sk = normalize_height(smpl_body_skeleton())
fps = 60.0
t = np.arange(120) / fps

# the left shoulder swings back and forth at 1 Hz, the body walks forward slowly
rot = np.tile(IDENTITY, (len(t), sk.n_joints, 1))
rot[:, sk.index("left_shoulder")] = quat_from_axis_angle(np.tile([0.0, 0.0, 1.0], (len(t), 1)), 0.8 * np.sin(2 * np.pi * t))
root = np.stack([np.zeros_like(t), np.full_like(t, 0.95), 0.5 * t], axis=1)
seq = MotionSequence(fps, root, rot)

# put the feet of frame 0 at the origin, facing a fixed heading
seq = rebase_sequence(seq, sk, find_feet(sk))

imu = synthesize(seq, sk, SensorAttachment("left_wrist"))
print(f"{len(imu)} samples at {imu.rate:g} Hz")
print("accel (m/s^2), first 3 samples:\n", imu.accel[:3])
print("gyro (rad/s), first 3 samples:\n", imu.gyro[:3])
print("peak |gyro|:", np.linalg.norm(imu.gyro, axis=1).max())

# with no motion the accelerometer reads 9.8 m/s^2 straight up
still = MotionSequence(fps, root[:10] * 0, rot[:10] * 0 + IDENTITY)
print("static reading:", synthesize(still, sk, SensorAttachment("pelvis")).accel[0])
