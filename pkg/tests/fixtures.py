"""Motion documents with closed-form IMU readings, built in code."""

import numpy as np

from virtimu.io import write_motion
from virtimu.rotation import IDENTITY, quat_from_axis_angle
from virtimu.skeleton import MotionSequence, Skeleton

# pelvis at the top of a 1.7 m leg, arm 1 m out along +X
NAMES = ["pelvis", "left_foot", "right_foot", "arm"]
PARENTS = [-1, 0, 0, 0]
OFFSETS = [[0, 0, 0], [0.1, -1.7, 0], [-0.1, -1.7, 0], [1.0, 0, 0]]


def circle_motion(rate=240.0, omega=2.0, duration=3.0):
    """Pelvis spins about +Y, so the arm joint runs a horizontal circle of radius 1 m."""
    sk = Skeleton(NAMES, PARENTS, OFFSETS)
    n = int(round(duration * rate)) + 1
    t = np.arange(n) / rate
    rots = np.tile(IDENTITY, (n, 4, 1))
    rots[:, 0] = quat_from_axis_angle(np.tile([0, 1, 0], (n, 1)), omega * t)
    return sk, MotionSequence(rate, np.tile([2.0, 1.7, -3.0], (n, 1)), rots)


def static_motion(n=10, rate=60.0):
    sk = Skeleton(NAMES, PARENTS, OFFSETS)
    rots = np.tile(IDENTITY, (n, 4, 1))
    return sk, MotionSequence(rate, np.tile([0.0, 1.7, 0.0], (n, 1)), rots)


def circle_document(**kw):
    return write_motion(*circle_motion(**kw))


def static_document(**kw):
    return write_motion(*static_motion(**kw))
