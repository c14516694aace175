"""Noise-free accelerometer and gyroscope synthesis from a sensor trajectory.

The accelerometer reports specific force in the sensor frame,
``Rᵀ (d²r/dt² − g)``, and the gyroscope reports ``Rᵀ ω_world``, where ``R``
is the sensor's local-to-world rotation. A sensor at rest therefore reads
+9.8 m/s² along whichever of its own axes points up.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, InvalidRateError, ShapeError, ValidationError
from .rotation import IDENTITY, quat_compose, quat_inverse, quat_log_angle_axis, quat_normalize, quat_rotate, quat_to_matrix
from .skeleton import MotionSequence, Skeleton, forward_kinematics_sequence

__all__ = [
    "GRAVITY",
    "SensorAttachment",
    "WorldTrack",
    "GravityModel",
    "ImuTrace",
    "extract_track",
    "linear_accel_global",
    "angular_velocity_global",
    "to_local_accel",
    "to_local_gyro",
    "synthesize",
    "synthesize_track",
]

GRAVITY = (0.0, -9.8, 0.0)


def _check_rate(rate) -> float:
    rate = float(rate)
    if not np.isfinite(rate) or rate <= 0:
        raise InvalidRateError(f"rate must be positive, got {rate}")
    return rate


def _vec3(v) -> np.ndarray:
    v = np.array(v, dtype=np.float64).reshape(-1)
    if v.shape != (3,):
        raise ShapeError(f"expected a 3-vector, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class SensorAttachment:
    """Where a virtual sensor sits on the body.

    ``mount_rotation`` is the sensor frame relative to the joint frame and
    ``mount_offset`` the sensor origin expressed in the joint frame (meters).
    """

    joint: int | str
    mount_rotation: np.ndarray = field(default_factory=lambda: IDENTITY.copy())
    mount_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "mount_rotation", quat_normalize(self.mount_rotation))
        object.__setattr__(self, "mount_offset", _vec3(self.mount_offset))


@dataclass(frozen=True)
class GravityModel:
    g_global: np.ndarray = field(default_factory=lambda: np.array(GRAVITY))

    def __post_init__(self):
        object.__setattr__(self, "g_global", _vec3(self.g_global))


@dataclass(frozen=True)
class WorldTrack:
    """Uniformly sampled world pose of one sensor.

    ``position`` is ``(T, 3)`` in meters; ``orientation`` is ``(T, 4)``
    local-to-world quaternions.
    """

    rate: float
    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        pos = np.array(self.position, dtype=np.float64)
        ori = np.asarray(self.orientation, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ShapeError(f"position must be (T, 3), got {pos.shape}")
        if ori.shape != (pos.shape[0], 4):
            raise ShapeError(f"orientation must be ({pos.shape[0]}, 4), got {ori.shape}")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(ori))):
            raise ValidationError("track contains non-finite values")
        object.__setattr__(self, "rate", _check_rate(self.rate))
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation", quat_normalize(ori) if len(ori) else ori)

    def __len__(self) -> int:
        return self.position.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) / self.rate


@dataclass(frozen=True)
class ImuTrace:
    """Sensor-frame accelerometer (m/s²) and gyroscope (rad/s) samples."""

    rate: float
    accel: np.ndarray
    gyro: np.ndarray

    def __post_init__(self):
        acc = np.array(self.accel, dtype=np.float64)
        gyr = np.array(self.gyro, dtype=np.float64)
        if acc.ndim != 2 or acc.shape[1] != 3 or gyr.shape != acc.shape:
            raise ShapeError(f"accel and gyro must both be (T, 3), got {acc.shape} and {gyr.shape}")
        if not (np.all(np.isfinite(acc)) and np.all(np.isfinite(gyr))):
            raise ValidationError("trace contains non-finite values")
        object.__setattr__(self, "rate", _check_rate(self.rate))
        object.__setattr__(self, "accel", acc)
        object.__setattr__(self, "gyro", gyr)

    @classmethod
    def from_channels(cls, rate: float, data) -> "ImuTrace":
        """Build from a ``(T, 6)`` array ordered ax, ay, az, gx, gy, gz."""
        data = np.asarray(data, dtype=np.float64)
        if data.ndim != 2 or data.shape[1] != 6:
            raise ShapeError(f"expected (T, 6) channel data, got {data.shape}")
        return cls(rate, data[:, :3], data[:, 3:])

    @property
    def data(self) -> np.ndarray:
        return np.hstack([self.accel, self.gyro])

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) / self.rate

    def __len__(self) -> int:
        return self.accel.shape[0]


def extract_track(seq: MotionSequence, sk: Skeleton, att: SensorAttachment) -> WorldTrack:
    j = sk.index(att.joint)
    pos, rot = forward_kinematics_sequence(sk, seq)
    q_joint = rot[:, j]
    orientation = quat_compose(q_joint, att.mount_rotation)
    position = pos[:, j] + quat_rotate(q_joint, att.mount_offset)
    return WorldTrack(seq.fps, position, orientation)


def _need_samples(n: int, what: str, minimum: int = 3):
    if n < minimum:
        raise DegenerateInputError(f"{what} needs at least {minimum} samples, got {n}")


def linear_accel_global(track: WorldTrack) -> np.ndarray:
    """Second derivative of position, second-order accurate at every sample.

    Interior samples use the three-point central stencil; the two endpoints
    use the one-sided stencil ``(2, -5, 4, -1)`` (falling back to the nearest
    central value when only three samples exist).
    """
    r = track.position
    n = len(r)
    _need_samples(n, "acceleration")
    out = np.empty_like(r)
    out[1:-1] = r[2:] - 2.0 * r[1:-1] + r[:-2]
    if n >= 4:
        out[0] = 2.0 * r[0] - 5.0 * r[1] + 4.0 * r[2] - r[3]
        out[-1] = 2.0 * r[-1] - 5.0 * r[-2] + 4.0 * r[-3] - r[-4]
    else:
        out[0] = out[1]
        out[-1] = out[-2]
    return out * track.rate**2


def angular_velocity_global(track: WorldTrack) -> np.ndarray:
    """World-frame angular velocity from the relative-rotation logarithm.

    Interior: ``log(q[i+1] ∘ q[i-1]⁻¹) / (2 dt)``; endpoints use the adjacent
    pair over ``dt``. Exact for rotation at constant rate about a fixed axis.
    """
    q = track.orientation
    n = len(q)
    _need_samples(n, "angular velocity")
    out = np.empty((n, 3))
    out[1:-1] = quat_log_angle_axis(quat_compose(q[2:], quat_inverse(q[:-2]))) * (track.rate / 2.0)
    out[0] = quat_log_angle_axis(quat_compose(q[1], quat_inverse(q[0]))) * track.rate
    out[-1] = quat_log_angle_axis(quat_compose(q[-1], quat_inverse(q[-2]))) * track.rate
    return out


def _world_to_local(track: WorldTrack, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (len(track), 3):
        raise ShapeError(f"expected ({len(track)}, 3) samples, got {v.shape}")
    return np.einsum("nji,nj->ni", quat_to_matrix(track.orientation), v)


def to_local_accel(track: WorldTrack, a_global, g: GravityModel | None = None) -> np.ndarray:
    g = g or GravityModel()
    return _world_to_local(track, np.asarray(a_global, dtype=np.float64) - g.g_global)


def to_local_gyro(track: WorldTrack, w_global) -> np.ndarray:
    return _world_to_local(track, w_global)


def synthesize_track(track: WorldTrack, g: GravityModel | None = None) -> ImuTrace:
    """IMU readings for a sensor following ``track``."""
    accel = to_local_accel(track, linear_accel_global(track), g)
    gyro = to_local_gyro(track, angular_velocity_global(track))
    return ImuTrace(track.rate, accel, gyro)


def synthesize(
    seq: MotionSequence, sk: Skeleton, att: SensorAttachment, g: GravityModel | None = None
) -> ImuTrace:
    """Virtual IMU attached to a skeleton joint, sampled at the motion's fps."""
    _need_samples(len(seq), "synthesis")
    return synthesize_track(extract_track(seq, sk, att), g)
