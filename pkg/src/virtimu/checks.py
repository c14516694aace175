"""Self-check: analytic motions whose IMU readings are known in closed form.

``run_checks()`` is what ``virtimu check`` executes. Each check returns the
worst observed error next to its tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .losses import LossConfig, info_nce, info_nce_grad
from .rotation import IDENTITY, quat_compose, quat_from_axis_angle, quat_rotate
from .synthesis import WorldTrack, linear_accel_global, synthesize_track


@dataclass
class CheckResult:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)


def circle_track(rate: float, radius: float = 1.0, omega: float = 2.0, duration: float = 3.0) -> WorldTrack:
    """Sensor on a horizontal circle, x-axis pointing outward, spinning with the motion."""
    t = np.arange(int(round(duration * rate)) + 1) / rate
    pos = radius * np.stack([np.cos(omega * t), np.zeros_like(t), np.sin(omega * t)], axis=1)
    # rotating by -omega*t about +Y carries +X to (cos, 0, sin)
    ori = quat_from_axis_angle(np.tile([0.0, 1.0, 0.0], (len(t), 1)), -omega * t)
    return WorldTrack(rate, pos, ori)


def spin_track(rate: float, axis, omega: float, base=IDENTITY, n: int = 200) -> WorldTrack:
    """Constant-rate spin about a body axis, starting from orientation ``base``."""
    t = np.arange(n) / rate
    body = quat_from_axis_angle(np.tile(np.asarray(axis, float), (n, 1)), omega * t)
    return WorldTrack(rate, np.zeros((n, 3)), quat_compose(np.asarray(base, float), body))


def _stationary() -> float:
    rng = np.random.default_rng(0)
    q = quat_from_axis_angle(rng.normal(size=3), rng.uniform(0, np.pi))
    track = WorldTrack(100.0, np.tile(rng.normal(size=3), (10, 1)), np.tile(q, (10, 1)))
    imu = synthesize_track(track)
    want = _world_to_body(q, np.array([0.0, 9.8, 0.0]))
    return float(max(np.abs(imu.accel - want).max(), np.abs(imu.gyro).max()))


def _world_to_body(q, v):
    # inverse rotation via the conjugate quaternion
    conj = np.asarray(q) * np.array([1.0, -1.0, -1.0, -1.0])
    return quat_rotate(conj, v)


def _circle() -> float:
    a = linear_accel_global(circle_track(240.0))
    return float(np.abs(np.linalg.norm(a, axis=1) - 4.0).max())


def _circle_order() -> float:
    e = [np.abs(np.linalg.norm(linear_accel_global(circle_track(r)), axis=1) - 4.0).max() for r in (120.0, 240.0)]
    # passes when the 120/240 Hz error ratio is at least 3.6
    return float(max(0.0, 3.6 - e[0] / e[1]))


def _spin() -> float:
    base = quat_from_axis_angle([1.0, 2.0, 3.0], 0.7)
    imu = synthesize_track(spin_track(100.0, [0.0, 0.0, 1.0], 3.0, base))
    return float(np.abs(imu.gyro - [0.0, 0.0, 3.0]).max())


def _infonce_log_n() -> float:
    q = np.tile([0.6, 0.8], (2, 1))
    return abs(info_nce(q, q) - np.log(2.0))


def _infonce_grad() -> float:
    rng = np.random.default_rng(1)
    q, k = rng.normal(size=(3, 4)), rng.normal(size=(3, 4))
    g, _ = info_nce_grad(q, k, LossConfig())
    h = 1e-4
    fd = np.zeros_like(q)
    for idx in np.ndindex(q.shape):
        qp, qm = q.copy(), q.copy()
        qp[idx] += h
        qm[idx] -= h
        fd[idx] = (info_nce(qp, k) - info_nce(qm, k)) / (2 * h)
    return float(np.max(np.abs(fd - g) / np.maximum(np.maximum(np.abs(fd), np.abs(g)), np.abs(g).max())))


CHECKS: list[tuple[str, Callable[[], float], float]] = [
    ("stationary sensor reads +1 g along its up axis", _stationary, 1e-9),
    ("circle r=1 m, w=2 rad/s at 240 Hz has |a| = 4", _circle, 1e-3),
    ("circle acceleration converges at second order", _circle_order, 0.0),
    ("constant body-axis spin gives constant gyro", _spin, 1e-9),
    ("InfoNCE of identical rows equals log N", _infonce_log_n, 1e-12),
    ("InfoNCE gradient matches finite differences", _infonce_grad, 1e-5),
]


def run_checks() -> list[CheckResult]:
    return [CheckResult(name, fn(), tol) for name, fn, tol in CHECKS]
