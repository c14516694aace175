"""Rate conversion, range calibration and windowing of IMU data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InvalidRateError, ShapeError, ValidationError
from .rotation import slerp
from .synthesis import ImuTrace, WorldTrack

__all__ = [
    "CHANNELS",
    "ChannelStats",
    "ImuWindow",
    "resample_track",
    "resample_trace",
    "compute_stats",
    "calibrate",
    "window",
    "stack_windows",
]

CHANNELS = ("ax", "ay", "az", "gx", "gy", "gz")

# std below this is treated as a constant channel
_DEGENERATE_STD = 1e-12


@dataclass(frozen=True)
class ChannelStats:
    """Per-channel mean and population std of a 6-channel trace."""

    mean: np.ndarray
    std: np.ndarray
    count: int

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64).reshape(-1)
        std = np.array(self.std, dtype=np.float64).reshape(-1)
        if mean.shape != (6,) or std.shape != (6,):
            raise ShapeError("stats need exactly 6 channels")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(std))):
            raise ValidationError("stats contain non-finite values")
        if np.any(std < 0):
            raise ValidationError("std must be non-negative")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)
        object.__setattr__(self, "count", int(self.count))


@dataclass(frozen=True)
class ImuWindow:
    """Slice ``[start, start + length)`` of a trace as a ``(6, length)`` array."""

    start: int
    data: np.ndarray
    labels: np.ndarray | None = None

    @property
    def length(self) -> int:
        return self.data.shape[1]


def _resample_grid(n: int, src_rate: float, target: float):
    target = float(target)
    if not np.isfinite(target) or target <= 0:
        raise InvalidRateError(f"target rate must be positive, got {target}")
    if n < 2:
        raise DegenerateInputError(f"resampling needs at least 2 samples, got {n}")
    duration = (n - 1) / src_rate
    m = int(np.floor(duration * target + 1e-9)) + 1
    # positions of the new samples measured in source sample units
    s = np.arange(m) * (src_rate / target)
    idx = np.minimum(np.floor(s + 1e-9).astype(np.int64), n - 2)
    frac = np.clip(s - idx, 0.0, 1.0)
    return target, idx, frac


def _lerp(x: np.ndarray, idx: np.ndarray, frac: np.ndarray) -> np.ndarray:
    f = frac[:, None]
    return x[idx] * (1.0 - f) + x[idx + 1] * f


def resample_track(track: WorldTrack, target: float) -> WorldTrack:
    """Linear interpolation of positions and slerp of orientations onto a new uniform grid."""
    rate, idx, frac = _resample_grid(len(track), track.rate, target)
    pos = _lerp(track.position, idx, frac)
    ori = slerp(track.orientation[idx], track.orientation[idx + 1], frac)
    return WorldTrack(rate, pos, ori)


def resample_trace(trace: ImuTrace, target: float) -> ImuTrace:
    rate, idx, frac = _resample_grid(len(trace), trace.rate, target)
    return ImuTrace.from_channels(rate, _lerp(trace.data, idx, frac))


def compute_stats(trace: ImuTrace) -> ChannelStats:
    n = len(trace)
    if n < 2:
        raise DegenerateInputError(f"stats need at least 2 samples, got {n}")
    x = trace.data
    mean = x.mean(axis=0)
    std = np.sqrt(((x - mean) ** 2).mean(axis=0))
    return ChannelStats(mean, std, n)


def calibrate(synthetic: ImuTrace, ref: ChannelStats) -> ImuTrace:
    """Affinely map each channel so its mean/std match ``ref``.

    Channels that are (numerically) constant in ``synthetic`` become the
    constant ``ref.mean``.
    """
    own = compute_stats(synthetic)
    x = synthetic.data
    live = own.std >= _DEGENERATE_STD
    scale = np.where(live, ref.std / np.where(live, own.std, 1.0), 0.0)
    y = (x - own.mean) * scale + ref.mean
    return ImuTrace.from_channels(synthetic.rate, y)


def window(trace: ImuTrace, length: int, stride: int, labels=None) -> list[ImuWindow]:
    """Fixed-length windows starting at 0, stride, 2*stride, ...; partial tails dropped."""
    n = len(trace)
    if length < 1:
        raise ValidationError(f"window length must be >= 1, got {length}")
    if stride < 1:
        raise ValidationError(f"stride must be >= 1, got {stride}")
    if length > n:
        raise DegenerateInputError(f"window length {length} exceeds trace length {n}")
    if labels is not None:
        labels = np.asarray(labels)
        if labels.shape != (n,):
            raise ShapeError(f"labels must have shape ({n},), got {labels.shape}")
    data = trace.data.T
    out = []
    for t in range(0, n - length + 1, stride):
        lab = None if labels is None else labels[t : t + length].copy()
        out.append(ImuWindow(t, data[:, t : t + length].copy(), lab))
    return out


def stack_windows(windows: list[ImuWindow]) -> np.ndarray:
    """``(N, length, 6)`` batch, the layout the loss kernels expect."""
    return np.stack([w.data.T for w in windows])
