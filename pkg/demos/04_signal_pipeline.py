"""Resample, calibrate to reference statistics, and cut into windows."""

import numpy as np

from virtimu.signal import calibrate, compute_stats, resample_trace, stack_windows, window
from virtimu.synthesis import ImuTrace

np.set_printoptions(precision=3, suppress=True)
rng = np.random.default_rng(7)

t = np.arange(600) / 60.0
synthetic = ImuTrace.from_channels(
    60.0, np.stack([np.sin(t * k) * k for k in range(1, 7)], axis=1)
)

# pretend this came from a real 30 Hz device
real = ImuTrace.from_channels(30.0, rng.normal([0, 9.8, 0, 0, 0, 0], [3, 2, 3, 1, 1, 1], size=(300, 6)))
ref = compute_stats(real)

trace = calibrate(resample_trace(synthetic, 30.0), ref)
after = compute_stats(trace)
print("reference mean:", ref.mean)
print("calibrated mean:", after.mean)
print("reference std:", ref.std)
print("calibrated std:", after.std)

batch = stack_windows(window(trace, length=60, stride=30))
print("window batch shape (N, length, channels):", batch.shape)
