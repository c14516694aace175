"""Virtual IMU synthesis from skeletal motion, plus loss kernels for
multimodal (text / pose / IMU) contrastive and multitask pretraining."""

from .errors import ParseError, ValidationError, VirtImuError
from .losses import (
    LossConfig,
    contrastive_total,
    cosine_similarity_matrix,
    cross_entropy,
    info_nce,
    info_nce_grad,
    mse_multitask,
)
from .signal import ChannelStats, ImuWindow, calibrate, compute_stats, resample_trace, resample_track, window
from .skeleton import (
    MotionSequence,
    PoseFrame,
    Skeleton,
    forward_kinematics,
    normalize_height,
    rebase_sequence,
    rest_height,
    smpl_body_skeleton,
)
from .synthesis import GravityModel, ImuTrace, SensorAttachment, WorldTrack, synthesize, synthesize_track

__version__ = "0.1.0"
