"""Skeletons with constant bone lengths, pose sequences and forward kinematics.

The world frame is Y-up: gravity points along -Y.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError, HierarchyError, InvalidRateError, ShapeError, ValidationError
from .rotation import IDENTITY, quat_compose, quat_exp, quat_inverse, quat_normalize, quat_rotate

__all__ = [
    "DEFAULT_HEIGHT",
    "Skeleton",
    "PoseFrame",
    "MotionSequence",
    "forward_kinematics",
    "forward_kinematics_sequence",
    "rest_height",
    "normalize_height",
    "heading_quat",
    "rebase_sequence",
    "find_feet",
    "smpl_body_skeleton",
    "axis_angle_rotations",
]

DEFAULT_HEIGHT = 1.7
UP_AXIS = 1


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Skeleton:
    """Joint tree with fixed rest offsets.

    ``rest_offsets[i]`` is joint ``i``'s position relative to its parent, in
    the parent's rest frame, in meters. The root's offset is ignored by
    forward kinematics (the root is placed at the frame's root translation).
    """

    names: tuple[str, ...]
    parents: np.ndarray
    rest_offsets: np.ndarray

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        parents = np.asarray(self.parents, dtype=np.int64).reshape(-1)
        offsets = np.array(self.rest_offsets, dtype=np.float64)
        n = len(names)
        if n == 0:
            raise HierarchyError("skeleton has no joints")
        if len(set(names)) != n:
            raise HierarchyError("joint names must be unique")
        if parents.shape != (n,):
            raise HierarchyError(f"expected {n} parent indices, got {parents.shape[0]}")
        if offsets.shape != (n, 3):
            raise ShapeError(f"rest_offsets must have shape ({n}, 3), got {offsets.shape}")
        if not np.all(np.isfinite(offsets)):
            raise ValidationError("rest_offsets contain non-finite values")
        if parents[0] != -1 or np.count_nonzero(parents == -1) != 1:
            raise HierarchyError("joint 0 must be the single root (parent -1)")
        for i in range(1, n):
            if not 0 <= parents[i] < i:
                raise HierarchyError(
                    f"joint {i} ({names[i]!r}) has parent {parents[i]}; parents must precede children"
                )
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "parents", _readonly(parents))
        object.__setattr__(self, "rest_offsets", _readonly(offsets))

    @property
    def n_joints(self) -> int:
        return len(self.names)

    def index(self, joint: int | str) -> int:
        """Resolve a joint name or index, raising ``ValidationError`` if unknown."""
        if isinstance(joint, (int, np.integer)):
            if not 0 <= joint < self.n_joints:
                raise ValidationError(f"joint index {joint} out of range (0..{self.n_joints - 1})")
            return int(joint)
        try:
            return self.names.index(joint)
        except ValueError:
            raise ValidationError(f"unknown joint {joint!r}") from None

    def bone_lengths(self) -> np.ndarray:
        lengths = np.linalg.norm(self.rest_offsets, axis=1)
        lengths[0] = 0.0
        return lengths

    def scaled(self, factor: float) -> "Skeleton":
        return Skeleton(self.names, self.parents, self.rest_offsets * factor)


@dataclass(frozen=True)
class PoseFrame:
    """One pose: root translation plus per-joint local rotations.

    Hand blocks, when given, are appended after the body rotations in the
    order body, left hand, right hand.
    """

    root_translation: np.ndarray
    rotations: np.ndarray
    left_hand: np.ndarray | None = None
    right_hand: np.ndarray | None = None

    def all_rotations(self) -> np.ndarray:
        blocks = [self.rotations]
        blocks += [b for b in (self.left_hand, self.right_hand) if b is not None]
        return quat_normalize(np.concatenate([np.asarray(b, dtype=np.float64).reshape(-1, 4) for b in blocks]))


@dataclass(frozen=True)
class MotionSequence:
    """Uniformly sampled pose sequence; frame ``i`` is at time ``i / fps``."""

    fps: float
    root_translation: np.ndarray  # (T, 3)
    rotations: np.ndarray  # (T, J, 4) local joint rotations, wxyz

    def __post_init__(self):
        fps = float(self.fps)
        if not np.isfinite(fps) or fps <= 0:
            raise InvalidRateError(f"fps must be positive, got {self.fps}")
        root = np.array(self.root_translation, dtype=np.float64)
        rot = np.asarray(self.rotations, dtype=np.float64)
        if root.ndim != 2 or root.shape[1] != 3:
            raise ShapeError(f"root_translation must be (T, 3), got {root.shape}")
        if rot.ndim != 3 or rot.shape[2] != 4 or rot.shape[0] != root.shape[0]:
            raise ShapeError(f"rotations must be (T, J, 4) with T={root.shape[0]}, got {rot.shape}")
        if not (np.all(np.isfinite(root)) and np.all(np.isfinite(rot))):
            raise ValidationError("motion contains non-finite values")
        object.__setattr__(self, "fps", fps)
        object.__setattr__(self, "root_translation", _readonly(root))
        object.__setattr__(self, "rotations", _readonly(quat_normalize(rot)))

    @classmethod
    def from_frames(cls, fps: float, frames: Sequence[PoseFrame]) -> "MotionSequence":
        if not frames:
            raise DegenerateInputError("motion sequence has no frames")
        root = np.stack([np.asarray(f.root_translation, dtype=np.float64) for f in frames])
        rots = [f.all_rotations() for f in frames]
        if len({r.shape for r in rots}) != 1:
            raise ShapeError("frames have differing joint counts")
        return cls(fps, root, np.stack(rots))

    def __len__(self) -> int:
        return self.root_translation.shape[0]

    @property
    def n_joints(self) -> int:
        return self.rotations.shape[1]

    def frame(self, i: int) -> PoseFrame:
        return PoseFrame(self.root_translation[i].copy(), self.rotations[i].copy())


def _fk(sk: Skeleton, root_t: np.ndarray, local: np.ndarray):
    if local.shape[-2] != sk.n_joints:
        raise ShapeError(f"pose has {local.shape[-2]} joint rotations, skeleton has {sk.n_joints} joints")
    lead = local.shape[:-2]
    pos = np.empty(lead + (sk.n_joints, 3))
    rot = np.empty(lead + (sk.n_joints, 4))
    pos[..., 0, :] = root_t
    rot[..., 0, :] = quat_normalize(local[..., 0, :])
    for j in range(1, sk.n_joints):
        p = sk.parents[j]
        rot[..., j, :] = quat_compose(rot[..., p, :], local[..., j, :])
        pos[..., j, :] = pos[..., p, :] + quat_rotate(rot[..., p, :], sk.rest_offsets[j])
    return pos, rot


def forward_kinematics(sk: Skeleton, frame: PoseFrame) -> tuple[np.ndarray, np.ndarray]:
    """World positions ``(J, 3)`` and orientations ``(J, 4)`` for one frame."""
    root_t = np.asarray(frame.root_translation, dtype=np.float64)
    return _fk(sk, root_t, frame.all_rotations())


def forward_kinematics_sequence(sk: Skeleton, seq: MotionSequence) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized FK over a whole sequence: ``(T, J, 3)`` and ``(T, J, 4)``."""
    return _fk(sk, seq.root_translation, seq.rotations)


def rest_height(sk: Skeleton) -> float:
    """Vertical extent of the skeleton in its identity pose."""
    pos, _ = _fk(sk, np.zeros(3), np.tile(IDENTITY, (sk.n_joints, 1)))
    y = pos[:, UP_AXIS]
    return float(y.max() - y.min())


def normalize_height(sk: Skeleton, target: float = DEFAULT_HEIGHT) -> Skeleton:
    """Uniformly scale all bones so that :func:`rest_height` equals ``target``."""
    h = rest_height(sk)
    if h <= 0:
        raise DegenerateInputError("skeleton has zero rest height and cannot be scaled")
    if not target > 0:
        raise ValidationError(f"target height must be positive, got {target}")
    return sk.scaled(target / h)


def heading_quat(q) -> np.ndarray:
    """Rotation about the up axis contained in ``q`` (swing-twist decomposition).

    Returns the identity when ``q`` has no defined twist (a half-turn about a
    horizontal axis).
    """
    q = quat_normalize(q)
    twist = np.zeros_like(q)
    twist[..., 0] = q[..., 0]
    twist[..., 1 + UP_AXIS] = q[..., 1 + UP_AXIS]
    n = np.linalg.norm(twist, axis=-1, keepdims=True)
    twist = np.where(n > 1e-12, twist / np.where(n > 0, n, 1.0), IDENTITY)
    return quat_normalize(twist)


def rebase_sequence(seq: MotionSequence, sk: Skeleton, feet_joints: tuple[int | str, int | str]) -> MotionSequence:
    """Move frame 0's feet midpoint to the origin and zero its root heading.

    One rigid transform, computed from frame 0, is applied to every frame;
    only the rotation about the up axis is removed so that the sequence's
    tilt relative to gravity is untouched.
    """
    if len(seq) == 0:
        raise DegenerateInputError("cannot rebase an empty sequence")
    a, b = (sk.index(j) for j in feet_joints)
    pos, _ = forward_kinematics(sk, seq.frame(0))
    center = 0.5 * (pos[a] + pos[b])
    unyaw = quat_inverse(heading_quat(seq.rotations[0, 0]))

    root_t = quat_rotate(unyaw, seq.root_translation - center)
    rotations = np.array(seq.rotations)
    rotations[:, 0] = quat_compose(unyaw, seq.rotations[:, 0])
    return MotionSequence(seq.fps, root_t, rotations)


def find_feet(sk: Skeleton) -> tuple[int, int]:
    """Guess the two joints whose midpoint is the center of the feet.

    Looks for SMPL-style names (``*foot``, then ``*ankle``); falls back to the
    root joint for both if nothing matches.
    """
    lowered = [n.lower() for n in sk.names]
    for key in ("foot", "ankle"):
        hits = [i for i, n in enumerate(lowered) if key in n and n.startswith(("left", "l_"))]
        hits_r = [i for i, n in enumerate(lowered) if key in n and n.startswith(("right", "r_"))]
        if hits and hits_r:
            return hits[0], hits_r[0]
    return 0, 0


# Kinematic tree of the 22 SMPL body joints.
SMPL_BODY_NAMES = (
    "pelvis", "left_hip", "right_hip", "spine1", "left_knee", "right_knee",
    "spine2", "left_ankle", "right_ankle", "spine3", "left_foot", "right_foot",
    "neck", "left_collar", "right_collar", "head", "left_shoulder",
    "right_shoulder", "left_elbow", "right_elbow", "left_wrist", "right_wrist",
)  # fmt: skip
SMPL_BODY_PARENTS = (-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19)

# Approximate bone offsets of the neutral SMPL template (meters, Y-up).
_SMPL_BODY_OFFSETS = (
    (0.0, 0.0, 0.0),
    (0.0695, -0.0914, -0.0042), (-0.0678, -0.0905, -0.0043), (-0.0026, 0.1089, -0.0267),
    (0.0343, -0.3752, -0.0045), (-0.0383, -0.3827, -0.0089), (0.0055, 0.1352, 0.0011),
    (-0.0136, -0.3980, -0.0437), (0.0158, -0.3984, -0.0423), (0.0015, 0.0529, 0.0254),
    (0.0264, -0.0558, 0.1193), (-0.0254, -0.0481, 0.1233), (-0.0028, 0.2139, -0.0430),
    (0.0788, 0.1217, -0.0341), (-0.0818, 0.1188, -0.0386), (0.0052, 0.0650, 0.0513),
    (0.0910, 0.0305, -0.0089), (-0.0960, 0.0326, -0.0091), (0.2596, -0.0128, -0.0275),
    (-0.2537, -0.0133, -0.0214), (0.2492, 0.0090, -0.0012), (-0.2553, 0.0078, -0.0056),
)  # fmt: skip


def smpl_body_skeleton() -> Skeleton:
    """22-joint SMPL body skeleton with approximate neutral-template offsets."""
    return Skeleton(SMPL_BODY_NAMES, np.array(SMPL_BODY_PARENTS), np.array(_SMPL_BODY_OFFSETS))


def axis_angle_rotations(rotvecs) -> np.ndarray:
    """Convert ``(..., 3)`` axis-angle pose parameters to unit quaternions."""
    return quat_exp(rotvecs)
