"""Quaternion and rotation-matrix helpers.

Conventions used everywhere in the package:

* quaternions are float64 arrays of shape ``(..., 4)`` ordered ``(w, x, y, z)``,
  Hamilton product, right-handed frames;
* a pose orientation ``q`` is local-to-world: ``quat_to_matrix(q) @ v_local``
  gives the vector in world coordinates;
* every returned quaternion is renormalized and sign-canonical (``w >= 0``;
  ties at ``w == 0`` resolved by making the first non-zero of ``x, y, z``
  positive), so identical rotations serialize identically.

All functions broadcast over leading dimensions.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

__all__ = [
    "IDENTITY",
    "quat_normalize",
    "quat_canonical",
    "quat_to_matrix",
    "matrix_to_quat",
    "quat_compose",
    "quat_inverse",
    "quat_rotate",
    "quat_exp",
    "quat_log_angle_axis",
    "quat_from_axis_angle",
    "quat_angle_between",
    "slerp",
]

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])

# below this rotation angle the exp/log maps switch to their Taylor series
_SMALL_ANGLE = 1e-6


def _as_quat(q) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.shape[-1] != 4:
        raise ValidationError(f"quaternion must have trailing dimension 4, got shape {q.shape}")
    return q


def quat_canonical(q) -> np.ndarray:
    """Flip signs so that ``w >= 0`` (with a deterministic tie-break at ``w == 0``)."""
    q = _as_quat(q)
    w = q[..., 0]
    flip = w < 0
    tie = w == 0
    if np.any(tie):
        v = q[..., 1:]
        nz = v != 0
        first = np.argmax(nz, axis=-1)
        lead = np.take_along_axis(v, first[..., None], axis=-1)[..., 0]
        flip = flip | (tie & (lead < 0))
    # "+ 0.0" turns negative zeros into positive ones
    return np.where(flip[..., None], -q, q) + 0.0


def quat_normalize(q) -> np.ndarray:
    """Scale to unit norm and canonicalize the sign."""
    q = _as_quat(q)
    n = np.linalg.norm(q, axis=-1, keepdims=True)
    if np.any(n == 0) or not np.all(np.isfinite(n)):
        raise ValidationError("cannot normalize a zero or non-finite quaternion")
    # leave already-unit inputs bit-identical so normalization is idempotent
    n = np.where(np.abs(n - 1.0) <= 4e-16, 1.0, n)
    return quat_canonical(q / n)


def quat_to_matrix(q) -> np.ndarray:
    """Rotation matrix (local-to-world) of shape ``(..., 3, 3)``."""
    q = _as_quat(q)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    xx, yy, zz = x * x, y * y, z * z
    xy, xz, yz = x * y, x * z, y * z
    wx, wy, wz = w * x, w * y, w * z
    m = np.empty(q.shape[:-1] + (3, 3))
    m[..., 0, 0] = 1 - 2 * (yy + zz)
    m[..., 0, 1] = 2 * (xy - wz)
    m[..., 0, 2] = 2 * (xz + wy)
    m[..., 1, 0] = 2 * (xy + wz)
    m[..., 1, 1] = 1 - 2 * (xx + zz)
    m[..., 1, 2] = 2 * (yz - wx)
    m[..., 2, 0] = 2 * (xz - wy)
    m[..., 2, 1] = 2 * (yz + wx)
    m[..., 2, 2] = 1 - 2 * (xx + yy)
    return m


def matrix_to_quat(m, tol: float = 1e-6) -> np.ndarray:
    """Inverse of :func:`quat_to_matrix` (Shepperd's method).

    Raises ``ValidationError`` if ``m`` is not orthonormal with determinant +1
    to within ``tol``.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape[-2:] != (3, 3):
        raise ValidationError(f"rotation matrix must be (..., 3, 3), got {m.shape}")
    gram = np.einsum("...ki,...kj->...ij", m, m)
    if np.max(np.abs(gram - np.eye(3)), initial=0.0) > tol:
        raise ValidationError("matrix is not orthonormal")
    if np.max(np.abs(np.linalg.det(m) - 1.0), initial=0.0) > tol:
        raise ValidationError("matrix determinant is not +1")

    flat = m.reshape(-1, 3, 3)
    out = np.empty((flat.shape[0], 4))
    for n, r in enumerate(flat):
        tr = r[0, 0] + r[1, 1] + r[2, 2]
        diag = (tr, r[0, 0], r[1, 1], r[2, 2])
        k = int(np.argmax(diag))
        if k == 0:
            s = 2.0 * np.sqrt(1.0 + tr)
            out[n] = (0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s)
        elif k == 1:
            s = 2.0 * np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2])
            out[n] = ((r[2, 1] - r[1, 2]) / s, 0.25 * s, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s)
        elif k == 2:
            s = 2.0 * np.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2])
            out[n] = ((r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, 0.25 * s, (r[1, 2] + r[2, 1]) / s)
        else:
            s = 2.0 * np.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1])
            out[n] = ((r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, 0.25 * s)
    return quat_normalize(out.reshape(m.shape[:-2] + (4,)))


def _hamilton(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def quat_compose(a, b) -> np.ndarray:
    """Hamilton product ``a ∘ b``: apply ``b`` first, then ``a``."""
    return quat_normalize(_hamilton(_as_quat(a), _as_quat(b)))


def quat_inverse(q) -> np.ndarray:
    q = _as_quat(q)
    return quat_normalize(q * np.array([1.0, -1.0, -1.0, -1.0]))


def quat_rotate(q, v) -> np.ndarray:
    """Rotate vectors ``v`` (``(..., 3)``) by ``q``."""
    m = quat_to_matrix(q)
    return np.einsum("...ij,...j->...i", m, np.asarray(v, dtype=np.float64))


def quat_exp(rotvec) -> np.ndarray:
    """Unit quaternion for a rotation vector ``theta * axis`` (radians)."""
    r = np.asarray(rotvec, dtype=np.float64)
    if r.shape[-1] != 3:
        raise ValidationError(f"rotation vector must have trailing dimension 3, got {r.shape}")
    theta = np.linalg.norm(r, axis=-1)
    small = theta < _SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    # sin(theta/2)/theta, with its series 1/2 - theta^2/48 near zero
    k = np.where(small, 0.5 - theta**2 / 48.0, np.sin(safe / 2) / safe)
    w = np.where(small, 1.0 - theta**2 / 8.0, np.cos(safe / 2))
    return quat_normalize(np.concatenate([w[..., None], k[..., None] * r], axis=-1))


def quat_log_angle_axis(q) -> np.ndarray:
    """Rotation vector ``theta * axis`` with ``theta`` in ``[0, pi]``."""
    q = quat_canonical(_as_quat(q))
    w = q[..., 0]
    v = q[..., 1:]
    n = np.linalg.norm(v, axis=-1)
    # theta = 2*atan2(n, w); the rotation vector is v * theta / n
    small = n < np.sin(_SMALL_ANGLE / 2)
    safe_n = np.where(small, 1.0, n)
    safe_w = np.where(small, w, 1.0)
    ratio = n / safe_w
    k = np.where(
        small,
        (2.0 / safe_w) * (1.0 - ratio**2 / 3.0),
        2.0 * np.arctan2(n, w) / safe_n,
    )
    return k[..., None] * v


def quat_from_axis_angle(axis, angle) -> np.ndarray:
    axis = np.asarray(axis, dtype=np.float64)
    norm = np.linalg.norm(axis, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValidationError("rotation axis must be non-zero")
    return quat_exp(axis / norm * np.asarray(angle, dtype=np.float64)[..., None])


def quat_angle_between(a, b) -> np.ndarray:
    """Geodesic angle in ``[0, pi]`` between two rotations."""
    rel = quat_compose(quat_inverse(a), b)
    return np.linalg.norm(quat_log_angle_axis(rel), axis=-1)


def slerp(a, b, u) -> np.ndarray:
    """Spherical linear interpolation at fraction ``u`` in ``[0, 1]``.

    Computed as ``a ∘ exp(u · log(a⁻¹ ∘ b))``, which takes the short arc (the
    log of a canonical quaternion has angle at most pi) and stays accurate for
    nearly identical endpoints. For rotations exactly pi apart the arc axis is
    whatever ``log`` returns for the canonical relative quaternion, which is
    deterministic.
    """
    a = quat_normalize(a)
    b = quat_normalize(b)
    u = np.asarray(u, dtype=np.float64)
    rel = quat_log_angle_axis(quat_compose(quat_inverse(a), b))
    return quat_compose(a, quat_exp(u[..., None] * rel))
