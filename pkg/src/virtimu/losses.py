"""Loss kernels for multimodal contrastive pretraining and windowed classification.

Everything here is plain float64 numpy so the values can serve as references
for an autodiff implementation. ``info_nce_grad`` supplies the analytic
gradient of ``info_nce`` with respect to both embedding batches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ValidationError

__all__ = [
    "DEFAULT_TEMPERATURE",
    "LossConfig",
    "as_embeddings",
    "cosine_similarity_matrix",
    "info_nce",
    "info_nce_grad",
    "contrastive_pairs",
    "contrastive_total",
    "mse_multitask",
    "cross_entropy",
]

DEFAULT_TEMPERATURE = 0.07


@dataclass(frozen=True)
class LossConfig:
    temperature: float = DEFAULT_TEMPERATURE
    symmetrize: bool = False

    def __post_init__(self):
        tau = float(self.temperature)
        if not np.isfinite(tau) or tau <= 0:
            raise ValidationError(f"temperature must be positive, got {self.temperature}")
        object.__setattr__(self, "temperature", tau)


def as_embeddings(x, name: str = "embeddings") -> np.ndarray:
    """Validate an ``(N, D)`` embedding batch: finite, non-empty, no zero rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty (N, D) matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError(f"{name} contains non-finite values")
    zero = np.flatnonzero(~np.any(x != 0, axis=1))
    if zero.size:
        raise ValidationError(f"{name} row {zero[0]} is all zeros; cosine similarity is undefined")
    return x


def _pair(q, k):
    q = as_embeddings(q, "Q")
    k = as_embeddings(k, "K")
    if q.shape != k.shape:
        raise ShapeError(f"Q and K must have the same shape, got {q.shape} and {k.shape}")
    return q, k


def _unit_rows(x: np.ndarray):
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    return x / norms, norms


def cosine_similarity_matrix(q, k) -> np.ndarray:
    """``S[i, j] = cos(q_i, k_j)``, clipped to ``[-1, 1]``."""
    q, k = _pair(q, k)
    qn, _ = _unit_rows(q)
    kn, _ = _unit_rows(k)
    return np.clip(qn @ kn.T, -1.0, 1.0)


def _logits(qn, kn, tau):
    return (qn @ kn.T) / tau


def _info_nce_oneway(q, k, tau):
    """Loss plus the pieces needed for the gradient."""
    qn, q_norm = _unit_rows(q)
    kn, k_norm = _unit_rows(k)
    z = _logits(qn, kn, tau)
    n = z.shape[0]
    zmax = z.max(axis=1, keepdims=True)
    ez = np.exp(z - zmax)
    denom = ez.sum(axis=1, keepdims=True)
    pos = np.diag(z)
    # rows where the positive is the max: log(1 + sum of negatives) keeps full
    # relative precision when the loss is tiny
    off = np.exp(z - pos[:, None])
    off[np.arange(n), np.arange(n)] = 0.0
    per_row = np.where(
        pos >= zmax[:, 0],
        np.log1p(off.sum(axis=1)),
        (np.log(denom) + zmax)[:, 0] - pos,
    )
    loss = float(np.mean(per_row))
    return loss, (qn, q_norm, kn, k_norm, ez / denom)


def _info_nce_oneway_grad(q, k, tau):
    n = q.shape[0]
    _, (qn, q_norm, kn, k_norm, p) = _info_nce_oneway(q, k, tau)
    # dL/dS = (P - I) / (N tau); the diagonal P_ii - 1 is formed as minus the
    # off-diagonal row sum to avoid cancellation when P_ii is close to 1
    g = p.copy()
    g[np.arange(n), np.arange(n)] = 0.0
    g[np.arange(n), np.arange(n)] = -g.sum(axis=1)
    g /= n * tau
    g_qn = g @ kn
    g_kn = g.T @ qn
    # back through x -> x / |x|
    g_q = (g_qn - qn * np.sum(qn * g_qn, axis=1, keepdims=True)) / q_norm
    g_k = (g_kn - kn * np.sum(kn * g_kn, axis=1, keepdims=True)) / k_norm
    return g_q, g_k


def info_nce(q, k, cfg: LossConfig | None = None) -> float:
    """Mean over rows of ``-log softmax(S[i] / tau)[i]`` with cosine ``S``.

    The softmax denominator runs over the whole row, positive included. With
    ``cfg.symmetrize`` the ``(Q, K)`` and ``(K, Q)`` directions are averaged.
    """
    cfg = cfg or LossConfig()
    q, k = _pair(q, k)
    loss = _info_nce_oneway(q, k, cfg.temperature)[0]
    if cfg.symmetrize:
        loss = 0.5 * (loss + _info_nce_oneway(k, q, cfg.temperature)[0])
    return loss


def info_nce_grad(q, k, cfg: LossConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Analytic ``(dL/dQ, dL/dK)`` of :func:`info_nce`."""
    cfg = cfg or LossConfig()
    q, k = _pair(q, k)
    g_q, g_k = _info_nce_oneway_grad(q, k, cfg.temperature)
    if cfg.symmetrize:
        r_k, r_q = _info_nce_oneway_grad(k, q, cfg.temperature)
        g_q = 0.5 * (g_q + r_q)
        g_k = 0.5 * (g_k + r_k)
    return g_q, g_k


def contrastive_pairs(e_t, e_p, e_sl, e_sr):
    """The six ordered (query, key) pairs of the text/pose/left-IMU/right-IMU objective."""
    return [(e_t, e_p), (e_t, e_sl), (e_t, e_sr), (e_p, e_sl), (e_p, e_sr), (e_sl, e_sr)]


def contrastive_total(e_t, e_p, e_sl, e_sr, cfg: LossConfig | None = None) -> float:
    batches = [as_embeddings(x, name) for x, name in zip((e_t, e_p, e_sl, e_sr), ("e_t", "e_p", "e_sl", "e_sr"))]
    if len({b.shape for b in batches}) != 1:
        raise ShapeError(f"all four embedding batches must share (N, D), got {[b.shape for b in batches]}")
    total = 0.0
    for q, k in contrastive_pairs(*batches):
        total += info_nce(q, k, cfg)
    return total


def mse_multitask(x_v, x_p, x_s) -> float:
    """Pose-to-IMU regression MSE plus IMU reconstruction MSE.

    Inputs are ``(N, l, C)`` batches of windows (synthetic target, pose-to-IMU
    prediction, reconstruction). Each term is averaged over windows, samples
    and channels.
    """
    arrays = [np.asarray(x, dtype=np.float64) for x in (x_v, x_p, x_s)]
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise ShapeError(f"all three batches must share a shape, got {[a.shape for a in arrays]}")
    if arrays[0].ndim != 3 or 0 in arrays[0].shape:
        raise ShapeError(f"batches must be non-empty (N, l, C) arrays, got {arrays[0].shape}")
    v, p, s = arrays
    return float(np.mean((v - p) ** 2) + np.mean((v - s) ** 2))


def cross_entropy(logits, labels) -> float:
    """Per-window sum over timesteps of ``-log softmax(logits)[label]``, averaged over windows.

    ``logits`` is ``(B, l, C)`` and ``labels`` integer class ids ``(B, l)``.
    """
    z = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels)
    if z.ndim != 3:
        raise ShapeError(f"logits must be (B, l, C), got {z.shape}")
    if y.shape != z.shape[:2]:
        raise ShapeError(f"labels must have shape {z.shape[:2]}, got {y.shape}")
    n_classes = z.shape[2]
    if n_classes < 2:
        raise ValidationError("need at least 2 classes")
    if not np.all(np.isfinite(z)):
        raise ValidationError("logits contain non-finite values")
    if not np.issubdtype(y.dtype, np.integer):
        if not np.all(np.mod(y, 1) == 0):
            raise ValidationError("labels must be integers")
        y = y.astype(np.int64)
    if np.any(y < 0) or np.any(y >= n_classes):
        raise ValidationError(f"labels must lie in [0, {n_classes})")
    zmax = z.max(axis=2, keepdims=True)
    lse = np.log(np.exp(z - zmax).sum(axis=2)) + zmax[..., 0]
    picked = np.take_along_axis(z, y[..., None], axis=2)[..., 0]
    return float(np.mean(np.sum(lse - picked, axis=1)))
