"""Contrastive and multitask losses on toy embeddings."""

import numpy as np

from virtimu.losses import LossConfig, contrastive_total, cross_entropy, info_nce, info_nce_grad, mse_multitask

rng = np.random.default_rng(3)
n, d = 8, 16

# identical rows give no signal: the loss is log N
same = np.tile(rng.normal(size=d), (n, 1))
print(f"identical rows: {info_nce(same, same):.6f}  log N = {np.log(n):.6f}")

# matched pairs close together drive the loss toward zero
q = rng.normal(size=(n, d))
for noise in (2.0, 0.5, 0.1):
    k = q + noise * rng.normal(size=(n, d))
    print(f"noise {noise:.1f}: InfoNCE {info_nce(q, k):.4f}")

# one plain gradient step on Q lowers the loss
k = rng.normal(size=(n, d))
gq, _ = info_nce_grad(q, k)
print(f"before step {info_nce(q, k):.4f}, after {info_nce(q - 0.5 * gq, k):.4f}")

# the four-modality objective sums six pairwise terms
e = [rng.normal(size=(n, d)) for _ in range(4)]
print("six-pair total:", contrastive_total(*e, cfg=LossConfig(temperature=0.1)))

x = rng.normal(size=(4, 30, 6))
print("multitask MSE:", mse_multitask(x, x + 0.1, x - 0.2))
print("uniform logits cross-entropy:", cross_entropy(np.zeros((4, 30, 5)), np.zeros((4, 30), int)), "=", 30 * np.log(5))
