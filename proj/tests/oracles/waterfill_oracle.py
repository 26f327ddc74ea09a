# Copyright 2026 The pairnet Authors
# SPDX-License-Identifier: Apache-2.0
"""Brute-force grid check of water-filling for norms (1, 2, 4), budget 3."""
import numpy as np

a = np.array([1.0, 2.0, 4.0])
budget = 3.0


def best_on_grid(lo, hi, step):
    p1 = np.arange(lo[0], hi[0] + step / 2, step)
    p3 = np.arange(lo[2], hi[2] + step / 2, step)
    P1, P3 = np.meshgrid(p1, p3, indexing="ij")
    P2 = (budget - a[0] * P1 - a[2] * P3) / a[1]
    ok = P2 >= 0
    rate = np.where(ok, np.log2(1 + P1) + np.log2(1 + np.maximum(P2, 0)) + np.log2(1 + P3), -np.inf)
    i = np.unravel_index(np.argmax(rate), rate.shape)
    return np.array([P1[i], P2[i], P3[i]]), rate[i]


p, _ = best_on_grid([0, 0, 0], [3, 0, 0.75], 1e-3)
for step in (1e-4, 1e-5, 1e-6):
    lo = np.maximum(p - 20 * step * 10, 0)
    p, r = best_on_grid(lo, p + 20 * step * 10, step)
print(f"P = {p[0]:.6f} {p[1]:.6f} {p[2]:.6f}  rate = {r:.12f}")
